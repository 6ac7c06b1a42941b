#include "reticula/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <json.hpp>

#include "json_fields.hpp"
#include "reticula/error.hpp"

namespace reticula {

PhantomRng::PhantomRng(std::uint64_t seed) : engine_(seed) {}

double PhantomRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PhantomRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int PhantomRng::uniform_int(int lo, int hi) {
  const auto span = static_cast<double>(hi) - lo + 1.0;
  return std::min(hi, lo + static_cast<int>(std::floor(uniform() * span)));
}

double PhantomRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void PhantomSpec::validate() const {
  auto fail = [](const std::string& m) { throw ValidationError("phantom: " + m); };
  if (width < 1 || height < 1 || depth < 1) fail("dimensions must be >= 1");
  if (n_reticula < 0 || n_distractors < 0 || n_debris < 0) fail("object counts must be >= 0");
  if (radius_min < 1 || radius_max < radius_min) fail("radius range must satisfy 1 <= min <= max");
  if (length_min < 1 || length_max < length_min) fail("length range must satisfy 1 <= min <= max");
  if (n_reticula > 0 && length_min > depth) fail("reticulum length_min exceeds depth");
  if (reticulum_intensity < 0 || reticulum_intensity > 255 || background_intensity < 0 ||
      background_intensity > 255) {
    fail("intensities must be in [0, 255]");
  }
  if (reticulum_intensity >= background_intensity) {
    fail("reticulum intensity must be darker than the background");
  }
  if (distractor_min_extent < 2) fail("distractor_min_extent must be >= 2");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  if (!(drift_per_slice >= 0.0)) fail("drift_per_slice must be >= 0");
  if (min_gap < 0) fail("min_gap must be >= 0");
}

PhantomSpec phantom_spec_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("phantom spec: invalid JSON: ") + e.what());
  }
  PhantomSpec s;
  detail::ObjectReader r(j, "spec");
  r.read("width", s.width);
  r.read("height", s.height);
  r.read("depth", s.depth);
  r.read("n_reticula", s.n_reticula);
  r.read_range("reticulum_radius_range", s.radius_min, s.radius_max);
  r.read_range("reticulum_length_range", s.length_min, s.length_max);
  r.read("reticulum_intensity", s.reticulum_intensity);
  r.read("n_distractors", s.n_distractors);
  r.read("distractor_min_extent", s.distractor_min_extent);
  r.read("n_debris", s.n_debris);
  r.read("background_intensity", s.background_intensity);
  r.read("noise_sigma", s.noise_sigma);
  r.read("drift_per_slice", s.drift_per_slice);
  r.read("min_gap", s.min_gap);
  r.read("rng_seed", s.rng_seed);
  r.reject_unknown();
  s.validate();
  return s;
}

std::string phantom_spec_to_json(const PhantomSpec& s) {
  nlohmann::ordered_json j;
  j["width"] = s.width;
  j["height"] = s.height;
  j["depth"] = s.depth;
  j["n_reticula"] = s.n_reticula;
  j["reticulum_radius_range"] = {s.radius_min, s.radius_max};
  j["reticulum_length_range"] = {s.length_min, s.length_max};
  j["reticulum_intensity"] = s.reticulum_intensity;
  j["n_distractors"] = s.n_distractors;
  j["distractor_min_extent"] = s.distractor_min_extent;
  j["n_debris"] = s.n_debris;
  j["background_intensity"] = s.background_intensity;
  j["noise_sigma"] = s.noise_sigma;
  j["drift_per_slice"] = s.drift_per_slice;
  j["min_gap"] = s.min_gap;
  j["rng_seed"] = s.rng_seed;
  return j.dump(2) + "\n";
}

namespace {

constexpr int kMaxAttempts = 2000;

std::vector<Pixel> disk(int cx, int cy, int radius) {
  std::vector<Pixel> out;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) out.push_back({cx + dx, cy + dy});
    }
  }
  return out;
}

// Pixels within half_width of the segment (x0, y0)-(x1, y1).
std::vector<Pixel> bar(double x0, double y0, double x1, double y1, double half_width) {
  std::vector<Pixel> out;
  const int xa = static_cast<int>(std::floor(std::min(x0, x1) - half_width));
  const int xb = static_cast<int>(std::ceil(std::max(x0, x1) + half_width));
  const int ya = static_cast<int>(std::floor(std::min(y0, y1) - half_width));
  const int yb = static_cast<int>(std::ceil(std::max(y0, y1) + half_width));
  const double vx = x1 - x0;
  const double vy = y1 - y0;
  const double len2 = vx * vx + vy * vy;
  for (int y = ya; y <= yb; ++y) {
    for (int x = xa; x <= xb; ++x) {
      double t = len2 > 0.0 ? ((x - x0) * vx + (y - y0) * vy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      if (std::hypot(x - (x0 + t * vx), y - (y0 + t * vy)) <= half_width) {
        out.push_back({x, y});
      }
    }
  }
  return out;
}

// One object's footprint on one slice.
struct Stamp {
  int z;
  std::vector<Pixel> pixels;
};

class Canvas {
 public:
  Canvas(const PhantomSpec& s)
      : spec_(s),
        volume_(s.width, s.height, s.depth, static_cast<std::uint8_t>(s.background_intensity)),
        reserved_(volume_.voxels().size(), false) {}

  bool fits(const std::vector<Stamp>& stamps) const {
    for (const auto& st : stamps) {
      for (const Pixel& p : st.pixels) {
        if (p.x < 0 || p.y < 0 || p.x >= spec_.width || p.y >= spec_.height) return false;
        if (reserved_[index(p.x, p.y, st.z)]) return false;
      }
    }
    return true;
  }

  // Paints the stamps dark and reserves them plus a min_gap margin.
  void paint(const std::vector<Stamp>& stamps) {
    const int g = spec_.min_gap;
    for (const auto& st : stamps) {
      for (const Pixel& p : st.pixels) {
        volume_.set(p.x, p.y, st.z, static_cast<std::uint8_t>(spec_.reticulum_intensity));
        for (int y = std::max(0, p.y - g); y <= std::min(spec_.height - 1, p.y + g); ++y) {
          for (int x = std::max(0, p.x - g); x <= std::min(spec_.width - 1, p.x + g); ++x) {
            reserved_[index(x, y, st.z)] = true;
          }
        }
      }
    }
  }

  Volume& volume() { return volume_; }

 private:
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * spec_.height + y) * spec_.width + x;
  }

  const PhantomSpec& spec_;
  Volume volume_;
  std::vector<bool> reserved_;
};

[[noreturn]] void unplaceable(const char* what, int i) {
  throw ValidationError("phantom: unplaceable geometry, could not place " + std::string(what) +
                        " #" + std::to_string(i) + " (too many objects for the volume)");
}

std::vector<Stamp> distractor(const PhantomSpec& s, PhantomRng& rng) {
  const int span = rng.uniform_int(1, s.depth);
  const int z0 = rng.uniform_int(0, s.depth - span);
  std::vector<Pixel> shape;
  if (rng.uniform_int(0, 1) == 0) {
    const double length = rng.uniform_int(s.distractor_min_extent, s.distractor_min_extent + 10);
    const double angle = rng.uniform(0.0, std::numbers::pi);
    const double cx = rng.uniform(0.0, s.width - 1.0);
    const double cy = rng.uniform(0.0, s.height - 1.0);
    const double hx = 0.5 * length * std::cos(angle);
    const double hy = 0.5 * length * std::sin(angle);
    shape = bar(cx - hx, cy - hy, cx + hx, cy + hy, 1.0);
  } else {
    const int radius = rng.uniform_int(s.distractor_min_extent / 2, s.distractor_min_extent / 2 + 2);
    shape = disk(rng.uniform_int(0, s.width - 1), rng.uniform_int(0, s.height - 1), radius);
  }
  std::vector<Stamp> stamps;
  for (int z = z0; z < z0 + span; ++z) stamps.push_back({z, shape});
  return stamps;
}

// Integer centre offsets no longer than max_step, in row-major order.
std::vector<Pixel> drift_steps(double max_step) {
  const int reach = static_cast<int>(std::floor(max_step));
  std::vector<Pixel> steps;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      if (dx * dx + dy * dy <= max_step * max_step) steps.push_back({dx, dy});
    }
  }
  return steps;
}

struct Reticulum {
  std::vector<Stamp> stamps;
};

Reticulum reticulum(const PhantomSpec& s, PhantomRng& rng, int length) {
  const int z0 = rng.uniform_int(0, s.depth - length);
  const int radius = rng.uniform_int(s.radius_min, s.radius_max);
  const int margin = s.radius_max;
  int cx = rng.uniform_int(margin, std::max(margin, s.width - 1 - margin));
  int cy = rng.uniform_int(margin, std::max(margin, s.height - 1 - margin));
  const auto steps = drift_steps(s.drift_per_slice);
  Reticulum r;
  for (int k = 0; k < length; ++k) {
    if (k > 0) {
      const Pixel step = steps[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(steps.size()) - 1))];
      cx += step.x;
      cy += step.y;
    }
    const int rk = std::clamp(radius + rng.uniform_int(-1, 1), s.radius_min, s.radius_max);
    r.stamps.push_back({z0 + k, disk(cx, cy, rk)});
  }
  return r;
}

}  // namespace

Phantom generate_phantom(const PhantomSpec& s) {
  s.validate();
  PhantomRng rng(s.rng_seed);
  Canvas canvas(s);

  for (int i = 0; i < s.n_distractors; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      auto stamps = distractor(s, rng);
      if (canvas.fits(stamps)) {
        canvas.paint(stamps);
        placed = true;
      }
    }
    if (!placed) unplaceable("distractor", i);
  }

  std::vector<Reticulum> reticula;
  for (int i = 0; i < s.n_reticula; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      const int length = rng.uniform_int(s.length_min, std::min(s.length_max, s.depth));
      Reticulum r = reticulum(s, rng, length);
      if (canvas.fits(r.stamps)) {
        canvas.paint(r.stamps);
        reticula.push_back(std::move(r));
        placed = true;
      }
    }
    if (!placed) unplaceable("reticulum", i);
  }

  for (int i = 0; i < s.n_debris; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      Reticulum r = reticulum(s, rng, 1);
      if (canvas.fits(r.stamps)) {
        canvas.paint(r.stamps);
        placed = true;
      }
    }
    if (!placed) unplaceable("debris", i);
  }

  Volume& v = canvas.volume();
  if (s.noise_sigma > 0.0) {
    for (int z = 0; z < v.depth(); ++z) {
      for (auto& value : v.mutable_slice(z)) {
        const double noisy = value + s.noise_sigma * rng.normal();
        value = static_cast<std::uint8_t>(std::clamp(std::round(noisy), 0.0, 255.0));
      }
    }
  }

  // Truth ids follow z, then reticulum order.
  Phantom out{std::move(v), AnnotationSet(s.width, s.height, s.depth), {}};
  std::vector<std::vector<ComponentId>> ids(reticula.size());
  for (int z = 0; z < s.depth; ++z) {
    for (std::size_t i = 0; i < reticula.size(); ++i) {
      for (const auto& st : reticula[i].stamps) {
        if (st.z != z) continue;
        ids[i].push_back(out.truth.add(
            Component::from_pixels(z, st.pixels, Source::truth, Status::confirmed)));
      }
    }
  }
  for (std::size_t i = 0; i < reticula.size(); ++i) {
    if (reticula[i].stamps.size() < 2) continue;
    TrackedObject t;
    t.track_id = static_cast<std::int64_t>(out.tracks.size());
    for (std::size_t k = 0; k < ids[i].size(); ++k) {
      t.members.emplace_back(reticula[i].stamps[k].z, ids[i][k]);
    }
    out.tracks.push_back(std::move(t));
  }
  return out;
}

}  // namespace reticula
