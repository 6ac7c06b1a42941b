#include "reticula/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

#include "reticula/error.hpp"
#include "reticula/parallel.hpp"

namespace reticula {

void TrackParams::validate() const {
  if (!(xy_tolerance >= 0.0) || !std::isfinite(xy_tolerance)) {
    throw ValidationError("xy_tolerance must be >= 0");
  }
  if (rescue_threshold_delta < 0) {
    throw ValidationError("rescue_threshold_delta must be >= 0, got " +
                          std::to_string(rescue_threshold_delta));
  }
  if (rescue_max_diameter < 1) {
    throw ValidationError("rescue_max_diameter must be >= 1, got " +
                          std::to_string(rescue_max_diameter));
  }
}

const Component* match_in_adjacent(const AnnotationSet& a, const Component& c, int dz,
                                   double tolerance) {
  const int z = c.z + dz;
  if (z < 0 || z >= a.depth()) return nullptr;
  const Component* best = nullptr;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const Component& other : a.slice(z)) {
    if (other.status == Status::deleted) continue;
    const double d = distance(c.centroid, other.centroid);
    if (d > tolerance) continue;
    if (d < best_distance || (d == best_distance && other.id < best->id)) {
      best = &other;
      best_distance = d;
    }
  }
  return best;
}

std::optional<Component> rescue_grow(const SliceView& s, Centroid seed,
                                     const GrowParams& base, const TrackParams& tp) {
  if (!(seed.x >= 0.0 && seed.y >= 0.0 && seed.x <= s.width() - 1 &&
        seed.y <= s.height() - 1)) {
    throw std::out_of_range("rescue seed outside slice");
  }
  const int threshold = base.dark_threshold + tp.rescue_threshold_delta;
  const double tol = tp.xy_tolerance;

  std::optional<Pixel> start;
  double start_distance = std::numeric_limits<double>::infinity();
  const int y0 = std::max(0, static_cast<int>(std::floor(seed.y - tol)));
  const int y1 = std::min(s.height() - 1, static_cast<int>(std::ceil(seed.y + tol)));
  const int x0 = std::max(0, static_cast<int>(std::floor(seed.x - tol)));
  const int x1 = std::min(s.width() - 1, static_cast<int>(std::ceil(seed.x + tol)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (s(x, y) >= threshold) continue;
      const double d = std::hypot(x - seed.x, y - seed.y);
      if (d <= tol && d < start_distance) {  // strict: row-major first wins ties
        start = Pixel{x, y};
        start_distance = d;
      }
    }
  }
  if (!start) return std::nullopt;

  std::vector<bool> visited(s.pixels().size(), false);
  auto region = flood_region(s, *start, threshold, tp.rescue_max_diameter, visited);
  if (!region || static_cast<int>(region->size()) < base.min_area) return std::nullopt;
  Component c = Component::from_pixels(s.z(), std::move(*region), Source::rescue);
  if (distance(c.centroid, seed) > tol) return std::nullopt;
  return c;
}

namespace {

enum class Verdict { confirm, rescue, exempt, remove };

struct Decision {
  int z = 0;
  std::size_t index = 0;  // position within the snapshot slice
  Verdict verdict = Verdict::remove;
  std::vector<Component> rescues;
};

Decision decide(const Volume& bilateral, const AnnotationSet& snapshot, const Component& c,
                const GrowParams& gp, const TrackParams& tp) {
  Decision d;
  d.z = c.z;
  if (match_in_adjacent(snapshot, c, -1, tp.xy_tolerance) != nullptr ||
      match_in_adjacent(snapshot, c, +1, tp.xy_tolerance) != nullptr) {
    d.verdict = Verdict::confirm;
    return d;
  }
  for (int dz : {-1, +1}) {
    const int z = c.z + dz;
    if (z < 0 || z >= bilateral.depth()) continue;
    auto rescued = rescue_grow(bilateral.slice(z), c.centroid, gp, tp);
    if (!rescued) continue;
    const auto& existing = snapshot.slice(z);
    const bool collides = std::any_of(existing.begin(), existing.end(), [&](const Component& e) {
      return e.status != Status::deleted && e.overlaps(*rescued);
    });
    if (!collides) d.rescues.push_back(std::move(*rescued));
  }
  if (!d.rescues.empty()) {
    d.verdict = Verdict::rescue;
  } else if (c.z == 0 || c.z == bilateral.depth() - 1) {
    d.verdict = Verdict::exempt;
  } else {
    d.verdict = Verdict::remove;
  }
  return d;
}

}  // namespace

std::vector<TrackedObject> link_tracks(const AnnotationSet& a, double tolerance) {
  std::map<ComponentId, ComponentId> next;
  std::map<ComponentId, ComponentId> prev;
  for (int z = 0; z + 1 < a.depth(); ++z) {
    std::vector<std::tuple<double, ComponentId, ComponentId>> pairs;
    for (const Component& c : a.slice(z)) {
      if (c.status != Status::confirmed) continue;
      for (const Component& d : a.slice(z + 1)) {
        if (d.status != Status::confirmed) continue;
        const double dist = distance(c.centroid, d.centroid);
        if (dist <= tolerance) pairs.emplace_back(dist, c.id, d.id);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [dist, from, to] : pairs) {
      if (next.contains(from) || prev.contains(to)) continue;
      next[from] = to;
      prev[to] = from;
    }
  }

  std::vector<TrackedObject> tracks;
  for (int z = 0; z < a.depth(); ++z) {
    std::vector<ComponentId> starts;
    for (const Component& c : a.slice(z)) {
      if (c.status == Status::confirmed && !prev.contains(c.id) && next.contains(c.id)) {
        starts.push_back(c.id);
      }
    }
    std::sort(starts.begin(), starts.end());
    for (ComponentId id : starts) {
      TrackedObject t;
      t.track_id = static_cast<std::int64_t>(tracks.size());
      int member_z = z;
      for (auto cur = id;;) {
        t.members.emplace_back(member_z++, cur);
        auto it = next.find(cur);
        if (it == next.end()) break;
        cur = it->second;
      }
      tracks.push_back(std::move(t));
    }
  }
  return tracks;
}

TrackResult track_volume(const Volume& bilateral, const AnnotationSet& a,
                         const GrowParams& gp, const TrackParams& tp, int threads) {
  gp.validate();
  tp.validate();
  if (a.depth() != bilateral.depth()) {
    throw ValidationError("track_volume: annotation depth " + std::to_string(a.depth()) +
                          " does not match volume depth " +
                          std::to_string(bilateral.depth()) + " (z out of range)");
  }
  if (a.width() != bilateral.width() || a.height() != bilateral.height()) {
    throw ValidationError("track_volume: annotation and volume slice sizes differ");
  }

  // Decision phase reads only the snapshot `a`.
  std::vector<std::pair<int, std::size_t>> pending;
  for (int z = 0; z < a.depth(); ++z) {
    const auto& slice = a.slice(z);
    for (std::size_t i = 0; i < slice.size(); ++i) {
      if (slice[i].status == Status::provisional) pending.emplace_back(z, i);
    }
  }
  std::vector<Decision> decisions(pending.size());
  parallel_for(static_cast<int>(pending.size()), threads, [&](int k) {
    const auto [z, i] = pending[static_cast<std::size_t>(k)];
    decisions[static_cast<std::size_t>(k)] = decide(bilateral, a, a.slice(z)[i], gp, tp);
    decisions[static_cast<std::size_t>(k)].index = i;
  });

  // Single-writer commit in z-then-id order.
  std::stable_sort(decisions.begin(), decisions.end(), [&](const Decision& l, const Decision& r) {
    return std::pair(l.z, a.slice(l.z)[l.index].id) < std::pair(r.z, a.slice(r.z)[r.index].id);
  });
  TrackResult result{a, {}};
  AnnotationSet& out = result.annotations;
  for (Decision& d : decisions) {
    Component& c = out.mutable_slice(d.z)[d.index];
    c.status = d.verdict == Verdict::remove ? Status::deleted : Status::confirmed;
    for (Component& r : d.rescues) {
      const auto& target = out.slice(r.z);
      const bool duplicate = std::any_of(target.begin(), target.end(), [&](const Component& e) {
        return e.source == Source::rescue && e.pixels == r.pixels;
      });
      if (duplicate) continue;
      r.status = Status::confirmed;
      out.add(std::move(r));
    }
  }

  result.tracks = link_tracks(out, tp.xy_tolerance);
  return result;
}

}  // namespace reticula
