// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Thresholds and tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "reticula/annotations.hpp"
#include "reticula/commands.hpp"
#include "reticula/config.hpp"
#include "reticula/detect.hpp"
#include "reticula/eval.hpp"
#include "reticula/filters.hpp"
#include "reticula/phantom.hpp"
#include "reticula/track.hpp"
#include "test_helpers.hpp"

using namespace reticula;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = RETICULA_SOURCE_DIR;
const fs::path kConfigPath = kSource / "configs" / "reference.json";
const fs::path kPhantomPath = kSource / "configs" / "reference_phantom.json";

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << (o.pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << " -- " << o.detail << " ("
       << secs << " s)";
  std::cout << line.str() << std::endl;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return files;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

// Criterion 2
Outcome table_one() {
  const ConfusionCounts c{117, 18, 109};
  const auto p = precision(c);
  const auto r = recall(c);
  const bool ok = p && r && std::abs(*p - 0.8667) <= 1e-4 && std::abs(*r - 0.5177) <= 1e-4 &&
                  std::lround(*p * 100) == 87 && std::lround(*r * 100) == 52;
  return {ok, "precision " + (p ? fixed(*p) : "undefined") + ", recall " +
                  (r ? fixed(*r) : "undefined") + " (expected 0.8667 / 0.5177, tol 1e-4)"};
}

// Criterion 3
Outcome bilateral_oracle() {
  std::mt19937 rng(3003);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto img = trial % 2 ? oracle::random_uniform(rng, 64, 64) : oracle::random_blobby(rng, 64, 64);
    const double ss = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    const double sr = std::uniform_real_distribution<double>(5.0, 50.0)(rng);
    const int radius = std::uniform_int_distribution<int>(1, 5)(rng);
    const auto out = bilateral_filter_slice(testing_support::view(img), BilateralParams::make(ss, sr, radius));
    const auto ref = oracle::bilateral(img, ss, sr, radius);
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(out.pixels[i] - ref[i]));
  }
  return {worst <= 1.0, "50 slices 64x64, max |filter - direct sum| = " + fixed(worst) + " levels (tol 1)"};
}

// Criterion 4
Outcome laplacian_oracle() {
  std::mt19937 rng(4004);
  int mismatched = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto img = trial % 2 ? oracle::random_uniform(rng, 64, 64) : oracle::random_blobby(rng, 64, 64);
    if (laplacian_sharpen_slice(testing_support::view(img)).pixels != oracle::laplacian_sharpen(img)) {
      ++mismatched;
    }
  }
  return {mismatched == 0, "50 slices 64x64, " + std::to_string(mismatched) + " differ from the convolution oracle"};
}

// Criterion 5
Outcome growing_oracle() {
  std::mt19937 rng(5005);
  int mismatched = 0;
  std::size_t total = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto img = oracle::random_blobby(rng, 64, 64);
    const GrowParams g{std::uniform_int_distribution<int>(40, 140)(rng),
                       std::uniform_int_distribution<int>(2, 14)(rng),
                       std::uniform_int_distribution<int>(1, 3)(rng)};
    std::set<oracle::PixelSet> got;
    for (const auto& c : grow_regions(testing_support::view(img), g)) {
      oracle::PixelSet s;
      for (const Pixel& p : c.pixels) s.insert({p.y, p.x});
      got.insert(s);
    }
    total += got.size();
    if (got != oracle::components(img, g.dark_threshold, g.max_diameter, g.min_area)) ++mismatched;
  }
  return {mismatched == 0, "50 slices 64x64, " + std::to_string(total) + " components, " +
                               std::to_string(mismatched) + " slices differ from the labelling oracle"};
}

// Criterion 6
Outcome tracking_invariants(const PipelineConfig& cfg, const PhantomSpec& base) {
  std::size_t provisional = 0, orphans = 0, not_idempotent = 0, confirmed = 0, deleted = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    PhantomSpec spec = base;
    spec.rng_seed = 600 + k;
    const auto ph = generate_phantom(spec);
    const auto f = filter_volume(ph.volume, cfg.bilateral, true, 0);
    const auto detected = detect_volume(f.bilateral, *f.sharpened, cfg.grow_bilateral, cfg.grow_laplacian, 0);
    const auto r = track_volume(f.bilateral, detected, cfg.grow_bilateral, cfg.track, 0);
    provisional += r.annotations.count(Status::provisional);
    confirmed += r.annotations.count(Status::confirmed);
    deleted += r.annotations.count(Status::deleted);
    for (int z = 1; z + 1 < r.annotations.depth(); ++z) {
      for (const auto& c : r.annotations.slice(z)) {
        if (c.status != Status::confirmed) continue;
        bool partner = false;
        for (int dz : {-1, +1}) {
          for (const auto& d : r.annotations.slice(z + dz)) {
            partner |= d.status == Status::confirmed &&
                       distance(c.centroid, d.centroid) <= cfg.track.xy_tolerance;
          }
        }
        if (!partner) ++orphans;
      }
    }
    const auto again = track_volume(f.bilateral, r.annotations, cfg.grow_bilateral, cfg.track, 0);
    if (!(again.annotations == r.annotations) || again.tracks != r.tracks) ++not_idempotent;
  }
  const bool ok = provisional == 0 && orphans == 0 && not_idempotent == 0;
  return {ok, "20 phantoms: " + std::to_string(confirmed) + " confirmed, " + std::to_string(deleted) +
                  " deleted, " + std::to_string(provisional) + " provisional, " + std::to_string(orphans) +
                  " interior orphans, " + std::to_string(not_idempotent) + " non-idempotent reruns"};
}

struct EndToEnd {
  ConfusionCounts before;
  ConfusionCounts after;
  double seconds;
};

EndToEnd run_reference(const fs::path& work, const PipelineConfig& cfg) {
  cli::cmd_phantom(kPhantomPath, work / "phantom");
  const auto start = std::chrono::steady_clock::now();
  cli::cmd_pipeline(work / "phantom" / kManifestName, work / "phantom" / "truth.json", work / "run",
                    cfg, 0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto truth = read_annotations(work / "phantom" / "truth.json").annotations;
  const auto before = read_annotations(work / "run" / "detections.json").annotations;
  const auto after = read_annotations(work / "run" / "annotations.json").annotations;
  return {match_annotations(before, truth, cfg.eval), match_annotations(after, truth, cfg.eval), secs};
}

// Criterion 7
Outcome end_to_end(const EndToEnd& e, const PipelineConfig& cfg) {
  const auto p = precision(e.after);
  const auto r = recall(e.after);
  const bool criterion = cfg.eval.mode == MatchMode::centroid_distance && cfg.eval.centroid_tol == 5.0;
  const bool ok = criterion && p && r && *p >= 0.90 && *r >= 0.60 && e.seconds < 60.0;
  return {ok, "tp " + std::to_string(e.after.tp) + " fp " + std::to_string(e.after.fp) + " fn " +
                  std::to_string(e.after.fn) + ", precision " + (p ? fixed(*p) : "undefined") +
                  " (>= 0.90), recall " + (r ? fixed(*r) : "undefined") + " (>= 0.60), pipeline " +
                  fixed(e.seconds, 2) + " s (< 60)"};
}

// Criterion 8
Outcome tracking_improves(const EndToEnd& e) {
  const auto before = precision(e.before);
  const auto after = precision(e.after);
  if (!before || !after) return {false, "precision undefined"};
  const bool ok = e.before.fp >= 1 ? *after > *before : *after >= *before;
  return {ok, "precision " + fixed(*before) + " -> " + fixed(*after) + " with " +
                  std::to_string(e.before.fp) + " spurious detections before tracking" +
                  (e.before.fp >= 1 ? " (strict improvement required)" : "")};
}

// Criterion 9
Outcome determinism(const fs::path& work, const PipelineConfig& cfg) {
  const fs::path stack = work / "phantom" / kManifestName;
  const fs::path truth = work / "phantom" / "truth.json";
  std::map<std::string, std::string> reference;
  std::string detail = "threads";
  bool ok = true;
  for (int threads : {1, 4, 1, 0, 7}) {
    const fs::path out = work / ("det-" + std::to_string(threads) + "-" + std::to_string(reference.size()));
    fs::remove_all(out);
    cli::cmd_pipeline(stack, truth, out, cfg, threads);
    auto files = tree(out);
    if (reference.empty()) {
      reference = std::move(files);
    } else {
      ok &= files == reference;
    }
    detail += " " + std::to_string(threads);
  }
  return {ok, "5 pipeline runs (" + detail + "), " + std::to_string(reference.size()) +
                  " artifacts each, " + (ok ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
  const PipelineConfig cfg = load_config(kConfigPath);
  const PhantomSpec spec = phantom_spec_from_json(read_file(kPhantomPath));
  testing_support::TempDir work("acceptance");

  // The bundled phantom must be the described reference geometry.
  const bool reference_geometry =
      spec.width == 64 && spec.height == 64 && spec.depth == 20 && spec.n_reticula == 30 &&
      spec.radius_min == 1 && spec.radius_max == 3 && spec.length_min == 3 && spec.length_max == 8 &&
      spec.n_distractors == 10 && spec.noise_sigma == 8.0 &&
      2 * (spec.radius_max) + 1 <= cfg.grow_bilateral.max_diameter;

  report(1, "Scope of published-number reproduction", [] {
    return Outcome{true, "no reference EM imagery or expert truth is bundled; the published operating point is "
                         "checked arithmetically (2), the rest by oracle and phantom properties (3-9)"};
  });
  report(2, "Confusion-matrix arithmetic", table_one);
  report(3, "Bilateral filter vs direct-sum oracle", bilateral_oracle);
  report(4, "Laplacian sharpening vs convolution oracle", laplacian_oracle);
  report(5, "Region growing vs labelling oracle", growing_oracle);
  report(6, "Tracking invariants on random phantoms", [&] { return tracking_invariants(cfg, spec); });

  EndToEnd e{};
  bool ran = false;
  std::string run_error;
  try {
    e = run_reference(work.path(), cfg);
    ran = true;
  } catch (const std::exception& ex) {
    run_error = ex.what();
  }
  report(7, "End-to-end reference phantom gate", [&] {
    if (!reference_geometry) return Outcome{false, "bundled phantom spec is not the reference geometry"};
    return ran ? end_to_end(e, cfg) : Outcome{false, "pipeline failed: " + run_error};
  });
  report(8, "Tracking improves precision", [&] {
    return ran ? tracking_improves(e) : Outcome{false, "pipeline failed: " + run_error};
  });
  report(9, "Deterministic artifacts across thread counts", [&] { return determinism(work.path(), cfg); });

  std::cout << (failures == 0 ? "ALL ACCEPTANCE CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
