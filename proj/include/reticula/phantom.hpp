#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "reticula/annotations.hpp"
#include "reticula/volume.hpp"

namespace reticula {

/// Parameters of a synthetic EM-like stack.
///
/// Reticula are dark filled disks threading consecutive slices. Their centre
/// does an integer random walk with steps no longer than drift_per_slice and
/// their radius jitters by +-1 px within the radius range. Distractors are oversize dark
/// bars and blobs (membrane-like) that no detector should accept. Debris are
/// single-slice reticulum-sized specks absent from the truth; they exercise
/// the tracking stage's deletion rule.
struct PhantomSpec {
  int width = 64;
  int height = 64;
  int depth = 20;
  int n_reticula = 30;
  int radius_min = 1;
  int radius_max = 3;
  int length_min = 3;
  int length_max = 8;
  int reticulum_intensity = 50;
  int n_distractors = 10;
  int distractor_min_extent = 14;
  int n_debris = 0;
  int background_intensity = 160;
  double noise_sigma = 8.0;
  double drift_per_slice = 1.0;
  int min_gap = 4;  // clearance between objects on a slice, in pixels
  std::uint64_t rng_seed = 1;

  void validate() const;
  bool operator==(const PhantomSpec&) const = default;
};

PhantomSpec phantom_spec_from_json(std::string_view text);
std::string phantom_spec_to_json(const PhantomSpec& spec);

struct Phantom {
  Volume volume;
  AnnotationSet truth;               // one confirmed component per reticulum per slice
  std::vector<TrackedObject> tracks;  // one per reticulum spanning >= 2 slices
};

/// Pure function of the spec. Throws ValidationError when the objects cannot
/// be placed without overlapping.
Phantom generate_phantom(const PhantomSpec& spec);

/// The generator's random stream: std::mt19937_64 seeded with rng_seed.
/// uniform() = (next() >> 11) * 2^-53; uniform_int(lo, hi) =
/// lo + floor(uniform() * (hi - lo + 1)); normal() is one Box-Muller draw
/// sqrt(-2 ln(1 - u1)) * cos(2 pi u2) per two uniforms.
class PhantomRng {
 public:
  explicit PhantomRng(std::uint64_t seed);

  double uniform();
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace reticula
