#pragma once

#include <optional>
#include <vector>

#include "reticula/annotations.hpp"
#include "reticula/detect.hpp"
#include "reticula/volume.hpp"

namespace reticula {

/// Cross-slice tracking parameters.
///
/// xy_tolerance is the centroid match radius in pixels. Rescue growth uses
/// dark_threshold + rescue_threshold_delta as its threshold and
/// rescue_max_diameter as its extent bound.
struct TrackParams {
  double xy_tolerance = 3.0;
  int rescue_threshold_delta = 20;
  int rescue_max_diameter = 12;

  void validate() const;
  bool operator==(const TrackParams&) const = default;
};

/// Nearest non-deleted component on slice c.z + dz whose centroid lies within
/// `tolerance` of c's centroid; ties go to the lower id. Null when the slice
/// is outside the volume or nothing qualifies.
const Component* match_in_adjacent(const AnnotationSet& a, const Component& c, int dz,
                                   double tolerance);

/// Relaxed growth near `seed`: picks the dark pixel (under the relaxed
/// threshold) nearest to seed within xy_tolerance, floods from it, and keeps
/// the region when it passes the rescue diameter bound, reaches
/// base.min_area, and its centroid stays within xy_tolerance of seed.
/// Throws std::out_of_range when seed lies outside the slice.
std::optional<Component> rescue_grow(const SliceView& s, Centroid seed,
                                     const GrowParams& base, const TrackParams& tp);

struct TrackResult {
  AnnotationSet annotations;
  std::vector<TrackedObject> tracks;
};

/// Confirms, rescues or deletes every provisional component, deciding from
/// the input snapshot only, then links confirmed components on consecutive
/// slices into tracks of length >= 2.
///
/// Components on the first and last slice are never deleted. Rescued
/// components are appended confirmed with fresh ids in z-then-id order of the
/// component that triggered them; a rescue identical to one already added is
/// not duplicated, and one overlapping an existing annotation is discarded.
TrackResult track_volume(const Volume& bilateral, const AnnotationSet& a,
                         const GrowParams& gp, const TrackParams& tp, int threads = 1);

/// Greedy one-to-one linking of confirmed components on adjacent slices,
/// nearest pairs first. Exposed for testing.
std::vector<TrackedObject> link_tracks(const AnnotationSet& a, double tolerance);

}  // namespace reticula
