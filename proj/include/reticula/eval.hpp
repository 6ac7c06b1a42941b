#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "reticula/annotations.hpp"

namespace reticula {

/// Confusion tallies over per-slice cross-sections. There is no true-negative
/// count: background is not enumerable as objects.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  bool operator==(const ConfusionCounts&) const = default;
};

enum class MatchMode { centroid_distance, pixel_overlap };

struct MatchCriterion {
  MatchMode mode = MatchMode::centroid_distance;
  double centroid_tol = 5.0;  // used in centroid_distance mode
  double min_iou = 0.5;       // used in pixel_overlap mode, in (0, 1]

  void validate() const;
  bool operator==(const MatchCriterion&) const = default;
};

std::string_view to_string(MatchMode m);
MatchMode parse_match_mode(std::string_view s);

/// Intersection over union of two pixel sets (0 when on different slices).
double iou(const Component& a, const Component& b);

/// Greedy one-to-one matching per slice. Candidate pairs that satisfy the
/// criterion are taken nearest-first (or highest overlap first), ties broken
/// by prediction id then truth id. Deleted predictions are ignored.
ConfusionCounts match_annotations(const AnnotationSet& pred, const AnnotationSet& truth,
                                  const MatchCriterion& m);

/// tp / (tp + fp); nullopt when there are no predictions.
std::optional<double> precision(const ConfusionCounts& c);
/// tp / (tp + fn); nullopt when there is no ground truth.
std::optional<double> recall(const ConfusionCounts& c);

/// Report JSON: tp, fp, fn, precision, recall (null when undefined) and the
/// counting unit.
std::string report_json(const ConfusionCounts& c);

}  // namespace reticula
