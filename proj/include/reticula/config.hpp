#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "reticula/detect.hpp"
#include "reticula/eval.hpp"
#include "reticula/filters.hpp"
#include "reticula/track.hpp"

namespace reticula {

/// Every tunable of the pipeline. Missing keys take the defaults below;
/// unknown keys and out-of-range values are rejected with their JSON path.
struct PipelineConfig {
  BilateralParams bilateral{2.0, 25.0, 6};
  GrowParams grow_bilateral{90, 10, 2};
  GrowParams grow_laplacian{80, 10, 2};
  TrackParams track{3.0, 20, 12};
  MatchCriterion eval{MatchMode::centroid_distance, 5.0, 0.5};

  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& c);

}  // namespace reticula
