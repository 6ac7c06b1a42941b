#pragma once

#include <filesystem>
#include <optional>

#include "reticula/config.hpp"
#include "reticula/eval.hpp"

namespace reticula::cli {

namespace fs = std::filesystem;

// Each command throws reticula::Error on failure; run() maps that to a
// nonzero exit code.

/// Writes <out_dir>/bilateral/ and, when sharpen is set, <out_dir>/sharpened/.
void cmd_filter(const fs::path& in_manifest, const fs::path& out_dir,
                const PipelineConfig& cfg, bool sharpen, int threads);

void cmd_detect(const fs::path& bilateral_manifest, const fs::path& sharpened_manifest,
                const fs::path& out_annotations, const PipelineConfig& cfg, int threads);

/// out_annotations may equal in_annotations (in-place update).
void cmd_track(const fs::path& bilateral_manifest, const fs::path& in_annotations,
               const fs::path& out_annotations, const PipelineConfig& cfg, int threads);

ConfusionCounts cmd_eval(const fs::path& pred, const fs::path& truth,
                         const std::optional<fs::path>& out_report, const PipelineConfig& cfg);

/// Writes stack.json, one PGM per slice and truth.json into out_dir.
void cmd_phantom(const fs::path& spec_json, const fs::path& out_dir);

/// filter --sharpen, detect, track and (with truth) eval, writing
/// bilateral/, sharpened/, detections.json, annotations.json and report.json
/// under out_dir.
void cmd_pipeline(const fs::path& in_manifest, const std::optional<fs::path>& truth,
                  const fs::path& out_dir, const PipelineConfig& cfg, int threads);

/// Command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace reticula::cli
