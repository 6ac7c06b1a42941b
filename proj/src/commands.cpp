#include "reticula/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "reticula/annotations.hpp"
#include "reticula/detect.hpp"
#include "reticula/error.hpp"
#include "reticula/filters.hpp"
#include "reticula/phantom.hpp"
#include "reticula/track.hpp"
#include "reticula/volume.hpp"

namespace reticula::cli {

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void log(const std::string& line) { std::cerr << "reticula: " << line << '\n'; }

std::string describe(const ConfusionCounts& c) {
  auto fmt = [](std::optional<double> v) {
    if (!v) return std::string("undefined");
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(4);
    ss << *v;
    return ss.str();
  };
  return "tp=" + std::to_string(c.tp) + " fp=" + std::to_string(c.fp) +
         " fn=" + std::to_string(c.fn) + " precision=" + fmt(precision(c)) +
         " recall=" + fmt(recall(c));
}

}  // namespace

void cmd_filter(const fs::path& in_manifest, const fs::path& out_dir,
                const PipelineConfig& cfg, bool sharpen, int threads) {
  const Volume v = load_stack(in_manifest);
  const FilteredVolumes f = filter_volume(v, cfg.bilateral, sharpen, threads);
  save_stack(f.bilateral, out_dir / "bilateral");
  if (f.sharpened) save_stack(*f.sharpened, out_dir / "sharpened");
  log("filtered " + std::to_string(v.depth()) + " slices into " + out_dir.string());
}

void cmd_detect(const fs::path& bilateral_manifest, const fs::path& sharpened_manifest,
                const fs::path& out_annotations, const PipelineConfig& cfg, int threads) {
  const Volume bilateral = load_stack(bilateral_manifest);
  const Volume sharpened = load_stack(sharpened_manifest);
  if (!bilateral.same_shape(sharpened)) {
    throw ValidationError("bilateral stack " + bilateral_manifest.string() +
                          " and sharpened stack " + sharpened_manifest.string() +
                          " have different dimensions");
  }
  const AnnotationSet a =
      detect_volume(bilateral, sharpened, cfg.grow_bilateral, cfg.grow_laplacian, threads);
  write_annotations(out_annotations, a, {});
  log("detected " + std::to_string(a.size()) + " components");
}

void cmd_track(const fs::path& bilateral_manifest, const fs::path& in_annotations,
               const fs::path& out_annotations, const PipelineConfig& cfg, int threads) {
  const Volume bilateral = load_stack(bilateral_manifest);
  const AnnotationFile in = read_annotations(in_annotations);
  const TrackResult r = track_volume(bilateral, in.annotations, cfg.grow_bilateral, cfg.track,
                                     threads);
  write_annotations(out_annotations, r.annotations, r.tracks);
  log("tracking kept " + std::to_string(r.annotations.count(Status::confirmed)) +
      " components, deleted " + std::to_string(r.annotations.count(Status::deleted)) + ", " +
      std::to_string(r.tracks.size()) + " tracks");
}

ConfusionCounts cmd_eval(const fs::path& pred, const fs::path& truth,
                         const std::optional<fs::path>& out_report, const PipelineConfig& cfg) {
  const AnnotationFile p = read_annotations(pred);
  const AnnotationFile t = read_annotations(truth);
  const ConfusionCounts c = match_annotations(p.annotations, t.annotations, cfg.eval);
  if (out_report) write_text(*out_report, report_json(c));
  log(describe(c));
  return c;
}

void cmd_phantom(const fs::path& spec_json, const fs::path& out_dir) {
  const PhantomSpec spec = phantom_spec_from_json(read_text(spec_json));
  const Phantom ph = generate_phantom(spec);
  save_stack(ph.volume, out_dir);
  write_annotations(out_dir / "truth.json", ph.truth, ph.tracks);
  log("phantom with " + std::to_string(ph.truth.size()) + " truth cross-sections written to " +
      out_dir.string());
}

void cmd_pipeline(const fs::path& in_manifest, const std::optional<fs::path>& truth,
                  const fs::path& out_dir, const PipelineConfig& cfg, int threads) {
  cmd_filter(in_manifest, out_dir, cfg, true, threads);
  const fs::path bilateral = out_dir / "bilateral" / kManifestName;
  const fs::path sharpened = out_dir / "sharpened" / kManifestName;
  cmd_detect(bilateral, sharpened, out_dir / "detections.json", cfg, threads);
  cmd_track(bilateral, out_dir / "detections.json", out_dir / "annotations.json", cfg, threads);
  if (truth) cmd_eval(out_dir / "annotations.json", *truth, out_dir / "report.json", cfg);
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Automatic annotation of axoplasmic reticula in EM image stacks"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Pipeline configuration JSON")
        ->check(CLI::ExistingFile);
    sub->add_option("--threads", threads, "Worker cap (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
  };

  std::string in_manifest, out_dir, bilateral, sharpened, annotations, out_annotations;
  std::string truth_path, spec_path;
  std::vector<std::string> eval_files;
  std::tuple<std::int64_t, std::int64_t, std::int64_t> counts{-1, -1, -1};
  bool sharpen = false;

  auto* filter = app.add_subcommand("filter", "Bilateral filter (and optionally sharpen) a stack");
  filter->add_option("manifest", in_manifest, "Input stack.json")->required();
  filter->add_option("out_dir", out_dir, "Output directory")->required();
  filter->add_flag("--sharpen", sharpen, "Also write the Laplacian-sharpened stack");
  common(filter);

  auto* detect = app.add_subcommand("detect", "Dual-pass region growing");
  detect->add_option("bilateral", bilateral, "Bilateral stack.json")->required();
  detect->add_option("sharpened", sharpened, "Sharpened stack.json")->required();
  detect->add_option("out", out_annotations, "Output annotations.json")->required();
  common(detect);

  auto* track = app.add_subcommand("track", "Confirm, rescue and delete annotations across slices");
  track->add_option("bilateral", bilateral, "Bilateral stack.json")->required();
  track->add_option("annotations", annotations, "Input annotations.json")->required();
  track->add_option("out", out_annotations, "Output file (default: update in place)");
  common(track);

  auto* eval = app.add_subcommand("eval", "Score annotations against ground truth");
  eval->add_option("files", eval_files, "pred.json truth.json [report.json], or [report.json] with --counts");
  auto* counts_opt =
      eval->add_option("--counts", counts, "Score raw counts TP FP FN instead of files");
  common(eval);

  auto* phantom = app.add_subcommand("phantom", "Generate a synthetic stack with ground truth");
  phantom->add_option("spec", spec_path, "Phantom spec.json")->required()->check(CLI::ExistingFile);
  phantom->add_option("out_dir", out_dir, "Output directory")->required();

  auto* pipeline = app.add_subcommand("pipeline", "filter -> detect -> track -> eval");
  pipeline->add_option("manifest", in_manifest, "Input stack.json")->required();
  pipeline->add_option("out_dir", out_dir, "Output directory")->required();
  pipeline->add_option("--truth", truth_path, "Ground-truth annotations.json");
  common(pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (filter->parsed()) {
      cmd_filter(in_manifest, out_dir, cfg, sharpen, threads);
    } else if (detect->parsed()) {
      cmd_detect(bilateral, sharpened, out_annotations, cfg, threads);
    } else if (track->parsed()) {
      cmd_track(bilateral, annotations, out_annotations.empty() ? annotations : out_annotations,
                cfg, threads);
    } else if (eval->parsed()) {
      if (counts_opt->count() > 0) {
        if (eval_files.size() > 1) throw ValidationError("eval --counts takes at most a report path");
        const auto [tp, fp, fn] = counts;
        const ConfusionCounts c{tp, fp, fn};
        if (c.tp < 0 || c.fp < 0 || c.fn < 0) throw ValidationError("counts must be >= 0");
        log(describe(c));
        if (eval_files.empty()) {
          std::cout << report_json(c);
        } else {
          write_text(eval_files[0], report_json(c));
        }
      } else {
        if (eval_files.size() < 2 || eval_files.size() > 3) {
          throw ValidationError("eval needs pred.json truth.json [report.json]");
        }
        std::optional<fs::path> report;
        if (eval_files.size() == 3) report = eval_files[2];
        const ConfusionCounts c = cmd_eval(eval_files[0], eval_files[1], report, cfg);
        if (!report) std::cout << report_json(c);
      }
    } else if (phantom->parsed()) {
      cmd_phantom(spec_path, out_dir);
    } else if (pipeline->parsed()) {
      std::optional<fs::path> truth;
      if (!truth_path.empty()) truth = truth_path;
      cmd_pipeline(in_manifest, truth, out_dir, cfg, threads);
    }
  } catch (const std::exception& e) {
    std::cerr << "reticula: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace reticula::cli
