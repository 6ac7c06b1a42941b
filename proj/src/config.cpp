#include "reticula/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "json_fields.hpp"
#include "reticula/error.hpp"

namespace reticula {

using detail::ObjectReader;
using json = nlohmann::json;

namespace {

// Re-raises a parameter validation failure under the given JSON path.
template <typename F>
void validate_at(const std::string& path, F&& check) {
  try {
    check();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

GrowParams read_grow(ObjectReader& parent, const char* key, GrowParams defaults) {
  if (!parent.has(key)) return defaults;
  ObjectReader r(parent.child(key), parent.at(key));
  r.read("dark_threshold", defaults.dark_threshold);
  r.read("max_diameter", defaults.max_diameter);
  r.read("min_area", defaults.min_area);
  r.reject_unknown();
  validate_at(parent.at(key), [&] { defaults.validate(); });
  return defaults;
}

}  // namespace

void PipelineConfig::validate() const {
  validate_at("config.bilateral", [&] { bilateral.validate(); });
  validate_at("config.grow_bilateral", [&] { grow_bilateral.validate(); });
  validate_at("config.grow_laplacian", [&] { grow_laplacian.validate(); });
  validate_at("config.track", [&] { track.validate(); });
  validate_at("config.eval", [&] { eval.validate(); });
}

PipelineConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }

  PipelineConfig c;
  ObjectReader root(j, "config");

  if (root.has("bilateral")) {
    ObjectReader r(root.child("bilateral"), root.at("bilateral"));
    r.read("sigma_s", c.bilateral.sigma_s);
    r.read("sigma_r", c.bilateral.sigma_r);
    c.bilateral.radius = BilateralParams::default_radius(c.bilateral.sigma_s);
    r.read("radius", c.bilateral.radius);
    r.reject_unknown();
    validate_at(root.at("bilateral"), [&] { c.bilateral.validate(); });
  }

  c.grow_bilateral = read_grow(root, "grow_bilateral", c.grow_bilateral);
  c.grow_laplacian = read_grow(root, "grow_laplacian", c.grow_laplacian);

  c.track.rescue_max_diameter = c.grow_bilateral.max_diameter + 2;
  if (root.has("track")) {
    ObjectReader r(root.child("track"), root.at("track"));
    r.read("xy_tolerance", c.track.xy_tolerance);
    r.read("rescue_threshold_delta", c.track.rescue_threshold_delta);
    r.read("rescue_max_diameter", c.track.rescue_max_diameter);
    r.reject_unknown();
    validate_at(root.at("track"), [&] { c.track.validate(); });
  }

  if (root.has("eval")) {
    ObjectReader r(root.child("eval"), root.at("eval"));
    std::string mode(to_string(c.eval.mode));
    r.read("mode", mode);
    validate_at(r.at("mode"), [&] { c.eval.mode = parse_match_mode(mode); });
    r.read("centroid_tol", c.eval.centroid_tol);
    r.read("min_iou", c.eval.min_iou);
    r.reject_unknown();
    validate_at(root.at("eval"), [&] { c.eval.validate(); });
  }

  root.reject_unknown();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["bilateral"] = {{"sigma_s", c.bilateral.sigma_s},
                    {"sigma_r", c.bilateral.sigma_r},
                    {"radius", c.bilateral.radius}};
  auto grow = [](const GrowParams& g) {
    return nlohmann::ordered_json{{"dark_threshold", g.dark_threshold},
                                  {"max_diameter", g.max_diameter},
                                  {"min_area", g.min_area}};
  };
  j["grow_bilateral"] = grow(c.grow_bilateral);
  j["grow_laplacian"] = grow(c.grow_laplacian);
  j["track"] = {{"xy_tolerance", c.track.xy_tolerance},
                {"rescue_threshold_delta", c.track.rescue_threshold_delta},
                {"rescue_max_diameter", c.track.rescue_max_diameter}};
  j["eval"] = {{"mode", to_string(c.eval.mode)},
               {"centroid_tol", c.eval.centroid_tol},
               {"min_iou", c.eval.min_iou}};
  return j.dump(2) + "\n";
}

}  // namespace reticula
