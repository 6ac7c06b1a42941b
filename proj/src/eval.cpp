#include "reticula/eval.hpp"

#include <algorithm>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "reticula/error.hpp"

namespace reticula {

void MatchCriterion::validate() const {
  switch (mode) {
    case MatchMode::centroid_distance:
      if (!(centroid_tol >= 0.0)) throw ValidationError("centroid_tol must be >= 0");
      break;
    case MatchMode::pixel_overlap:
      if (!(min_iou > 0.0 && min_iou <= 1.0)) {
        throw ValidationError("min_iou must be in (0, 1]");
      }
      break;
  }
}

std::string_view to_string(MatchMode m) {
  return m == MatchMode::centroid_distance ? "centroid_distance" : "pixel_overlap";
}

MatchMode parse_match_mode(std::string_view s) {
  if (s == "centroid_distance") return MatchMode::centroid_distance;
  if (s == "pixel_overlap") return MatchMode::pixel_overlap;
  throw ValidationError("unknown match mode '" + std::string(s) + "'");
}

double iou(const Component& a, const Component& b) {
  if (a.z != b.z) return 0.0;
  std::size_t shared = 0;
  auto i = a.pixels.begin();
  auto j = b.pixels.begin();
  while (i != a.pixels.end() && j != b.pixels.end()) {
    if (*i == *j) {
      ++shared;
      ++i;
      ++j;
    } else if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t united = a.pixels.size() + b.pixels.size() - shared;
  return united == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(united);
}

ConfusionCounts match_annotations(const AnnotationSet& pred, const AnnotationSet& truth,
                                  const MatchCriterion& m) {
  m.validate();
  if (!pred.same_shape(truth)) {
    throw ValidationError("prediction and truth annotate volumes of different dimensions");
  }

  ConfusionCounts counts;
  for (int z = 0; z < pred.depth(); ++z) {
    std::vector<const Component*> ps;
    for (const auto& c : pred.slice(z)) {
      if (c.status != Status::deleted) ps.push_back(&c);
    }
    const auto& ts = truth.slice(z);

    // Cost is distance, or negated overlap, so ascending order is best-first.
    std::vector<std::tuple<double, ComponentId, ComponentId, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t j = 0; j < ts.size(); ++j) {
        if (m.mode == MatchMode::centroid_distance) {
          const double d = distance(ps[i]->centroid, ts[j].centroid);
          if (d <= m.centroid_tol) pairs.emplace_back(d, ps[i]->id, ts[j].id, i, j);
        } else {
          const double o = iou(*ps[i], ts[j]);
          if (o >= m.min_iou) pairs.emplace_back(-o, ps[i]->id, ts[j].id, i, j);
        }
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> pred_used(ps.size(), false);
    std::vector<bool> truth_used(ts.size(), false);
    std::int64_t matched = 0;
    for (const auto& [cost, pid, tid, i, j] : pairs) {
      if (pred_used[i] || truth_used[j]) continue;
      pred_used[i] = truth_used[j] = true;
      ++matched;
    }
    counts.tp += matched;
    counts.fp += static_cast<std::int64_t>(ps.size()) - matched;
    counts.fn += static_cast<std::int64_t>(ts.size()) - matched;
  }
  return counts;
}

std::optional<double> precision(const ConfusionCounts& c) {
  if (c.tp + c.fp == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

std::optional<double> recall(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::string report_json(const ConfusionCounts& c) {
  nlohmann::ordered_json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  const auto p = precision(c);
  const auto r = recall(c);
  j["precision"] = p ? nlohmann::ordered_json(*p) : nlohmann::ordered_json(nullptr);
  j["recall"] = r ? nlohmann::ordered_json(*r) : nlohmann::ordered_json(nullptr);
  j["unit"] = "per-slice cross-section";
  return j.dump(2) + "\n";
}

}  // namespace reticula
