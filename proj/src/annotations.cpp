#include "reticula/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "reticula/error.hpp"

namespace reticula {

using ojson = nlohmann::ordered_json;

double distance(const Centroid& a, const Centroid& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::bilateral: return "bilateral";
    case Source::laplacian: return "laplacian";
    case Source::rescue: return "rescue";
    case Source::truth: return "truth";
  }
  return "?";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::provisional: return "provisional";
    case Status::confirmed: return "confirmed";
    case Status::deleted: return "deleted";
  }
  return "?";
}

Source parse_source(std::string_view s) {
  for (Source v : {Source::bilateral, Source::laplacian, Source::rescue, Source::truth}) {
    if (to_string(v) == s) return v;
  }
  throw FormatError("unknown component source '" + std::string(s) + "'");
}

Status parse_status(std::string_view s) {
  for (Status v : {Status::provisional, Status::confirmed, Status::deleted}) {
    if (to_string(v) == s) return v;
  }
  throw FormatError("unknown component status '" + std::string(s) + "'");
}

Component Component::from_pixels(int z, std::vector<Pixel> pixels, Source source,
                                 Status status) {
  if (pixels.empty()) throw std::invalid_argument("component needs at least one pixel");
  std::sort(pixels.begin(), pixels.end());
  pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());

  Component c;
  c.z = z;
  c.source = source;
  c.status = status;
  c.bbox = {pixels.front().x, pixels.front().y, pixels.front().x, pixels.front().y};
  double sx = 0.0;
  double sy = 0.0;
  for (const Pixel& p : pixels) {
    sx += p.x;
    sy += p.y;
    c.bbox.x_min = std::min(c.bbox.x_min, p.x);
    c.bbox.x_max = std::max(c.bbox.x_max, p.x);
    c.bbox.y_min = std::min(c.bbox.y_min, p.y);
    c.bbox.y_max = std::max(c.bbox.y_max, p.y);
  }
  const auto n = static_cast<double>(pixels.size());
  c.centroid = {sx / n, sy / n};
  c.pixels = std::move(pixels);
  return c;
}

bool Component::overlaps(const Component& other) const {
  if (z != other.z) return false;
  if (bbox.x_max < other.bbox.x_min || other.bbox.x_max < bbox.x_min ||
      bbox.y_max < other.bbox.y_min || other.bbox.y_max < bbox.y_min) {
    return false;
  }
  auto a = pixels.begin();
  auto b = other.pixels.begin();
  while (a != pixels.end() && b != other.pixels.end()) {
    if (*a == *b) return true;
    if (*a < *b) ++a; else ++b;
  }
  return false;
}

AnnotationSet::AnnotationSet(int width, int height, int depth)
    : width_(width), height_(height), depth_(depth) {
  if (width < 1 || height < 1 || depth < 1) {
    throw ValidationError("annotation set dimensions must be at least 1x1x1");
  }
  slices_.resize(static_cast<std::size_t>(depth));
}

void AnnotationSet::check_z(int z) const {
  if (z < 0 || z >= depth_) {
    throw std::out_of_range("annotation slice " + std::to_string(z) +
                            " outside depth " + std::to_string(depth_));
  }
}

ComponentId AnnotationSet::add(Component c) {
  check_z(c.z);
  c.id = next_id_++;
  const ComponentId id = c.id;
  slices_[static_cast<std::size_t>(c.z)].push_back(std::move(c));
  return id;
}

void AnnotationSet::insert(Component c) {
  check_z(c.z);
  if (find(c.id) != nullptr) {
    throw FormatError("duplicate component id " + std::to_string(c.id));
  }
  if (c.id < 0) throw FormatError("negative component id");
  next_id_ = std::max(next_id_, c.id + 1);
  slices_[static_cast<std::size_t>(c.z)].push_back(std::move(c));
}

const std::vector<Component>& AnnotationSet::slice(int z) const {
  check_z(z);
  return slices_[static_cast<std::size_t>(z)];
}

std::vector<Component>& AnnotationSet::mutable_slice(int z) {
  check_z(z);
  return slices_[static_cast<std::size_t>(z)];
}

const Component* AnnotationSet::find(ComponentId id) const {
  for (const auto& s : slices_) {
    for (const auto& c : s) {
      if (c.id == id) return &c;
    }
  }
  return nullptr;
}

Component* AnnotationSet::find(ComponentId id) {
  return const_cast<Component*>(std::as_const(*this).find(id));
}

std::size_t AnnotationSet::size() const {
  std::size_t n = 0;
  for (const auto& s : slices_) n += s.size();
  return n;
}

std::size_t AnnotationSet::count(Status status) const {
  std::size_t n = 0;
  for (const auto& s : slices_) {
    n += static_cast<std::size_t>(std::count_if(
        s.begin(), s.end(), [&](const Component& c) { return c.status == status; }));
  }
  return n;
}

// ---------------------------------------------------------------------------
// JSON

std::string annotations_to_json(const AnnotationSet& a,
                                const std::vector<TrackedObject>& tracks) {
  std::map<ComponentId, std::int64_t> track_of;
  for (const auto& t : tracks) {
    for (const auto& [z, id] : t.members) track_of[id] = t.track_id;
  }

  ojson j;
  j["volume"] = {{"width", a.width()}, {"height", a.height()}, {"depth", a.depth()}};
  ojson comps = ojson::array();
  for (int z = 0; z < a.depth(); ++z) {
    for (const Component& c : a.slice(z)) {
      if (c.status == Status::deleted) continue;
      ojson jc;
      jc["id"] = c.id;
      jc["z"] = c.z;
      jc["source"] = to_string(c.source);
      jc["status"] = to_string(c.status);
      if (auto it = track_of.find(c.id); it != track_of.end()) jc["track_id"] = it->second;
      jc["centroid"] = {c.centroid.x, c.centroid.y};
      ojson px = ojson::array();
      for (const Pixel& p : c.pixels) px.push_back({p.x, p.y});
      jc["pixels"] = std::move(px);
      comps.push_back(std::move(jc));
    }
  }
  j["components"] = std::move(comps);

  ojson jt = ojson::array();
  for (const auto& t : tracks) {
    ojson members = ojson::array();
    for (const auto& [z, id] : t.members) members.push_back({z, id});
    jt.push_back({{"track_id", t.track_id}, {"members", std::move(members)}});
  }
  j["tracks"] = std::move(jt);
  return j.dump(1) + "\n";
}

AnnotationFile annotations_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
    const auto& vol = j.at("volume");
    AnnotationFile file{AnnotationSet(vol.at("width").get<int>(), vol.at("height").get<int>(),
                                      vol.at("depth").get<int>()),
                        {}};
    AnnotationSet& a = file.annotations;
    for (const auto& jc : j.at("components")) {
      std::vector<Pixel> pixels;
      for (const auto& p : jc.at("pixels")) {
        const Pixel px{p.at(0).get<int>(), p.at(1).get<int>()};
        if (px.x < 0 || px.y < 0 || px.x >= a.width() || px.y >= a.height()) {
          throw FormatError("component pixel outside volume bounds");
        }
        pixels.push_back(px);
      }
      if (pixels.empty()) throw FormatError("component without pixels");
      Component c = Component::from_pixels(jc.at("z").get<int>(), std::move(pixels),
                                           parse_source(jc.at("source").get<std::string>()),
                                           parse_status(jc.at("status").get<std::string>()));
      c.id = jc.at("id").get<ComponentId>();
      if (c.z < 0 || c.z >= a.depth()) throw FormatError("component z outside volume depth");
      a.insert(std::move(c));
    }
    if (j.contains("tracks")) {
      for (const auto& jt : j.at("tracks")) {
        TrackedObject t;
        t.track_id = jt.at("track_id").get<std::int64_t>();
        for (const auto& m : jt.at("members")) {
          t.members.emplace_back(m.at(0).get<int>(), m.at(1).get<ComponentId>());
        }
        file.tracks.push_back(std::move(t));
      }
    }
    return file;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed annotations: ") + e.what());
  }
}

void write_annotations(const std::filesystem::path& path, const AnnotationSet& a,
                       const std::vector<TrackedObject>& tracks) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << annotations_to_json(a, tracks);
  if (!out) throw IoError("write failed for " + path.string());
}

AnnotationFile read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotations " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return annotations_from_json(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace reticula
