#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace reticula {

struct Pixel {
  int x = 0;
  int y = 0;

  // Row-major order: y first, then x.
  friend auto operator<=>(const Pixel& a, const Pixel& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct Centroid {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Centroid&) const = default;
};

double distance(const Centroid& a, const Centroid& b);

struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  int extent() const { return width() > height() ? width() : height(); }
  bool operator==(const BoundingBox&) const = default;
};

/// Which pass produced a component. `truth` marks generated ground truth.
enum class Source { bilateral, laplacian, rescue, truth };
enum class Status { provisional, confirmed, deleted };

std::string_view to_string(Source s);
std::string_view to_string(Status s);
Source parse_source(std::string_view s);
Status parse_status(std::string_view s);

using ComponentId = std::int64_t;

/// One annotated cross-section on one slice.
struct Component {
  ComponentId id = 0;
  int z = 0;
  std::vector<Pixel> pixels;  // sorted row-major, no duplicates
  Centroid centroid;
  BoundingBox bbox;
  Source source = Source::bilateral;
  Status status = Status::provisional;

  /// Sorts and deduplicates the pixels, then derives centroid and bbox.
  /// Throws std::invalid_argument when pixels is empty.
  static Component from_pixels(int z, std::vector<Pixel> pixels, Source source,
                               Status status = Status::provisional);

  std::size_t area() const { return pixels.size(); }
  bool overlaps(const Component& other) const;

  bool operator==(const Component&) const = default;
};

/// A chain of confirmed components on consecutive slices.
struct TrackedObject {
  std::int64_t track_id = 0;
  std::vector<std::pair<int, ComponentId>> members;  // (z, component id)

  bool operator==(const TrackedObject&) const = default;
};

/// Components of one volume indexed by slice, with volume-unique ids.
class AnnotationSet {
 public:
  AnnotationSet(int width, int height, int depth);

  int width() const { return width_; }
  int height() const { return height_; }
  int depth() const { return depth_; }

  /// Assigns the next free id and stores the component under its z.
  ComponentId add(Component c);
  /// Stores the component keeping its id; throws if the id is taken.
  void insert(Component c);

  const std::vector<Component>& slice(int z) const;
  std::vector<Component>& mutable_slice(int z);

  const Component* find(ComponentId id) const;
  Component* find(ComponentId id);

  std::size_t size() const;
  std::size_t count(Status status) const;
  ComponentId next_id() const { return next_id_; }

  bool same_shape(const AnnotationSet& o) const {
    return width_ == o.width_ && height_ == o.height_ && depth_ == o.depth_;
  }

  bool operator==(const AnnotationSet&) const = default;

 private:
  void check_z(int z) const;

  int width_;
  int height_;
  int depth_;
  std::vector<std::vector<Component>> slices_;
  ComponentId next_id_ = 0;
};

/// In-memory form of `annotations.json`.
struct AnnotationFile {
  AnnotationSet annotations;
  std::vector<TrackedObject> tracks;
};

/// Serializes to the annotations schema. Deleted components are omitted.
std::string annotations_to_json(const AnnotationSet& a,
                                const std::vector<TrackedObject>& tracks);
AnnotationFile annotations_from_json(std::string_view text);

void write_annotations(const std::filesystem::path& path, const AnnotationSet& a,
                       const std::vector<TrackedObject>& tracks);
AnnotationFile read_annotations(const std::filesystem::path& path);

}  // namespace reticula
