#include "reticula/detect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_map>

#include "reticula/error.hpp"
#include "reticula/parallel.hpp"

namespace reticula {

void GrowParams::validate() const {
  if (dark_threshold < 0 || dark_threshold > 255) {
    throw ValidationError("dark_threshold must be in [0, 255], got " +
                          std::to_string(dark_threshold));
  }
  if (max_diameter < 1) {
    throw ValidationError("max_diameter must be >= 1, got " + std::to_string(max_diameter));
  }
  if (min_area < 1) {
    throw ValidationError("min_area must be >= 1, got " + std::to_string(min_area));
  }
  const double disk = std::numbers::pi * max_diameter * max_diameter / 4.0;
  if (min_area > disk) {
    throw ValidationError("min_area " + std::to_string(min_area) +
                          " exceeds the area of a disk of diameter " +
                          std::to_string(max_diameter));
  }
}

std::optional<std::vector<Pixel>> flood_region(const SliceView& s, Pixel seed,
                                               int threshold, int max_diameter,
                                               std::vector<bool>& visited) {
  const int w = s.width();
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  if (!s.contains(seed.x, seed.y) || visited[idx(seed.x, seed.y)] ||
      s(seed.x, seed.y) >= threshold) {
    return std::nullopt;
  }

  std::vector<Pixel> region;
  std::deque<Pixel> frontier{seed};
  visited[idx(seed.x, seed.y)] = true;
  BoundingBox box{seed.x, seed.y, seed.x, seed.y};
  while (!frontier.empty()) {
    const Pixel p = frontier.front();
    frontier.pop_front();
    region.push_back(p);
    box.x_min = std::min(box.x_min, p.x);
    box.x_max = std::max(box.x_max, p.x);
    box.y_min = std::min(box.y_min, p.y);
    box.y_max = std::max(box.y_max, p.y);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = p.x + dx;
        const int ny = p.y + dy;
        if (!s.contains(nx, ny) || visited[idx(nx, ny)] || s(nx, ny) >= threshold) continue;
        visited[idx(nx, ny)] = true;
        frontier.push_back({nx, ny});
      }
    }
  }
  // Oversize regions are flooded to completion so none of their pixels can
  // seed a fragment later.
  if (box.extent() > max_diameter) return std::nullopt;
  return region;
}

std::vector<Component> grow_regions(const SliceView& s, const GrowParams& p, Source source) {
  p.validate();
  std::vector<bool> visited(s.pixels().size(), false);
  std::vector<Component> out;
  for (int y = 0; y < s.height(); ++y) {
    for (int x = 0; x < s.width(); ++x) {
      auto region = flood_region(s, {x, y}, p.dark_threshold, p.max_diameter, visited);
      if (!region || static_cast<int>(region->size()) < p.min_area) continue;
      Component c = Component::from_pixels(s.z(), std::move(*region), source);
      c.id = static_cast<ComponentId>(out.size());
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::int64_t pixel_key(const Pixel& p) {
  return (static_cast<std::int64_t>(p.y) << 32) | static_cast<std::uint32_t>(p.x);
}

}  // namespace

std::vector<Component> merge_overlapping(std::vector<Component> cs) {
  if (cs.empty()) return cs;
  const int z = cs.front().z;
  for (const auto& c : cs) {
    if (c.z != z) throw ValidationError("merge_overlapping: components span multiple slices");
  }

  DisjointSets sets(cs.size());
  std::unordered_map<std::int64_t, std::size_t> owner;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (const Pixel& p : cs[i].pixels) {
      auto [it, inserted] = owner.emplace(pixel_key(p), i);
      if (!inserted) sets.unite(it->second, i);
    }
  }

  // Roots are the smallest index of their group, so iterating i in order
  // visits each group at its earliest member.
  std::vector<Component> out;
  std::vector<std::size_t> slot(cs.size(), cs.size());
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == cs.size()) {
      slot[root] = members.size();
      members.emplace_back();
    }
    members[slot[root]].push_back(i);
  }
  for (const auto& group : members) {
    if (group.size() == 1) {
      out.push_back(std::move(cs[group.front()]));
      continue;
    }
    std::vector<Pixel> pixels;
    ComponentId id = cs[group.front()].id;
    bool any_bilateral = false;
    bool any_laplacian = false;
    for (std::size_t i : group) {
      pixels.insert(pixels.end(), cs[i].pixels.begin(), cs[i].pixels.end());
      id = std::min(id, cs[i].id);
      any_bilateral |= cs[i].source == Source::bilateral;
      any_laplacian |= cs[i].source == Source::laplacian;
    }
    const Component& first = cs[group.front()];
    const Source source = any_bilateral   ? Source::bilateral
                          : any_laplacian ? Source::laplacian
                                          : first.source;
    Component merged = Component::from_pixels(z, std::move(pixels), source, first.status);
    merged.id = id;
    out.push_back(std::move(merged));
  }
  return out;
}

std::vector<Component> detect_slice(const SliceView& bilateral, const SliceView& sharpened,
                                    const GrowParams& p_bilateral,
                                    const GrowParams& p_laplacian) {
  if (bilateral.width() != sharpened.width() || bilateral.height() != sharpened.height()) {
    throw ValidationError("detect_slice: bilateral and sharpened slices differ in size");
  }
  if (bilateral.z() != sharpened.z()) {
    throw ValidationError("detect_slice: bilateral and sharpened slices differ in z");
  }
  std::vector<Component> all = grow_regions(bilateral, p_bilateral, Source::bilateral);
  std::vector<Component> second = grow_regions(sharpened, p_laplacian, Source::laplacian);
  const auto offset = static_cast<ComponentId>(all.size());
  for (auto& c : second) {
    c.id += offset;
    all.push_back(std::move(c));
  }
  std::vector<Component> merged = merge_overlapping(std::move(all));
  std::sort(merged.begin(), merged.end(), [](const Component& a, const Component& b) {
    return a.pixels.front() < b.pixels.front();
  });
  for (std::size_t i = 0; i < merged.size(); ++i) merged[i].id = static_cast<ComponentId>(i);
  return merged;
}

AnnotationSet detect_volume(const Volume& bilateral, const Volume& sharpened,
                            const GrowParams& p_bilateral, const GrowParams& p_laplacian,
                            int threads) {
  if (!bilateral.same_shape(sharpened)) {
    throw ValidationError("detect_volume: bilateral and sharpened volumes differ in shape");
  }
  p_bilateral.validate();
  p_laplacian.validate();
  std::vector<std::vector<Component>> per_slice(static_cast<std::size_t>(bilateral.depth()));
  parallel_for(bilateral.depth(), threads, [&](int z) {
    per_slice[static_cast<std::size_t>(z)] =
        detect_slice(bilateral.slice(z), sharpened.slice(z), p_bilateral, p_laplacian);
  });

  AnnotationSet set(bilateral.width(), bilateral.height(), bilateral.depth());
  for (auto& slice : per_slice) {
    for (auto& c : slice) set.add(std::move(c));
  }
  return set;
}

}  // namespace reticula
