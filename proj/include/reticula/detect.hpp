#pragma once

#include <optional>
#include <vector>

#include "reticula/annotations.hpp"
#include "reticula/volume.hpp"

namespace reticula {

/// Region-growing parameters. A pixel is dark when its value is strictly
/// below dark_threshold; a region is rejected when its bounding box is wider
/// or taller than max_diameter, and dropped when smaller than min_area.
struct GrowParams {
  int dark_threshold = 90;
  int max_diameter = 10;
  int min_area = 2;

  void validate() const;
  bool operator==(const GrowParams&) const = default;
};

/// Floods the 8-connected set of pixels below `threshold` containing `seed`.
/// Every flooded pixel is marked in `visited` (size width*height), including
/// those of a region that ends up rejected. Returns nullopt when the seed is
/// not dark, already visited, or the region's extent exceeds max_diameter.
std::optional<std::vector<Pixel>> flood_region(const SliceView& s, Pixel seed,
                                               int threshold, int max_diameter,
                                               std::vector<bool>& visited);

/// Morphological region growing over one slice, seeding in row-major order.
/// Components carry slice-local ids 0..n-1, the given source tag and
/// status provisional.
std::vector<Component> grow_regions(const SliceView& s, const GrowParams& p,
                                    Source source = Source::bilateral);

/// Transitively merges components whose pixel sets intersect. Groups keep the
/// position and the smallest id of their earliest member; a merged group is
/// tagged bilateral if any member is. Throws ValidationError on mixed z.
std::vector<Component> merge_overlapping(std::vector<Component> cs);

/// Dual-pass detection on one slice: grow on the bilateral plane, grow on the
/// sharpened plane, merge. Result is ordered by first pixel (row-major) with
/// ids 0..n-1.
std::vector<Component> detect_slice(const SliceView& bilateral, const SliceView& sharpened,
                                    const GrowParams& p_bilateral,
                                    const GrowParams& p_laplacian);

/// detect_slice on every z; ids are assigned in z order, then slice order.
AnnotationSet detect_volume(const Volume& bilateral, const Volume& sharpened,
                            const GrowParams& p_bilateral, const GrowParams& p_laplacian,
                            int threads = 1);

}  // namespace reticula
