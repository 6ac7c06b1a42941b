#pragma once

#include <optional>

#include "reticula/volume.hpp"

namespace reticula {

/// Parameters of the edge-preserving bilateral filter.
///
/// sigma_s is the spatial Gaussian width in pixels, sigma_r the range
/// Gaussian width in intensity levels, and radius the half-width of the
/// square neighbourhood (clipped at image borders).
struct BilateralParams {
  double sigma_s = 2.0;
  double sigma_r = 25.0;
  int radius = 6;

  /// Builds params with radius = ceil(3 * sigma_s) unless one is given.
  static BilateralParams make(double sigma_s, double sigma_r,
                              std::optional<int> radius = std::nullopt);
  static int default_radius(double sigma_s);

  /// Throws ValidationError on non-positive sigmas or radius < 1.
  void validate() const;

  bool operator==(const BilateralParams&) const = default;
};

/// Exact direct-sum bilateral filter of one slice. Each output pixel is the
/// range- and space-weighted mean of its window, rounded half away from
/// zero and clamped to [0, 255].
FilteredSlice bilateral_filter_slice(const SliceView& src, const BilateralParams& p);

/// Sharpens by adding the 8-neighbour Laplacian (centre +8, neighbours -1,
/// replicated border) to the input, clamped to [0, 255].
FilteredSlice laplacian_sharpen_slice(const SliceView& src);

struct FilteredVolumes {
  Volume bilateral;
  std::optional<Volume> sharpened;  // set iff sharpening was requested
};

/// Bilateral-filters every slice independently; when with_sharpen is set
/// the Laplacian sharpening is applied to the bilateral output.
FilteredVolumes filter_volume(const Volume& v, const BilateralParams& p,
                              bool with_sharpen, int threads = 1);

}  // namespace reticula
