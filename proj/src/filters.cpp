#include "reticula/filters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "reticula/error.hpp"
#include "reticula/parallel.hpp"

namespace reticula {

int BilateralParams::default_radius(double sigma_s) {
  return std::max(1, static_cast<int>(std::ceil(3.0 * sigma_s)));
}

BilateralParams BilateralParams::make(double sigma_s, double sigma_r,
                                      std::optional<int> radius) {
  BilateralParams p{sigma_s, sigma_r,
                    radius ? *radius : default_radius(sigma_s)};
  p.validate();
  return p;
}

void BilateralParams::validate() const {
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) {
    throw ValidationError("sigma_s must be > 0, got " + std::to_string(sigma_s));
  }
  if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
    throw ValidationError("sigma_r must be > 0, got " + std::to_string(sigma_r));
  }
  if (radius < 1) {
    throw ValidationError("radius must be >= 1, got " + std::to_string(radius));
  }
}

namespace {

std::uint8_t round_clamp(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

}  // namespace

FilteredSlice bilateral_filter_slice(const SliceView& src, const BilateralParams& p) {
  p.validate();
  const int w = src.width();
  const int h = src.height();
  const int r = p.radius;
  const int span = 2 * r + 1;

  // Unnormalised Gaussians; their constants cancel against W_p.
  std::vector<double> spatial(static_cast<std::size_t>(span) * span);
  const double inv_2ss = 1.0 / (2.0 * p.sigma_s * p.sigma_s);
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      spatial[static_cast<std::size_t>(dy + r) * span + (dx + r)] =
          std::exp(-static_cast<double>(dx * dx + dy * dy) * inv_2ss);
    }
  }
  std::array<double, 256> range{};
  const double inv_2sr = 1.0 / (2.0 * p.sigma_r * p.sigma_r);
  for (int d = 0; d < 256; ++d) {
    range[static_cast<std::size_t>(d)] = std::exp(-static_cast<double>(d * d) * inv_2sr);
  }

  FilteredSlice out{src.z(), w, h, std::vector<std::uint8_t>(src.pixels().size())};
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - r);
    const int y1 = std::min(h - 1, y + r);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - r);
      const int x1 = std::min(w - 1, x + r);
      const int centre = src(x, y);
      double sum = 0.0;
      double norm = 0.0;
      for (int qy = y0; qy <= y1; ++qy) {
        const std::size_t row = static_cast<std::size_t>(qy - y + r) * span;
        for (int qx = x0; qx <= x1; ++qx) {
          const int value = src(qx, qy);
          const double weight = spatial[row + static_cast<std::size_t>(qx - x + r)] * range[static_cast<std::size_t>(std::abs(centre - value))];
          sum += weight * value;
          norm += weight;
        }
      }
      out.pixels[static_cast<std::size_t>(y) * w + x] = round_clamp(sum / norm);
    }
  }
  return out;
}

FilteredSlice laplacian_sharpen_slice(const SliceView& src) {
  const int w = src.width();
  const int h = src.height();
  FilteredSlice out{src.z(), w, h, std::vector<std::uint8_t>(src.pixels().size())};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int centre = src(x, y);
      int laplacian = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int qy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int qx = std::clamp(x + dx, 0, w - 1);
          laplacian += centre - src(qx, qy);
        }
      }
      out.pixels[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(std::clamp(centre + laplacian, 0, 255));
    }
  }
  return out;
}

FilteredVolumes filter_volume(const Volume& v, const BilateralParams& p,
                              bool with_sharpen, int threads) {
  p.validate();
  FilteredVolumes result{Volume(v.width(), v.height(), v.depth()), std::nullopt};
  result.bilateral.set_resolution(v.resolution());
  if (with_sharpen) {
    result.sharpened.emplace(v.width(), v.height(), v.depth());
    result.sharpened->set_resolution(v.resolution());
  }
  // Each task writes only its own z plane.
  parallel_for(v.depth(), threads, [&](int z) {
    const FilteredSlice smoothed = bilateral_filter_slice(v.slice(z), p);
    result.bilateral.assign_slice(z, smoothed.pixels);
    if (with_sharpen) {
      result.sharpened->assign_slice(z, laplacian_sharpen_slice(smoothed.view()).pixels);
    }
  });
  return result;
}

}  // namespace reticula
