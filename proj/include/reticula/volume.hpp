#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reticula {

/// Physical voxel size in nanometres. Informational only; every algorithm
/// in this library works in pixel and slice units.
struct Resolution {
  double x_nm = 0.0;
  double y_nm = 0.0;
  double z_nm = 0.0;

  bool operator==(const Resolution&) const = default;
};

/// Read-only view of one z plane. Row-major, x fastest.
class SliceView {
 public:
  SliceView(int z, int width, int height, std::span<const std::uint8_t> pixels);

  int z() const { return z_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> pixels() const { return pixels_; }

  /// Bounds-checked access; throws std::out_of_range.
  std::uint8_t at(int x, int y) const;

  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  // Unchecked; callers guarantee contains(x, y).
  std::uint8_t operator()(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }

 private:
  int z_;
  int width_;
  int height_;
  std::span<const std::uint8_t> pixels_;
};

/// An owned single plane, e.g. the output of a per-slice filter.
struct FilteredSlice {
  int z = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  SliceView view() const { return SliceView(z, width, height, pixels); }
  bool operator==(const FilteredSlice&) const = default;
};

/// A z-ordered stack of 8-bit grayscale slices.
///
/// Voxels are stored row-major within a slice (x fastest) and slices are
/// contiguous by z. Dimensions are fixed at construction and must all be
/// at least 1.
class Volume {
 public:
  Volume(int width, int height, int depth, std::uint8_t fill = 0);
  Volume(int width, int height, int depth, std::vector<std::uint8_t> voxels);

  int width() const { return width_; }
  int height() const { return height_; }
  int depth() const { return depth_; }
  std::size_t slice_size() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  const std::optional<Resolution>& resolution() const { return resolution_; }
  void set_resolution(std::optional<Resolution> r) { resolution_ = r; }

  std::span<const std::uint8_t> voxels() const { return voxels_; }

  std::uint8_t at(int x, int y, int z) const;
  void set(int x, int y, int z, std::uint8_t value);

  SliceView slice(int z) const;
  std::span<std::uint8_t> mutable_slice(int z);

  /// Replaces plane z with the given pixels (size must equal slice_size()).
  void assign_slice(int z, std::span<const std::uint8_t> pixels);

  bool same_shape(const Volume& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           depth_ == other.depth_;
  }

  bool operator==(const Volume&) const = default;

 private:
  std::size_t index(int x, int y, int z) const;

  int width_;
  int height_;
  int depth_;
  std::vector<std::uint8_t> voxels_;
  std::optional<Resolution> resolution_;
};

/// Contents of a `stack.json` manifest.
struct StackManifest {
  int width = 0;
  int height = 0;
  int depth = 0;
  std::vector<std::string> slice_files;  // relative to the manifest directory
  std::optional<Resolution> resolution;

  bool operator==(const StackManifest&) const = default;
};

inline constexpr const char* kManifestName = "stack.json";

StackManifest read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const StackManifest& manifest,
                    const std::filesystem::path& manifest_path);

/// Loads every slice listed in the manifest. Throws IoError for missing or
/// unreadable files and FormatError for any inconsistency.
Volume load_stack(const std::filesystem::path& manifest_path);

/// Writes `slice_NNNN.pgm` per z plus `stack.json` into out_dir (created if
/// needed) and returns the manifest that was written.
StackManifest save_stack(const Volume& volume,
                         const std::filesystem::path& out_dir);

// Binary PGM (P5, maxval 255).
struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

PgmImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> pixels);

}  // namespace reticula
