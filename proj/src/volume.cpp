#include "reticula/volume.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "reticula/error.hpp"

namespace reticula {

namespace fs = std::filesystem;
using json = nlohmann::json;

SliceView::SliceView(int z, int width, int height,
                     std::span<const std::uint8_t> pixels)
    : z_(z), width_(width), height_(height), pixels_(pixels) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("slice dimensions must be at least 1x1");
  }
  if (pixels.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("slice pixel count does not match dimensions");
  }
}

std::uint8_t SliceView::at(int x, int y) const {
  if (!contains(x, y)) {
    throw std::out_of_range("slice index (" + std::to_string(x) + ", " +
                            std::to_string(y) + ") out of bounds");
  }
  return (*this)(x, y);
}

namespace {

void check_dims(int width, int height, int depth) {
  if (width < 1 || height < 1 || depth < 1) {
    throw ValidationError("volume dimensions must be at least 1x1x1, got " +
                          std::to_string(width) + "x" + std::to_string(height) +
                          "x" + std::to_string(depth));
  }
}

}  // namespace

Volume::Volume(int width, int height, int depth, std::uint8_t fill)
    : width_(width), height_(height), depth_(depth) {
  check_dims(width, height, depth);
  voxels_.assign(static_cast<std::size_t>(width) * height * depth, fill);
}

Volume::Volume(int width, int height, int depth, std::vector<std::uint8_t> voxels)
    : width_(width), height_(height), depth_(depth), voxels_(std::move(voxels)) {
  check_dims(width, height, depth);
  if (voxels_.size() != static_cast<std::size_t>(width) * height * depth) {
    throw ValidationError("voxel count does not match volume dimensions");
  }
}

std::size_t Volume::index(int x, int y, int z) const {
  if (x < 0 || y < 0 || z < 0 || x >= width_ || y >= height_ || z >= depth_) {
    throw std::out_of_range("voxel index (" + std::to_string(x) + ", " +
                            std::to_string(y) + ", " + std::to_string(z) +
                            ") out of bounds");
  }
  return static_cast<std::size_t>(z) * slice_size() +
         static_cast<std::size_t>(y) * width_ + x;
}

std::uint8_t Volume::at(int x, int y, int z) const { return voxels_[index(x, y, z)]; }

void Volume::set(int x, int y, int z, std::uint8_t value) {
  voxels_[index(x, y, z)] = value;
}

SliceView Volume::slice(int z) const {
  if (z < 0 || z >= depth_) {
    throw std::out_of_range("slice " + std::to_string(z) + " out of bounds");
  }
  return SliceView(z, width_, height_,
                   std::span<const std::uint8_t>(voxels_).subspan(
                       static_cast<std::size_t>(z) * slice_size(), slice_size()));
}

std::span<std::uint8_t> Volume::mutable_slice(int z) {
  if (z < 0 || z >= depth_) {
    throw std::out_of_range("slice " + std::to_string(z) + " out of bounds");
  }
  return std::span<std::uint8_t>(voxels_).subspan(
      static_cast<std::size_t>(z) * slice_size(), slice_size());
}

void Volume::assign_slice(int z, std::span<const std::uint8_t> pixels) {
  auto dst = mutable_slice(z);
  if (pixels.size() != dst.size()) {
    throw std::invalid_argument("slice size mismatch");
  }
  std::copy(pixels.begin(), pixels.end(), dst.begin());
}

// ---------------------------------------------------------------------------
// PGM

namespace {

// Reads one ASCII header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in, const fs::path& path) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (token.empty()) {
    throw FormatError(path.string() + ": truncated PGM header");
  }
  // c is the single whitespace byte terminating the token (or EOF)
  return token;
}

int header_int(std::istream& in, const fs::path& path, const char* what) {
  const std::string token = next_token(in, path);
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || value < 1) {
    throw FormatError(path.string() + ": bad PGM " + what + " '" + token + "'");
  }
  return value;
}

}  // namespace

PgmImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open slice file " + path.string());

  if (next_token(in, path) != "P5") {
    throw FormatError(path.string() + ": not a binary PGM (expected P5 magic)");
  }
  PgmImage img;
  img.width = header_int(in, path, "width");
  img.height = header_int(in, path, "height");
  const int maxval = header_int(in, path, "maxval");
  if (maxval != 255) {
    throw FormatError(path.string() + ": not an 8-bit raster (maxval " +
                      std::to_string(maxval) + ")");
  }
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) {
    throw FormatError(path.string() + ": truncated pixel data");
  }
  return img;
}

void write_pgm(const fs::path& path, int width, int height,
               std::span<const std::uint8_t> pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("PGM pixel count does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Manifest

StackManifest read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open manifest " + manifest_path.string());

  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(manifest_path.string() + ": invalid JSON: " + e.what());
  }

  const auto where = manifest_path.string();
  auto require_int = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
      throw FormatError(where + ": missing or non-integer '" + key + "'");
    }
    return j[key].get<int>();
  };

  StackManifest m;
  m.width = require_int("width");
  m.height = require_int("height");
  m.depth = require_int("depth");
  if (m.width < 1 || m.height < 1) {
    throw FormatError(where + ": width and height must be >= 1");
  }
  if (m.depth < 1) throw FormatError(where + ": depth must be >= 1");

  if (!j.contains("slice_files") || !j["slice_files"].is_array()) {
    throw FormatError(where + ": missing 'slice_files' array");
  }
  std::set<std::string> seen;
  for (const auto& f : j["slice_files"]) {
    if (!f.is_string()) throw FormatError(where + ": slice_files entries must be strings");
    auto name = f.get<std::string>();
    if (!seen.insert(name).second) {
      throw FormatError(where + ": manifest inconsistency: duplicate slice file " + name);
    }
    m.slice_files.push_back(std::move(name));
  }
  if (static_cast<int>(m.slice_files.size()) != m.depth) {
    throw FormatError(where + ": manifest inconsistency: depth " +
                      std::to_string(m.depth) + " but " +
                      std::to_string(m.slice_files.size()) + " slice files");
  }

  if (j.contains("resolution_nm") && !j["resolution_nm"].is_null()) {
    const auto& r = j["resolution_nm"];
    if (!r.is_array() || r.size() != 3 || !r[0].is_number() ||
        !r[1].is_number() || !r[2].is_number()) {
      throw FormatError(where + ": resolution_nm must be [x, y, z]");
    }
    m.resolution = Resolution{r[0].get<double>(), r[1].get<double>(),
                              r[2].get<double>()};
  }
  return m;
}

void write_manifest(const StackManifest& m, const fs::path& manifest_path) {
  json j;
  j["width"] = m.width;
  j["height"] = m.height;
  j["depth"] = m.depth;
  j["slice_files"] = m.slice_files;
  if (m.resolution) {
    j["resolution_nm"] = {m.resolution->x_nm, m.resolution->y_nm, m.resolution->z_nm};
  }
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + manifest_path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + manifest_path.string());
}

Volume load_stack(const fs::path& manifest_path) {
  const StackManifest m = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();

  Volume v(m.width, m.height, m.depth);
  v.set_resolution(m.resolution);
  for (int z = 0; z < m.depth; ++z) {
    const fs::path slice_path = base / m.slice_files[static_cast<std::size_t>(z)];
    if (!fs::exists(slice_path)) {
      throw IoError("missing slice file " + slice_path.string());
    }
    const PgmImage img = read_pgm(slice_path);
    if (img.width != m.width || img.height != m.height) {
      throw FormatError(slice_path.string() + ": dimension mismatch, raster is " +
                        std::to_string(img.width) + "x" + std::to_string(img.height) +
                        ", manifest says " + std::to_string(m.width) + "x" +
                        std::to_string(m.height));
    }
    v.assign_slice(z, img.pixels);
  }
  return v;
}

StackManifest save_stack(const Volume& v, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string());
  }

  StackManifest m;
  m.width = v.width();
  m.height = v.height();
  m.depth = v.depth();
  m.resolution = v.resolution();
  for (int z = 0; z < v.depth(); ++z) {
    std::ostringstream name;
    name << "slice_";
    name.width(4);
    name.fill('0');
    name << z << ".pgm";
    write_pgm(out_dir / name.str(), v.width(), v.height(), v.slice(z).pixels());
    m.slice_files.push_back(name.str());
  }
  write_manifest(m, out_dir / kManifestName);
  return m;
}

}  // namespace reticula
