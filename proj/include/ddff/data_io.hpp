#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddff/image.hpp"
#include "ddff/lightfield.hpp"
#include "ddff/refocus.hpp"

namespace ddff::io {

namespace fs = std::filesystem;

inline constexpr int kDatasetSchemaVersion = 1;

using Plane16 = Eigen::Array<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 8- or 16-bit gray/RGB(A) PNG, scaled to [0,1]; alpha is dropped, palettes are expanded.
Image read_png(const fs::path& path);
/// 8-bit PNG, gray for one channel and RGB for three; values clamped to [0,1] and rounded.
void write_png(const fs::path& path, const Image& image);
Plane16 read_png16(const fs::path& path);
void write_png16(const fs::path& path, const Plane16& plane);

/// Single-channel PFM ("Pf"), little-endian, rows stored bottom to top.
Plane<float> read_pfm(const fs::path& path);
void write_pfm(const fs::path& path, const Plane<float>& plane);

/// Invalid pixels are stored as 0.
void write_disparity(const fs::path& path, const DisparityMap& d);
DisparityMap read_disparity(const fs::path& path);
/// 16-bit PNG holding round(Z · 1000) millimeters; 0 is invalid.
void write_depth_png(const fs::path& path, const DepthMap& z);
DepthMap read_depth_png(const fs::path& path);

enum class Groundtruth { Disparity, Depth };

struct StackEntry {
  std::string name;
  std::vector<std::string> slices;  // relative to the dataset root
  std::vector<double> focus_disparities;
  std::string groundtruth;          // relative path
  Groundtruth groundtruth_kind = Groundtruth::Disparity;
  CameraIntrinsics intrinsics;
  /// Relative directory with view_UU_VV.png sub-apertures, empty when absent.
  std::string lightfield;
};

struct SceneEntry {
  std::string name;
  std::vector<StackEntry> stacks;
};

struct DatasetManifest {
  int schema_version = kDatasetSchemaVersion;
  CameraIntrinsics default_intrinsics;
  std::vector<SceneEntry> scenes;
};

struct StackData {
  FocalStack stack;
  /// Disparity groundtruth, written when `depth` is absent.
  DisparityMap disparity;
  std::optional<DepthMap> depth;
  std::optional<LightField> lightfield;
};

struct SceneData {
  std::string name;
  std::vector<StackData> stacks;
};

/// Writes `<root>/<scene>/stack_<NNNN>/…` and `<root>/manifest.json`.
DatasetManifest save_dataset(const fs::path& root, std::span<const SceneData> scenes,
                             const CameraIntrinsics& default_intrinsics);

/// Manifest plus on-demand file access. Nothing beyond manifest.json is read until requested.
class Dataset {
 public:
  static Dataset open(const fs::path& root);

  const fs::path& root() const { return root_; }
  const DatasetManifest& manifest() const { return manifest_; }
  const StackEntry& entry(std::size_t scene, std::size_t stack) const;

  Image load_slice(std::size_t scene, std::size_t stack, std::size_t slice) const;
  FocalStack load_stack(std::size_t scene, std::size_t stack) const;
  /// Disparity groundtruth; depth files are converted with the stack's intrinsics.
  DisparityMap load_disparity(std::size_t scene, std::size_t stack) const;
  std::optional<DepthMap> load_depth(std::size_t scene, std::size_t stack) const;
  LightField load_lightfield(std::size_t scene, std::size_t stack) const;

  /// Number of data files (images, PFMs) read so far.
  std::size_t files_read() const { return files_read_; }

 private:
  fs::path root_;
  DatasetManifest manifest_;
  mutable std::size_t files_read_ = 0;
};

/// Per-pixel median of the valid (nonzero) samples; invalid only where every frame is.
DepthMap median_fuse(std::span<const DepthMap> frames);

std::string stack_dir_name(std::size_t index);
std::string slice_file_name(std::size_t index);

}  // namespace ddff::io
