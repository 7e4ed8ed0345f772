#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ddff/image.hpp"
#include "ddff/lightfield.hpp"

namespace ddff {

/// Band-limited periodic noise: energy between `min_wavelength_px` and `max_wavelength_px`,
/// rescaled to [low, high] per channel. Periodic over the frame so sub-pixel shifts are exact.
struct ProceduralTexture {
  std::uint64_t seed = 0;
  double min_wavelength_px = 2.5;
  double max_wavelength_px = 16.0;
  double low = 0.15;
  double high = 0.85;
};

struct FullFrame {};

struct RectRegion {
  Eigen::Index top = 0, left = 0, height = 0, width = 0;
};

/// Where a plane is opaque in the center view.
using Region = std::variant<FullFrame, RectRegion, Mask>;

struct ScenePlane {
  double depth_m = 1.0;
  std::variant<ProceduralTexture, Image> texture;
  Region region = FullFrame{};
};

struct SceneSpec {
  std::vector<ScenePlane> planes;  // near to far
  CameraIntrinsics intrinsics;
  std::uint64_t seed = 0;
  Eigen::Index height = 96;
  Eigen::Index width = 96;
  std::size_t channels = 3;
  /// Fraction of groundtruth pixels dropped (in 8×8 blocks) to mimic sensor holes.
  double dropout_fraction = 0.0;

  void validate() const;
};

struct RenderedScene {
  LightField lightfield;
  DisparityMap disparity;
};

Mask region_mask(const Region& region, Eigen::Index height, Eigen::Index width);

/// Center-view texture of one plane (frame sized).
Image plane_texture(const ScenePlane& plane, Eigen::Index height, Eigen::Index width, std::size_t channels);

/// Sub-aperture (u, v) shows each plane phase-shifted by −d·(u_c − u, v_c − v); nearer planes are composited
/// over farther ones using their region masks shifted by the rounded view offset.
RenderedScene render_lightfield(const SceneSpec& spec);

struct RandomSceneOptions {
  Eigen::Index height = 96;
  Eigen::Index width = 96;
  std::size_t channels = 3;
  /// When non-empty, plane disparities are drawn (without replacement) from this list instead of the range.
  std::vector<double> disparity_choices;
  double dropout_fraction = 0.0;
  int max_retries = 200;
};

SceneSpec make_random_scene(std::uint64_t seed, int n_planes, std::pair<double, double> depth_range_m,
                            const CameraIntrinsics& intrinsics, const RandomSceneOptions& options = {});

/// Visible plane index per center-view pixel, −1 where nothing is opaque.
Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> visible_plane_index(const SceneSpec& spec);

}  // namespace ddff
