#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ddff/errors.hpp"
#include "ddff/image.hpp"

namespace ddff {

/// Main-lens calibration of the plenoptic camera (pixels), plus the microlens image radius.
struct MainLens {
  double focal_x = 0.0;  // F_x
  double focal_y = 0.0;  // F_y
  double center_x = 0.0; // C_x
  double center_y = 0.0; // C_y
  double radius_m = 0.0; // r_m, microlens image radius in pixels
  // Distortion terms are carried but never applied: inputs are already undistorted sub-apertures.
  double K1 = 0.0, K2 = 0.0, k1 = 0.0, k2 = 0.0;
};

struct CameraIntrinsics {
  double focal_length_px = 0.0;
  double center_u = 0.0;
  double center_v = 0.0;
  double baseline_m_per_px = 0.0;
  double principal_x = 0.0;
  double principal_y = 0.0;
  int grid_u = 1;
  int grid_v = 1;
  std::optional<MainLens> main_lens;

  /// Throws DomainError when an invariant does not hold.
  void validate() const;
};

/// Lytro ILLUM main lens as calibrated for the DDFF 12-Scene capture.
MainLens lytro_illum_main_lens();

/// Microlens intrinsics of the Lytro ILLUM on a `grid`×`grid` sub-aperture grid:
/// f = 521.4 px, baseline 27e-5 m/px, center at ((grid-1)/2, (grid-1)/2).
CameraIntrinsics lytro_illum_intrinsics(int grid = 9);

struct MicrolensIntrinsics {
  double focal_length_px;
  double principal_x;
  double principal_y;
};

/// f = F_x / (2 r_m), c = C / (2 r_m).
MicrolensIntrinsics microlens_intrinsics(const MainLens& main);

/// baseline · f / Z. Z = +inf maps to 0.
template <typename Scalar>
Scalar disparity_from_depth(Scalar depth_m, const CameraIntrinsics& intr) {
  if (!(depth_m > Scalar(0))) throw DomainError("disparity_from_depth: depth must be positive");
  if (std::isinf(depth_m)) return Scalar(0);
  return Scalar(intr.baseline_m_per_px * intr.focal_length_px) / depth_m;
}

template <typename Scalar>
Scalar depth_from_disparity(Scalar disparity_px, const CameraIntrinsics& intr) {
  if (!(disparity_px > Scalar(0)))
    throw DomainError("depth_from_disparity: disparity must be positive (zero maps to infinite depth)");
  return Scalar(intr.baseline_m_per_px * intr.focal_length_px) / disparity_px;
}

/// Sub-aperture validity on a (2·half+1)² grid: offsets (i, j) from the center with i² + j² < (radius − 1)².
Mask valid_subaperture_mask(int radius, int grid = 13);

/// 4D light field. Views are stored u-major: view(u, v) = views[u * grid_v + v].
template <typename Scalar>
struct BasicLightField {
  std::vector<BasicImage<Scalar>> views;
  CameraIntrinsics intrinsics;

  int grid_u() const { return intrinsics.grid_u; }
  int grid_v() const { return intrinsics.grid_v; }
  Eigen::Index height() const { return views.empty() ? 0 : views.front().height(); }
  Eigen::Index width() const { return views.empty() ? 0 : views.front().width(); }
  std::size_t channels() const { return views.empty() ? 0 : views.front().channel_count(); }

  const BasicImage<Scalar>& view(int u, int v) const { return views[static_cast<std::size_t>(u * grid_v() + v)]; }
  BasicImage<Scalar>& view(int u, int v) { return views[static_cast<std::size_t>(u * grid_v() + v)]; }

  void validate() const {
    intrinsics.validate();
    if (views.size() != static_cast<std::size_t>(grid_u() * grid_v()))
      throw DomainError("light field: view count does not match the sub-aperture grid");
    for (const auto& v : views) {
      if (v.height() != height() || v.width() != width() || v.channel_count() != channels() || channels() == 0)
        throw DomainError("light field: inconsistent view shape");
      for (const auto& p : v.channels)
        if (!p.isFinite().all() || (p < Scalar(0)).any() || (p > Scalar(1)).any())
          throw DomainError("light field: samples must be finite and in [0,1]");
    }
  }
};

using LightField = BasicLightField<double>;

template <typename Scalar>
const BasicImage<Scalar>& subaperture(const BasicLightField<Scalar>& lf, int u, int v) {
  if (u < 0 || u >= lf.grid_u() || v < 0 || v >= lf.grid_v())
    throw IndexError("subaperture (" + std::to_string(u) + ", " + std::to_string(v) + ") outside " +
                     std::to_string(lf.grid_u()) + "x" + std::to_string(lf.grid_v()) + " grid");
  return lf.view(u, v);
}

struct DisparityKind {};
struct DepthKind {};

/// Per-pixel measurement with validity mask. Invalid pixels hold 0.
/// Kind distinguishes disparity (pixels) from depth (meters) at the type level.
template <typename Scalar, typename Kind>
struct BasicMap {
  Plane<Scalar> values;
  Mask mask;

  BasicMap() = default;
  BasicMap(Eigen::Index h, Eigen::Index w) : values(Plane<Scalar>::Zero(h, w)), mask(Mask::Constant(h, w, true)) {}
  BasicMap(Plane<Scalar> v, Mask m) : values(std::move(v)), mask(std::move(m)) {
    if (values.rows() != mask.rows() || values.cols() != mask.cols()) throw ShapeError("map/mask shape mismatch");
  }

  /// Dense map, valid where value > 0.
  static BasicMap from_positive(Plane<Scalar> v) {
    Mask m = v > Scalar(0);
    return BasicMap(std::move(v), std::move(m));
  }

  Eigen::Index height() const { return values.rows(); }
  Eigen::Index width() const { return values.cols(); }
  Eigen::Index valid_count() const { return mask.count(); }

  /// Enforce the invalid == 0 convention.
  void zero_invalid() { values = mask.select(values, Scalar(0)); }
};

using DisparityMap = BasicMap<double, DisparityKind>;
using DepthMap = BasicMap<double, DepthKind>;

DepthMap depth_from_disparity(const DisparityMap& d, const CameraIntrinsics& intr);
DisparityMap disparity_from_depth(const DepthMap& z, const CameraIntrinsics& intr);

}  // namespace ddff
