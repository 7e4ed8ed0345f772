#include "ddff/lightfield.hpp"

namespace ddff {

void CameraIntrinsics::validate() const {
  if (!(focal_length_px > 0.0)) throw DomainError("intrinsics: focal_length_px must be positive");
  if (!(baseline_m_per_px > 0.0)) throw DomainError("intrinsics: baseline_m_per_px must be positive");
  if (grid_u < 1 || grid_v < 1) throw DomainError("intrinsics: sub-aperture grid must be at least 1x1");
  if (main_lens) {
    const double derived = main_lens->focal_x / (2.0 * main_lens->radius_m);
    if (std::abs(derived - focal_length_px) > 0.1)
      throw DomainError("intrinsics: focal_length_px disagrees with main lens F_x / (2 r_m)");
  }
}

MainLens lytro_illum_main_lens() {
  MainLens m;
  m.focal_x = 7299.7;
  m.focal_y = 7317.0;
  m.center_x = 3991.6;
  m.center_y = 2629.6;
  m.radius_m = 7.0;
  m.K1 = -2.768;
  m.K2 = 1982.0;
  m.k1 = 0.388;
  m.k2 = -0.0361;
  return m;
}

CameraIntrinsics lytro_illum_intrinsics(int grid) {
  CameraIntrinsics intr;
  intr.focal_length_px = 521.4;
  // K_1 / F' does not reproduce this value numerically; the stated constant is used as is.
  intr.baseline_m_per_px = 27e-5;
  intr.principal_x = 285.11;
  intr.principal_y = 187.83;
  intr.grid_u = grid;
  intr.grid_v = grid;
  intr.center_u = (grid - 1) / 2.0;
  intr.center_v = (grid - 1) / 2.0;
  intr.main_lens = lytro_illum_main_lens();
  return intr;
}

MicrolensIntrinsics microlens_intrinsics(const MainLens& main) {
  if (!(main.radius_m > 0.0)) throw DomainError("microlens_intrinsics: r_m must be positive");
  const double scale = 2.0 * main.radius_m;
  return {main.focal_x / scale, main.center_x / scale, main.center_y / scale};
}

Mask valid_subaperture_mask(int radius, int grid) {
  if (radius < 2) throw DomainError("valid_subaperture_mask: radius must be >= 2");
  if (grid < 1 || grid % 2 == 0) throw DomainError("valid_subaperture_mask: grid must be odd");
  const int half = grid / 2;
  const int limit = (radius - 1) * (radius - 1);
  Mask m(grid, grid);
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b) {
      const int i = a - half, j = b - half;
      m(a, b) = i * i + j * j < limit;
    }
  return m;
}

DepthMap depth_from_disparity(const DisparityMap& d, const CameraIntrinsics& intr) {
  DepthMap z(d.height(), d.width());
  z.mask = d.mask && (d.values > 0.0);
  for (Eigen::Index y = 0; y < d.height(); ++y)
    for (Eigen::Index x = 0; x < d.width(); ++x)
      z.values(y, x) = z.mask(y, x) ? depth_from_disparity(d.values(y, x), intr) : 0.0;
  return z;
}

DisparityMap disparity_from_depth(const DepthMap& z, const CameraIntrinsics& intr) {
  DisparityMap d(z.height(), z.width());
  d.mask = z.mask && (z.values > 0.0);
  for (Eigen::Index y = 0; y < z.height(); ++y)
    for (Eigen::Index x = 0; x < z.width(); ++x)
      d.values(y, x) = d.mask(y, x) ? disparity_from_depth(z.values(y, x), intr) : 0.0;
  return d;
}

}  // namespace ddff
