#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ddff/errors.hpp"
#include "ddff/image.hpp"
#include "ddff/lightfield.hpp"
#include "ddff/refocus.hpp"

namespace ddff {

enum class FocusMeasure { ModifiedLaplacian, LaplacianVariance, Tenengrad };

FocusMeasure parse_focus_measure(const std::string& name);
std::string to_string(FocusMeasure m);

template <typename Scalar>
struct BasicSharpnessVolume {
  std::vector<Plane<Scalar>> values;
  std::vector<double> focus_disparities;
};

namespace detail {

template <typename Scalar>
Scalar clamped(const Plane<Scalar>& p, Eigen::Index y, Eigen::Index x) {
  return p(std::clamp<Eigen::Index>(y, 0, p.rows() - 1), std::clamp<Eigen::Index>(x, 0, p.cols() - 1));
}

/// Separable box mean with replicate padding.
template <typename Scalar>
Plane<Scalar> box_mean(const Plane<Scalar>& p, int window) {
  if (window == 1) return p;
  const int r = window / 2;
  const Eigen::Index h = p.rows(), w = p.cols();
  Plane<Scalar> horiz(h, w), out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      Scalar s = 0;
      for (int k = -r; k <= r; ++k) s += clamped(p, y, x + k);
      horiz(y, x) = s / Scalar(window);
    }
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      Scalar s = 0;
      for (int k = -r; k <= r; ++k) s += clamped(horiz, y + k, x);
      out(y, x) = s / Scalar(window);
    }
  return out;
}

}  // namespace detail

/// Per-pixel focus measure of the luminance, box-averaged over `window`×`window` (replicate borders).
///
///   ModifiedLaplacian:  |2I(x,y) − I(x−1,y) − I(x+1,y)| + |2I(x,y) − I(x,y−1) − I(x,y+1)|
///   LaplacianVariance:  local variance of L = I(x−1,y) + I(x+1,y) + I(x,y−1) + I(x,y+1) − 4I(x,y)
///   Tenengrad:          Gx² + Gy² with the 3×3 Sobel kernels [−1 0 1; −2 0 2; −1 0 1] and its transpose
template <typename Scalar>
Plane<Scalar> sharpness_map(const BasicImage<Scalar>& image, FocusMeasure measure, int window) {
  if (window < 1 || window % 2 == 0) throw ParameterError("sharpness_map: window must be a positive odd integer");
  const Plane<Scalar> lum = luminance(image);
  const Eigen::Index h = lum.rows(), w = lum.cols();
  using detail::clamped;
  Plane<Scalar> raw(h, w);
  switch (measure) {
    case FocusMeasure::ModifiedLaplacian:
      for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x) {
          const Scalar c = 2 * lum(y, x);
          raw(y, x) = std::abs(c - clamped(lum, y, x - 1) - clamped(lum, y, x + 1)) +
                      std::abs(c - clamped(lum, y - 1, x) - clamped(lum, y + 1, x));
        }
      return detail::box_mean(raw, window);
    case FocusMeasure::LaplacianVariance: {
      for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x)
          raw(y, x) = clamped(lum, y, x - 1) + clamped(lum, y, x + 1) + clamped(lum, y - 1, x) +
                      clamped(lum, y + 1, x) - 4 * lum(y, x);
      const Plane<Scalar> mean = detail::box_mean(raw, window);
      const Plane<Scalar> mean_sq = detail::box_mean(Plane<Scalar>(raw.square()), window);
      return (mean_sq - mean.square()).max(Scalar(0));
    }
    case FocusMeasure::Tenengrad:
      for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x) {
          auto at = [&](int dy, int dx) { return clamped(lum, y + dy, x + dx); };
          const Scalar gx = at(-1, 1) + 2 * at(0, 1) + at(1, 1) - at(-1, -1) - 2 * at(0, -1) - at(1, -1);
          const Scalar gy = at(1, -1) + 2 * at(1, 0) + at(1, 1) - at(-1, -1) - 2 * at(-1, 0) - at(-1, 1);
          raw(y, x) = gx * gx + gy * gy;
        }
      return detail::box_mean(raw, window);
  }
  throw ParameterError("sharpness_map: unknown measure");
}

template <typename Scalar>
BasicSharpnessVolume<Scalar> sharpness_volume(const BasicFocalStack<Scalar>& stack, FocusMeasure measure, int window) {
  BasicSharpnessVolume<Scalar> vol;
  vol.focus_disparities = stack.focus_disparities;
  vol.values.reserve(stack.size());
  for (const auto& s : stack.slices) vol.values.push_back(sharpness_map(s, measure, window));
  return vol;
}

/// Stack index of maximal sharpness per pixel; −1 where the peak is below `floor` × (volume maximum).
/// Ties go to the larger (nearer) focus disparity.
template <typename Scalar>
Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> argmax_index(
    const BasicSharpnessVolume<Scalar>& vol, double floor = 1e-6) {
  const std::size_t n = vol.values.size();
  const Eigen::Index h = vol.values.front().rows(), w = vol.values.front().cols();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return vol.focus_disparities[a] > vol.focus_disparities[b]; });
  Scalar global = 0;
  for (const auto& v : vol.values) global = std::max(global, v.maxCoeff());
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> idx(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      std::size_t best = order.front();
      Scalar best_val = vol.values[best](y, x);
      for (std::size_t k : order)
        if (vol.values[k](y, x) > best_val) {
          best = k;
          best_val = vol.values[k](y, x);
        }
      const bool textured = global > Scalar(0) && static_cast<double>(best_val / global) >= floor;
      idx(y, x) = textured ? static_cast<int>(best) : -1;
    }
  return idx;
}

template <typename Scalar>
DisparityMap argmax_disparity(const BasicFocalStack<Scalar>& stack,
                              FocusMeasure measure = FocusMeasure::ModifiedLaplacian, int window = 9,
                              double floor = 1e-6) {
  if (stack.size() < 2) throw ParameterError("argmax_disparity: stack needs at least two slices");
  stack.validate();
  const auto idx = argmax_index(sharpness_volume(stack, measure, window), floor);
  DisparityMap out(idx.rows(), idx.cols());
  out.mask = idx >= 0;
  for (Eigen::Index y = 0; y < idx.rows(); ++y)
    for (Eigen::Index x = 0; x < idx.cols(); ++x)
      out.values(y, x) = idx(y, x) >= 0 ? stack.focus_disparities[static_cast<std::size_t>(idx(y, x))] : 0.0;
  return out;
}

}  // namespace ddff
