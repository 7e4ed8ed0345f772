#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ddff/errors.hpp"

namespace ddff {

/// Single-channel raster, rows = y, cols = x.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Planar multi-channel image. Every channel has the same extent.
template <typename Scalar>
struct BasicImage {
  std::vector<Plane<Scalar>> channels;

  BasicImage() = default;
  BasicImage(Eigen::Index height, Eigen::Index width, std::size_t n_channels, Scalar fill = Scalar(0))
      : channels(n_channels, Plane<Scalar>::Constant(height, width, fill)) {}
  explicit BasicImage(Plane<Scalar> plane) { channels.push_back(std::move(plane)); }

  Eigen::Index height() const { return channels.empty() ? 0 : channels.front().rows(); }
  Eigen::Index width() const { return channels.empty() ? 0 : channels.front().cols(); }
  std::size_t channel_count() const { return channels.size(); }

  Plane<Scalar>& operator[](std::size_t c) { return channels[c]; }
  const Plane<Scalar>& operator[](std::size_t c) const { return channels[c]; }

  bool all_finite() const {
    for (const auto& p : channels)
      if (!p.isFinite().all()) return false;
    return true;
  }

  template <typename Other>
  BasicImage<Other> cast() const {
    BasicImage<Other> out;
    out.channels.reserve(channels.size());
    for (const auto& p : channels) out.channels.push_back(p.template cast<Other>());
    return out;
  }
};

using Image = BasicImage<double>;

/// Rec. 601 luma for 3-channel images; single-channel images pass through.
template <typename Scalar>
Plane<Scalar> luminance(const BasicImage<Scalar>& image) {
  if (image.channel_count() == 1) return image[0];
  if (image.channel_count() != 3)
    throw ShapeError("luminance: expected 1 or 3 channels, got " + std::to_string(image.channel_count()));
  return Scalar(0.299) * image[0] + Scalar(0.587) * image[1] + Scalar(0.114) * image[2];
}

template <typename Scalar>
BasicImage<Scalar> crop(const BasicImage<Scalar>& image, Eigen::Index top, Eigen::Index left, Eigen::Index height,
                        Eigen::Index width) {
  if (top < 0 || left < 0 || top + height > image.height() || left + width > image.width())
    throw IndexError("crop window outside image");
  BasicImage<Scalar> out;
  for (const auto& p : image.channels) out.channels.push_back(p.block(top, left, height, width));
  return out;
}

/// Circular roll: out(y, x) = in((y + dy) mod H, (x + dx) mod W). Integer counterpart of phase_shift.
template <typename Derived>
Plane<typename Derived::Scalar> circular_roll(const Eigen::ArrayBase<Derived>& in, Eigen::Index dx, Eigen::Index dy) {
  const Eigen::Index h = in.rows(), w = in.cols();
  Plane<typename Derived::Scalar> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index sy = ((y + dy) % h + h) % h;
    for (Eigen::Index x = 0; x < w; ++x) out(y, x) = in(sy, ((x + dx) % w + w) % w);
  }
  return out;
}

}  // namespace ddff
