#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "ddff/errors.hpp"
#include "ddff/fft.hpp"
#include "ddff/image.hpp"
#include "ddff/lightfield.hpp"

namespace ddff {

/// S refocused images with the disparity each is focused at (descending, near to far).
template <typename Scalar>
struct BasicFocalStack {
  std::vector<BasicImage<Scalar>> slices;
  std::vector<double> focus_disparities;
  CameraIntrinsics intrinsics;

  std::size_t size() const { return slices.size(); }
  Eigen::Index height() const { return slices.empty() ? 0 : slices.front().height(); }
  Eigen::Index width() const { return slices.empty() ? 0 : slices.front().width(); }
  std::size_t channels() const { return slices.empty() ? 0 : slices.front().channel_count(); }

  double max_focus_disparity() const {
    double m = 0.0;
    for (double d : focus_disparities) m = std::max(m, d);
    return m;
  }

  void validate() const {
    if (slices.empty()) throw DomainError("focal stack: empty");
    if (slices.size() != focus_disparities.size())
      throw DomainError("focal stack: slice count does not match focus disparity count");
    bool descending = true, ascending = true;
    for (std::size_t k = 1; k < focus_disparities.size(); ++k) {
      descending = descending && focus_disparities[k] < focus_disparities[k - 1];
      ascending = ascending && focus_disparities[k] > focus_disparities[k - 1];
    }
    if (!descending && !ascending) throw DomainError("focal stack: focus disparities must be strictly monotone");
    for (const auto& s : slices) {
      if (s.height() != height() || s.width() != width() || s.channel_count() != channels())
        throw DomainError("focal stack: inconsistent slice shape");
      if (!s.all_finite()) throw DomainError("focal stack: non-finite slice value");
    }
  }
};

using FocalStack = BasicFocalStack<double>;

namespace detail {

/// exp(2πi · shift · ξ) along one axis.
inline Eigen::ArrayXcd shift_phase(Eigen::Index n, double shift) {
  const Eigen::ArrayXd freq = fft_frequencies(n);
  Eigen::ArrayXcd phase(n);
  for (Eigen::Index k = 0; k < n; ++k) phase(k) = std::polar(1.0, 2.0 * std::numbers::pi * shift * freq(k));
  return phase;
}

inline void apply_shift(ComplexPlane& spectrum, double dx, double dy) {
  const Eigen::ArrayXcd px = shift_phase(spectrum.cols(), dx);
  const Eigen::ArrayXcd py = shift_phase(spectrum.rows(), dy);
  for (Eigen::Index y = 0; y < spectrum.rows(); ++y) spectrum.row(y) *= py(y) * px.transpose();
}

}  // namespace detail

/// Subpixel translation by the Fourier shift theorem: out(y, x) = I(y + dy, x + dx) with periodic boundaries,
/// computed as Re F⁻¹{ F{I} · exp(2πi (dx ξx + dy ξy)) }.
template <typename Derived>
Plane<typename Derived::Scalar> phase_shift(const Eigen::ArrayBase<Derived>& image, double dx, double dy) {
  using Scalar = typename Derived::Scalar;
  if (!image.isFinite().all()) throw DomainError("phase_shift: non-finite input");
  if (!std::isfinite(dx) || !std::isfinite(dy)) throw DomainError("phase_shift: non-finite shift");
  ComplexPlane spectrum = fft2(Plane<double>(image.template cast<double>()));
  detail::apply_shift(spectrum, dx, dy);
  return ifft2(spectrum).real().template cast<Scalar>();
}

template <typename Scalar>
BasicImage<Scalar> phase_shift(const BasicImage<Scalar>& image, double dx, double dy) {
  BasicImage<Scalar> out;
  out.channels.reserve(image.channel_count());
  for (const auto& p : image.channels) out.channels.push_back(phase_shift(p, dx, dy));
  return out;
}

/// Holds the spectra of every sub-aperture so that refocusing at many disparities costs one inverse
/// transform per channel and slice. Aggregation is the arithmetic mean over views, summed in (u, v) order.
template <typename Scalar>
class Refocuser {
 public:
  explicit Refocuser(const BasicLightField<Scalar>& lf) : intrinsics_(lf.intrinsics) {
    lf.validate();
    height_ = lf.height();
    width_ = lf.width();
    channels_ = lf.channels();
    spectra_.reserve(lf.views.size() * channels_);
    for (const auto& view : lf.views)
      for (const auto& plane : view.channels) spectra_.push_back(fft2(Plane<double>(plane.template cast<double>())));
  }

  BasicImage<Scalar> refocus(double disparity) const {
    if (!(disparity >= 0.0) || !std::isfinite(disparity))
      throw DomainError("refocus_at_disparity: disparity must be finite and non-negative");
    const int gu = intrinsics_.grid_u, gv = intrinsics_.grid_v;
    std::vector<ComplexPlane> acc(channels_, ComplexPlane::Zero(height_, width_));
    for (int u = 0; u < gu; ++u) {
      const Eigen::ArrayXcd px = detail::shift_phase(width_, disparity * (intrinsics_.center_u - u));
      for (int v = 0; v < gv; ++v) {
        const Eigen::ArrayXcd py = detail::shift_phase(height_, disparity * (intrinsics_.center_v - v));
        for (std::size_t c = 0; c < channels_; ++c) {
          const ComplexPlane& s = spectra_[static_cast<std::size_t>(u * gv + v) * channels_ + c];
          for (Eigen::Index y = 0; y < height_; ++y) acc[c].row(y) += s.row(y) * (py(y) * px.transpose());
        }
      }
    }
    BasicImage<Scalar> out;
    const double n_views = static_cast<double>(gu) * gv;
    for (auto& a : acc) out.channels.push_back((ifft2(a).real() / n_views).template cast<Scalar>());
    return out;
  }

  const CameraIntrinsics& intrinsics() const { return intrinsics_; }

 private:
  CameraIntrinsics intrinsics_;
  Eigen::Index height_ = 0, width_ = 0;
  std::size_t channels_ = 0;
  std::vector<ComplexPlane> spectra_;
};

/// Mean over sub-apertures of phase_shift(I_(u,v), d·(u_c − u), d·(v_c − v)).
template <typename Scalar>
BasicImage<Scalar> refocus_at_disparity(const BasicLightField<Scalar>& lf, double disparity) {
  return Refocuser<Scalar>(lf).refocus(disparity);
}

/// S evenly spaced values from `near` to `far`, endpoints inclusive.
inline std::vector<double> linear_disparities(double near, double far, int count) {
  if (count <= 0) throw DomainError("stack size must be positive");
  if (count == 1) {
    if (near != far) throw DomainError("a single-slice stack needs d_near == d_far");
    return {near};
  }
  if (!(near > far) || far < 0.0) throw DomainError("stack range must satisfy d_near > d_far >= 0");
  std::vector<double> d(static_cast<std::size_t>(count));
  const double step = (near - far) / (count - 1);
  for (int k = 0; k < count; ++k) d[static_cast<std::size_t>(k)] = near - step * k;
  d.back() = far;
  return d;
}

template <typename Scalar>
BasicFocalStack<Scalar> synthesize_stack(const BasicLightField<Scalar>& lf, double d_near, double d_far, int count) {
  BasicFocalStack<Scalar> stack;
  stack.focus_disparities = linear_disparities(d_near, d_far, count);
  stack.intrinsics = lf.intrinsics;
  const Refocuser<Scalar> refocuser(lf);
  stack.slices.reserve(stack.focus_disparities.size());
  for (double d : stack.focus_disparities) stack.slices.push_back(refocuser.refocus(d));
  return stack;
}

}  // namespace ddff
