#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddff/errors.hpp"
#include "ddff/image.hpp"
#include "ddff/lightfield.hpp"

namespace ddff {

inline constexpr double kDefaultBadpixTau = 0.07;

struct MetricsReport {
  double mse = 0.0;
  double rms = 0.0;
  double log_rms = 0.0;
  double abs_rel = 0.0;
  double sqr_rel = 0.0;
  double accuracy_d1 = 0.0;  // percent
  double accuracy_d2 = 0.0;
  double accuracy_d3 = 0.0;
  std::map<double, double> badpix;  // τ → percent
  double bumpiness = 0.0;
  std::int64_t valid_pixel_count = 0;
  /// Valid pixels with non-positive prediction or groundtruth, left out of the ratio and log metrics.
  std::int64_t clamped_pixel_count = 0;
  bool empty = true;

  /// Flat `key=value` lines; badpix entries are keyed `badpix@<tau>`.
  std::string to_text() const;
  static MetricsReport from_text(const std::string& text);
};

bool operator==(const MetricsReport& a, const MetricsReport& b);

/// Per-metric mean over non-empty reports.
MetricsReport aggregate(std::span<const MetricsReport> reports);

namespace detail {

/// ‖H_Δ‖_F per pixel with central differences on a replicate-padded grid.
template <typename Scalar>
Plane<double> hessian_frobenius(const Plane<Scalar>& delta) {
  const Eigen::Index h = delta.rows(), w = delta.cols();
  auto at = [&](Eigen::Index y, Eigen::Index x) {
    return static_cast<double>(delta(std::clamp<Eigen::Index>(y, 0, h - 1), std::clamp<Eigen::Index>(x, 0, w - 1)));
  };
  Plane<double> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      const double c = at(y, x);
      const double dxx = at(y, x + 1) - 2.0 * c + at(y, x - 1);
      const double dyy = at(y + 1, x) - 2.0 * c + at(y - 1, x);
      const double dxy = 0.25 * (at(y + 1, x + 1) - at(y + 1, x - 1) - at(y - 1, x + 1) + at(y - 1, x - 1));
      out(y, x) = std::sqrt(dxx * dxx + 2.0 * dxy * dxy + dyy * dyy);
    }
  return out;
}

template <typename Scalar, typename Kind>
Mask evaluation_mask(const BasicMap<Scalar, Kind>& pred, const BasicMap<Scalar, Kind>& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width())
    throw ShapeError("metrics: prediction and groundtruth shapes differ");
  return gt.mask && pred.values.isFinite() && gt.values.isFinite();
}

}  // namespace detail

/// Mean over valid pixels of min(0.05, ‖H_Δ‖_F) · 100 with Δ = pred − gt.
template <typename Scalar, typename Kind>
double bumpiness(const BasicMap<Scalar, Kind>& pred, const BasicMap<Scalar, Kind>& gt) {
  const Mask m = detail::evaluation_mask(pred, gt);
  const Plane<Scalar> delta = pred.values - gt.values;
  const Plane<double> hf = detail::hessian_frobenius(delta);
  double sum = 0.0;
  std::int64_t n = 0;
  for (Eigen::Index y = 0; y < m.rows(); ++y)
    for (Eigen::Index x = 0; x < m.cols(); ++x)
      if (m(y, x)) {
        sum += std::min(0.05, hf(y, x)) * 100.0;
        ++n;
      }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

/// The eight error measures over the groundtruth-valid pixels. The evaluation mask is gt.mask only:
/// predictions are treated as dense. Ratio and log measures additionally require pred > 0 and gt > 0.
template <typename Scalar, typename Kind>
MetricsReport compute_metrics(const BasicMap<Scalar, Kind>& pred, const BasicMap<Scalar, Kind>& gt,
                              std::span<const double> taus = std::span<const double>(&kDefaultBadpixTau, 1)) {
  const Mask m = detail::evaluation_mask(pred, gt);
  MetricsReport r;
  for (double tau : taus) r.badpix[tau] = 0.0;

  double sq = 0.0, log_sq = 0.0, abs_rel = 0.0, sqr_rel = 0.0;
  std::int64_t n = 0, n_ratio = 0, acc[3] = {0, 0, 0};
  std::vector<std::int64_t> bad(taus.size(), 0);
  for (Eigen::Index y = 0; y < m.rows(); ++y)
    for (Eigen::Index x = 0; x < m.cols(); ++x) {
      if (!m(y, x)) continue;
      const double p = pred.values(y, x), g = gt.values(y, x);
      const double d = p - g;
      ++n;
      sq += d * d;
      for (std::size_t t = 0; t < taus.size(); ++t)
        if (std::abs(d) > taus[t]) ++bad[t];
      if (p > 0.0 && g > 0.0) {
        ++n_ratio;
        const double ld = std::log(p) - std::log(g);
        log_sq += ld * ld;
        abs_rel += std::abs(d) / g;
        sqr_rel += d * d / g;
        const double delta = std::max(p / g, g / p);
        double thr = 1.25;
        for (auto& a : acc) {
          if (delta < thr) ++a;
          thr *= 1.25;
        }
      } else {
        ++r.clamped_pixel_count;
      }
    }
  r.valid_pixel_count = n;
  r.empty = n == 0;
  if (r.empty) return r;
  const double nn = static_cast<double>(n);
  r.mse = sq / nn;
  r.rms = std::sqrt(r.mse);
  for (std::size_t t = 0; t < taus.size(); ++t) r.badpix[taus[t]] = 100.0 * static_cast<double>(bad[t]) / nn;
  if (n_ratio > 0) {
    const double nr = static_cast<double>(n_ratio);
    r.log_rms = std::sqrt(log_sq / nr);
    r.abs_rel = abs_rel / nr;
    r.sqr_rel = sqr_rel / nr;
    r.accuracy_d1 = 100.0 * static_cast<double>(acc[0]) / nr;
    r.accuracy_d2 = 100.0 * static_cast<double>(acc[1]) / nr;
    r.accuracy_d3 = 100.0 * static_cast<double>(acc[2]) / nr;
  }
  r.bumpiness = bumpiness(pred, gt);
  return r;
}

/// BadPix(τ) over a strictly increasing grid of positive thresholds.
template <typename Scalar, typename Kind>
std::vector<std::pair<double, double>> badpix_curve(const BasicMap<Scalar, Kind>& pred, const BasicMap<Scalar, Kind>& gt,
                                                    std::span<const double> tau_grid) {
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    if (!(tau_grid[k] > 0.0)) throw ParameterError("badpix_curve: thresholds must be positive");
    if (k > 0 && !(tau_grid[k] > tau_grid[k - 1])) throw ParameterError("badpix_curve: thresholds must increase");
  }
  const Mask m = detail::evaluation_mask(pred, gt);
  std::vector<double> err;
  for (Eigen::Index y = 0; y < m.rows(); ++y)
    for (Eigen::Index x = 0; x < m.cols(); ++x)
      if (m(y, x)) err.push_back(std::abs(static_cast<double>(pred.values(y, x) - gt.values(y, x))));
  std::vector<std::pair<double, double>> curve;
  for (double tau : tau_grid) {
    std::int64_t bad = 0;
    for (double e : err) bad += e > tau;
    curve.emplace_back(tau, err.empty() ? 0.0 : 100.0 * static_cast<double>(bad) / static_cast<double>(err.size()));
  }
  return curve;
}

/// Closed-form least-squares scale k* = Σ pred·gt / Σ pred² over jointly valid pixels.
template <typename Scalar>
std::pair<double, BasicMap<Scalar, DepthKind>> lytro_rescale(const BasicMap<Scalar, DepthKind>& pred,
                                                              const BasicMap<Scalar, DepthKind>& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) throw ShapeError("lytro_rescale: shape mismatch");
  const Mask joint = pred.mask && gt.mask;
  double num = 0.0, den = 0.0;
  for (Eigen::Index y = 0; y < joint.rows(); ++y)
    for (Eigen::Index x = 0; x < joint.cols(); ++x)
      if (joint(y, x)) {
        const double p = pred.values(y, x);
        num += p * static_cast<double>(gt.values(y, x));
        den += p * p;
      }
  if (!(den > 0.0)) throw DegenerateError("lytro_rescale: prediction is zero on every jointly valid pixel");
  const double k = num / den;
  BasicMap<Scalar, DepthKind> out(Plane<Scalar>(pred.values * Scalar(k)), pred.mask);
  return {k, std::move(out)};
}

/// Σ_p (k·pred_p − gt_p)² over jointly valid pixels.
template <typename Scalar>
double rescale_objective(double k, const BasicMap<Scalar, DepthKind>& pred, const BasicMap<Scalar, DepthKind>& gt) {
  const Mask joint = pred.mask && gt.mask;
  double s = 0.0;
  for (Eigen::Index y = 0; y < joint.rows(); ++y)
    for (Eigen::Index x = 0; x < joint.cols(); ++x)
      if (joint(y, x)) {
        const double e = k * static_cast<double>(pred.values(y, x)) - static_cast<double>(gt.values(y, x));
        s += e * e;
      }
  return s;
}

}  // namespace ddff
