#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ddff/errors.hpp"
#include "ddff/nn/tensor.hpp"

namespace ddff::nn {

class DDFFNet;

template <typename Scalar>
struct LossResult {
  Scalar value = 0;
  Scalar data_term = 0;
  Scalar regularizer = 0;
  std::size_t valid_pixels = 0;
  /// True when the batch held no valid pixel and the loss is the regularizer alone.
  bool no_valid_pixels = false;
  /// d(loss)/d(pred); exactly zero at masked entries.
  std::vector<Scalar> grad;
};

/// Mean over valid pixels of (pred − target)² plus λ · Σ‖W‖² over `weights`.
template <typename Scalar>
LossResult<Scalar> masked_l2_loss(std::span<const Scalar> pred, std::span<const Scalar> target,
                                  std::span<const std::uint8_t> mask,
                                  std::span<const std::span<const Scalar>> weights, Scalar lambda) {
  if (pred.size() != target.size() || pred.size() != mask.size())
    throw ShapeError("masked_l2_loss: prediction, target and mask sizes differ");
  LossResult<Scalar> r;
  r.grad.assign(pred.size(), Scalar(0));
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (mask[i]) {
      const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
      sum += d * d;
      ++r.valid_pixels;
    }
  if (r.valid_pixels > 0) {
    const double inv = 1.0 / static_cast<double>(r.valid_pixels);
    r.data_term = static_cast<Scalar>(sum * inv);
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (mask[i])
        r.grad[i] = static_cast<Scalar>(2.0 * (static_cast<double>(pred[i]) - static_cast<double>(target[i])) * inv);
  } else {
    r.no_valid_pixels = true;
  }
  double reg = 0.0;
  for (const auto& w : weights)
    for (Scalar v : w) reg += static_cast<double>(v) * static_cast<double>(v);
  r.regularizer = static_cast<Scalar>(static_cast<double>(lambda) * reg);
  r.value = r.data_term + r.regularizer;
  return r;
}

/// Loss of a (B, 1, H, W) prediction against its target with the model's decayed weights as regularizer.
LossResult<float> masked_l2_loss(const Tensor& pred, const Tensor& target, std::span<const std::uint8_t> mask,
                                 const DDFFNet& model, float lambda);

/// Adds 2λW to the gradients of every decayed parameter.
void add_weight_decay_grad(DDFFNet& model, float lambda);

}  // namespace ddff::nn
