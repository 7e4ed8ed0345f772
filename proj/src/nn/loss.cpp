#include "ddff/nn/loss.hpp"

#include "ddff/nn/ddffnet.hpp"

namespace ddff::nn {

LossResult<float> masked_l2_loss(const Tensor& pred, const Tensor& target, std::span<const std::uint8_t> mask,
                                 const DDFFNet& model, float lambda) {
  if (!pred.same_shape(target)) throw ShapeError("masked_l2_loss: " + pred.shape_string() + " vs " + target.shape_string());
  std::vector<std::span<const float>> weights;
  for (const auto* p : model.parameters())
    if (p->decay) weights.emplace_back(p->value);
  return masked_l2_loss<float>(pred.storage(), target.storage(), mask, weights, lambda);
}

void add_weight_decay_grad(DDFFNet& model, float lambda) {
  if (lambda == 0.0f) return;
  for (auto* p : model.parameters())
    if (p->decay)
      for (std::size_t i = 0; i < p->size(); ++i) p->grad[i] += 2.0f * lambda * p->value[i];
}

}  // namespace ddff::nn
