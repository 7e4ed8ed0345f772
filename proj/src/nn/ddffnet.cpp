#include "ddff/nn/ddffnet.hpp"

#include <algorithm>
#include <cmath>

namespace ddff::nn {

Variant parse_variant(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (n == "UNPOOL") return Variant::Unpool;
  if (n == "BL") return Variant::BL;
  if (n == "UPCONV") return Variant::UpConv;
  if (n == "CC1") return Variant::CC1;
  if (n == "CC2") return Variant::CC2;
  if (n == "CC3") return Variant::CC3;
  throw ParameterError("unknown network variant '" + name + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Unpool: return "UNPOOL";
    case Variant::BL: return "BL";
    case Variant::UpConv: return "UPCONV";
    case Variant::CC1: return "CC1";
    case Variant::CC2: return "CC2";
    case Variant::CC3: return "CC3";
  }
  return "?";
}

void NetworkSpec::validate() const {
  if (stack_size < 1) throw ParameterError("network: stack_size must be >= 1");
  if (input_channels < 1) throw ParameterError("network: input_channels must be >= 1");
  if (!(width_multiplier > 0.0 && width_multiplier <= 1.0) || width_multiplier * 64.0 < 1.0 - 1e-9)
    throw ParameterError("network: width_multiplier must be in (0,1] with width_multiplier*64 >= 1");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw ParameterError("network: dropout_p must be in [0,1)");
}

std::array<int, 5> NetworkSpec::stage_channels() const {
  constexpr std::array<int, 5> base = {64, 128, 256, 512, 512};
  std::array<int, 5> out{};
  for (std::size_t s = 0; s < 5; ++s)
    out[s] = std::max(1, static_cast<int>(std::lround(base[s] * width_multiplier)));
  return out;
}

int NetworkSpec::skip_count() const {
  switch (variant) {
    case Variant::CC1: return 1;
    case Variant::CC2: return 2;
    case Variant::CC3: return 3;
    default: return 0;
  }
}

Tensor DDFFNet::Upsampler::forward(const Tensor& x, const Context& ctx) {
  switch (kind) {
    case Variant::Unpool: return unpool->forward(x, ctx);
    case Variant::BL: return bilinear.forward(x, ctx);
    default: return upconv->forward(x, ctx);
  }
}

Tensor DDFFNet::Upsampler::backward(const Tensor& dy) {
  switch (kind) {
    case Variant::Unpool: return unpool->backward(dy);
    case Variant::BL: return bilinear.backward(dy);
    default: return upconv->backward(dy);
  }
}

DDFFNet::DDFFNet(const NetworkSpec& spec, std::uint64_t seed) : spec_(spec), rng_(seed) {
  spec_.validate();
  const auto ch = spec_.stage_channels();
  const int skips = spec_.skip_count();
  const std::array<int, 5> convs_per_stage = {2, 2, 3, 3, 3};
  const auto p = static_cast<float>(spec_.dropout_p);
  encoder_dropout_ = {Dropout(p), Dropout(p), Dropout(p)};
  decoder_dropout_ = {Dropout(p), Dropout(p)};

  int in = spec_.input_channels;
  for (int s = 0; s < 5; ++s)
    for (int k = 0; k < convs_per_stage[s]; ++k) {
      const std::string name = "conv" + std::to_string(s + 1) + "_" + std::to_string(k + 1);
      encoder_[s].emplace_back(name, in, ch[s]);
      in = ch[s];
    }

  // Decoder stages, deepest first. Stage s upsamples ch[s] channels and ends at ch[s − 1].
  for (int s = 4; s >= 0; --s) {
    Upsampler& up = upsample_[s];
    up.kind = spec_.variant;
    const std::string up_name = "up" + std::to_string(s + 1);
    if (spec_.variant == Variant::Unpool)
      up.unpool = std::make_unique<Unpool2>(&pools_[s]);
    else if (spec_.variant != Variant::BL)
      up.upconv = std::make_unique<ConvTranspose2x>(up_name, ch[s], ch[s]);

    int din = ch[s] + (s < skips ? ch[s] : 0);
    const int n = convs_per_stage[s];
    for (int k = n; k >= 1; --k) {
      if (s == 0 && k == 1) break;  // mirrored conv1_1 is the linear `final_` layer
      const int out = (k == 1) ? ch[s - 1] : ch[s];
      decoder_[s].emplace_back("conv" + std::to_string(s + 1) + "_" + std::to_string(k) + "d", din, out);
      din = out;
    }
  }
  final_ = Conv2d("conv1_1d", ch[0], 1, 3, 1);
  score_ = Conv2d("score", spec_.stack_size, 1, 1, 0);

  for (auto& stage : encoder_)
    for (auto& b : stage) b.conv.init_variance_scaling(rng_);
  for (int s = 4; s >= 0; --s) {
    if (upsample_[s].upconv) upsample_[s].upconv->init_bilinear();
    for (auto& b : decoder_[s]) b.conv.init_variance_scaling(rng_);
  }
  final_.init_variance_scaling(rng_);
  std::fill(score_.weight.value.begin(), score_.weight.value.end(), 1.0f / static_cast<float>(spec_.stack_size));
  std::fill(score_.bias.value.begin(), score_.bias.value.end(), 0.0f);

  norm_.mean.assign(static_cast<std::size_t>(spec_.input_channels), 0.5f);
  norm_.stddev.assign(static_cast<std::size_t>(spec_.input_channels), 0.25f);
}

Tensor DDFFNet::forward(const StackBatch& batch, const Context& ctx) {
  if (batch.slices != spec_.stack_size)
    throw ShapeError("forward: stack has " + std::to_string(batch.slices) + " slices, network expects " +
                     std::to_string(spec_.stack_size));
  if (batch.channels != spec_.input_channels)
    throw ShapeError("forward: input has " + std::to_string(batch.channels) + " channels, network expects " +
                     std::to_string(spec_.input_channels));
  if (batch.height < 32 || batch.width < 32 || batch.batch < 1)
    throw ShapeError("forward: frames must be at least 32x32");
  height_ = batch.height;
  width_ = batch.width;
  padded_h_ = round_up(batch.height, 32);
  padded_w_ = round_up(batch.width, 32);
  Tensor x = reflect_pad(fold_stack(batch), padded_h_, padded_w_);
  Tensor out = forward_folded(x, batch.batch, ctx);
  return crop_top_left(out, height_, width_);
}

Tensor DDFFNet::forward_folded(const Tensor& input, int batch, const Context& ctx) {
  if (input.h() % 32 != 0 || input.w() % 32 != 0) throw ShapeError("forward: spatial dims must be multiples of 32");
  if (input.n() != batch * spec_.stack_size) throw ShapeError("forward: folded batch size mismatch");
  batch_ = batch;
  padded_h_ = input.h();
  padded_w_ = input.w();
  const int skips = spec_.skip_count();

  Tensor h(input.n(), input.c(), input.h(), input.w());
  const std::size_t hw = static_cast<std::size_t>(input.h()) * input.w();
  for (int i = 0; i < input.n(); ++i)
    for (int c = 0; c < input.c(); ++c) {
      const float m = norm_.mean[c], inv = 1.0f / norm_.stddev[c];
      const float* src = input.sample(i) + c * hw;
      float* dst = h.sample(i) + c * hw;
      for (std::size_t k = 0; k < hw; ++k) dst[k] = (src[k] - m) * inv;
    }

  std::array<Tensor, 3> skip;
  for (int s = 0; s < 5; ++s) {
    for (auto& b : encoder_[s]) h = b.forward(h, ctx);
    if (s < skips) {
      skip[s] = h;
      skip_channels_[s] = h.c();
    }
    h = pools_[s].forward(h, ctx);
    if (s >= 2) encoder_dropout_[s - 2].forward_inplace(h, ctx);
  }
  for (int s = 4; s >= 0; --s) {
    if (s == 3 || s == 2) decoder_dropout_[3 - s].forward_inplace(h, ctx);
    h = upsample_[s].forward(h, ctx);
    if (s < skips) {
      h = concat_channels(h, skip[s]);
      skip[s] = Tensor();
    }
    for (auto& b : decoder_[s]) h = b.forward(h, ctx);
  }
  h = final_.forward(h, ctx);
  slice_maps_ = h;
  Tensor stacked = std::move(h).reshaped(batch, spec_.stack_size, padded_h_, padded_w_);
  return score_.forward(stacked, ctx);
}

void DDFFNet::backward(const Tensor& grad_output) {
  Tensor g;
  if (grad_output.h() == padded_h_ && grad_output.w() == padded_w_) {
    g = grad_output;
  } else {
    g = Tensor(grad_output.n(), 1, padded_h_, padded_w_);
    for (int i = 0; i < grad_output.n(); ++i)
      for (int y = 0; y < grad_output.h(); ++y)
        std::copy_n(&grad_output.at(i, 0, y, 0), grad_output.w(), &g.at(i, 0, y, 0));
  }
  const int skips = spec_.skip_count();
  g = score_.backward(g).reshaped(batch_ * spec_.stack_size, 1, padded_h_, padded_w_);
  g = final_.backward(g);

  std::array<Tensor, 3> skip_grad;
  for (int s = 0; s < 5; ++s) {
    for (auto it = decoder_[s].rbegin(); it != decoder_[s].rend(); ++it) g = it->backward(g);
    if (s < skips) {
      Tensor gu;
      split_channels(g, g.c() - skip_channels_[s], gu, skip_grad[s]);
      g = std::move(gu);
    }
    g = upsample_[s].backward(g);
    if (s == 3 || s == 2) decoder_dropout_[3 - s].backward_inplace(g);
  }
  for (int s = 4; s >= 0; --s) {
    if (s >= 2) encoder_dropout_[s - 2].backward_inplace(g);
    g = pools_[s].backward(g);
    if (s < skips) {
      auto& a = g.storage();
      const auto& b = skip_grad[s].storage();
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
    }
    auto& blocks = encoder_[s];
    for (int k = static_cast<int>(blocks.size()) - 1; k >= 0; --k)
      g = blocks[static_cast<std::size_t>(k)].backward(g, !(s == 0 && k == 0));
  }
}

std::vector<Parameter*> DDFFNet::parameters() {
  std::vector<Parameter*> out;
  auto add_block = [&](ConvBlock& b) {
    out.push_back(&b.conv.weight);
    out.push_back(&b.conv.bias);
    out.push_back(&b.bn.gamma);
    out.push_back(&b.bn.beta);
  };
  for (auto& stage : encoder_)
    for (auto& b : stage) add_block(b);
  for (int s = 4; s >= 0; --s) {
    if (upsample_[s].upconv) {
      out.push_back(&upsample_[s].upconv->weight);
      out.push_back(&upsample_[s].upconv->bias);
    }
    for (auto& b : decoder_[s]) add_block(b);
  }
  out.push_back(&final_.weight);
  out.push_back(&final_.bias);
  out.push_back(&score_.weight);
  out.push_back(&score_.bias);
  return out;
}

std::vector<const Parameter*> DDFFNet::parameters() const {
  auto ps = const_cast<DDFFNet*>(this)->parameters();
  return {ps.begin(), ps.end()};
}

std::vector<Buffer*> DDFFNet::buffers() {
  std::vector<Buffer*> out;
  auto add = [&](ConvBlock& b) {
    out.push_back(&b.bn.running_mean);
    out.push_back(&b.bn.running_var);
  };
  for (auto& stage : encoder_)
    for (auto& b : stage) add(b);
  for (int s = 4; s >= 0; --s)
    for (auto& b : decoder_[s]) add(b);
  return out;
}

std::vector<const Buffer*> DDFFNet::buffers() const {
  auto bs = const_cast<DDFFNet*>(this)->buffers();
  return {bs.begin(), bs.end()};
}

std::size_t DDFFNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->size();
  return n;
}

void DDFFNet::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

std::vector<DDFFNet::LayerInfo> DDFFNet::layer_table() const {
  std::vector<LayerInfo> t;
  for (const auto& stage : encoder_)
    for (const auto& b : stage) t.push_back({b.conv.weight.name.substr(0, b.conv.weight.name.find('/')), "conv3x3",
                                             b.conv.in_channels(), b.conv.out_channels()});
  for (int s = 4; s >= 0; --s) {
    const std::string up = "up" + std::to_string(s + 1);
    const int c = spec_.stage_channels()[s];
    switch (spec_.variant) {
      case Variant::Unpool: t.push_back({up, "unpool2x2", c, c}); break;
      case Variant::BL: t.push_back({up, "bilinear2x", c, c}); break;
      default: t.push_back({up, "upconv4x4", c, c}); break;
    }
    for (const auto& b : decoder_[s])
      t.push_back({b.conv.weight.name.substr(0, b.conv.weight.name.find('/')), "conv3x3", b.conv.in_channels(),
                   b.conv.out_channels()});
  }
  t.push_back({"conv1_1d", "conv3x3", final_.in_channels(), final_.out_channels()});
  t.push_back({"score", "conv1x1", score_.in_channels(), score_.out_channels()});
  return t;
}

Tensor predict(DDFFNet& model, const StackBatch& batch) {
  Context ctx;
  ctx.training = false;
  ctx.rng = &model.rng();
  return model.forward(batch, ctx);
}

}  // namespace ddff::nn
