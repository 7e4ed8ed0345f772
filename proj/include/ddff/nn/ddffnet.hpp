#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ddff/nn/layers.hpp"
#include "ddff/nn/tensor.hpp"

namespace ddff::nn {

/// Decoder upsampling and skip configuration.
enum class Variant { Unpool, BL, UpConv, CC1, CC2, CC3 };

Variant parse_variant(const std::string& name);
std::string to_string(Variant v);

struct NetworkSpec {
  Variant variant = Variant::CC3;
  int stack_size = 10;
  int input_channels = 3;
  double width_multiplier = 1.0;
  double dropout_p = 0.5;

  void validate() const;
  /// VGG-16 channel widths {64, 128, 256, 512, 512} scaled by the width multiplier (at least 1).
  std::array<int, 5> stage_channels() const;
  /// Number of encoder skip features concatenated in the decoder (0 for Unpool/BL/UpConv).
  int skip_count() const;
};

/// Per-channel input normalization applied before the first convolution.
struct InputNormalization {
  std::vector<float> mean;
  std::vector<float> stddev;
};

/// Encoder: VGG-16's 13 convolutions in 5 stages (2, 2, 3, 3, 3), each followed by 2×2 max pooling;
/// dropout after pools 3–5. Decoder: mirror image, each stage opened by an upsampling step and, for
/// CC variants, a concatenation with conv1_2 / conv2_2 / conv3_3; dropout before the upsampling of
/// stages 4 and 3 (the one after pool 5 already precedes stage 5's upsampling). The mirrored conv1_1
/// emits one linear feature map per slice; a 1×1 `score` convolution across the S slices regresses disparity.
class DDFFNet {
 public:
  explicit DDFFNet(const NetworkSpec& spec, std::uint64_t seed = 0);
  DDFFNet(const DDFFNet&) = delete;
  DDFFNet& operator=(const DDFFNet&) = delete;

  const NetworkSpec& spec() const { return spec_; }

  /// (B, S, H, W, C) stack batch → (B, 1, H, W) disparity. Any H, W ≥ 32: reflect-padded to a multiple of 32
  /// and cropped back. In training mode intermediate activations are cached for `backward`.
  Tensor forward(const StackBatch& batch, const Context& ctx);
  /// Folded input (B·S, C, H, W) with H and W multiples of 32.
  Tensor forward_folded(const Tensor& x, int batch, const Context& ctx);

  /// Per-slice trunk output (B·S, 1, H, W) of the last forward call (for score-map dumps).
  const Tensor& slice_maps() const { return slice_maps_; }

  /// Backpropagates d(loss)/d(output) from the last training forward; accumulates parameter gradients.
  void backward(const Tensor& grad_output);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::vector<Buffer*> buffers();
  std::vector<const Buffer*> buffers() const;
  std::size_t parameter_count() const;
  void zero_grad();

  InputNormalization& normalization() { return norm_; }
  const InputNormalization& normalization() const { return norm_; }

  std::mt19937_64& rng() { return rng_; }

  /// Layer table used for architecture introspection: name → (in_channels, out_channels, kind).
  struct LayerInfo {
    std::string name;
    std::string kind;  // conv3x3, upconv4x4, conv1x1, bn
    int in_channels;
    int out_channels;
  };
  std::vector<LayerInfo> layer_table() const;

 private:
  struct Upsampler {
    Variant kind;
    std::unique_ptr<ConvTranspose2x> upconv;
    std::unique_ptr<Unpool2> unpool;
    Bilinear2x bilinear;
    Tensor forward(const Tensor& x, const Context& ctx);
    Tensor backward(const Tensor& dy);
  };

  NetworkSpec spec_;
  std::mt19937_64 rng_;
  InputNormalization norm_;

  std::array<std::vector<ConvBlock>, 5> encoder_;
  std::array<MaxPool2, 5> pools_;
  std::array<Dropout, 3> encoder_dropout_;  // after pools 3, 4, 5
  std::array<Dropout, 2> decoder_dropout_;  // before upsampling of stages 4, 3
  std::array<Upsampler, 5> upsample_;       // index = stage − 1
  std::array<std::vector<ConvBlock>, 5> decoder_;
  Conv2d final_;
  Conv2d score_;

  // Training caches.
  int batch_ = 0, height_ = 0, width_ = 0, padded_h_ = 0, padded_w_ = 0;
  std::array<int, 3> skip_channels_{};
  Tensor slice_maps_;
  Tensor score_input_;
};

/// Applies the model in inference mode (dropout off, running normalization statistics).
Tensor predict(DDFFNet& model, const StackBatch& batch);

}  // namespace ddff::nn
