#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ddff/nn/tensor.hpp"

namespace ddff::nn {

/// Trainable tensor with its gradient accumulator.
struct Parameter {
  std::string name;
  std::vector<int> shape;
  std::vector<float> value;
  std::vector<float> grad;
  /// Convolution weights carry the λ‖W‖² penalty; biases and normalization scale/shift do not.
  bool decay = false;

  Parameter() = default;
  Parameter(std::string n, std::vector<int> s, bool with_decay);
  std::size_t size() const { return value.size(); }
  void zero_grad();
};

/// Non-trainable state saved with the model (batch-normalization running statistics).
struct Buffer {
  std::string name;
  std::vector<float> value;
};

struct Context {
  bool training = false;
  /// Keep dropout active outside training (Monte-Carlo style inference).
  bool force_dropout = false;
  std::mt19937_64* rng = nullptr;
};

/// Column buffer for a (C, H, W) image: rows are (c, ky, kx), columns the output positions of rows [oy0, oy1).
void im2col(const float* image, int channels, int height, int width, int kernel, int stride, int pad, int out_w,
            int oy0, int oy1, float* col);
/// Adjoint of im2col; accumulates into `image`.
void col2im(const float* col, int channels, int height, int width, int kernel, int stride, int pad, int out_w,
            int oy0, int oy1, float* image);

class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const std::string& name, int in_channels, int out_channels, int kernel, int pad);

  Tensor forward(const Tensor& x, const Context& ctx);
  /// Accumulates parameter gradients; returns the input gradient unless `need_input_grad` is false.
  Tensor backward(const Tensor& dy, bool need_input_grad = true);

  void init_variance_scaling(std::mt19937_64& rng);

  int in_channels() const { return in_; }
  int out_channels() const { return out_; }
  int kernel() const { return k_; }

  Parameter weight, bias;

 private:
  int in_ = 0, out_ = 0, k_ = 3, pad_ = 1;
  Tensor input_;
};

/// 4×4 transposed convolution with stride 2 and padding 1 (doubles H and W).
class ConvTranspose2x {
 public:
  ConvTranspose2x() = default;
  ConvTranspose2x(const std::string& name, int in_channels, int out_channels);

  Tensor forward(const Tensor& x, const Context& ctx);
  Tensor backward(const Tensor& dy);

  /// Per-channel bilinear interpolation kernel on the diagonal, zeros elsewhere.
  void init_bilinear();

  Parameter weight, bias;

 private:
  int in_ = 0, out_ = 0;
  Tensor input_;
};

class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(const std::string& name, int channels, float momentum = 0.9f, float eps = 1e-5f);

  Tensor forward(const Tensor& x, const Context& ctx);
  Tensor backward(const Tensor& dy);

  Parameter gamma, beta;
  Buffer running_mean, running_var;

 private:
  int c_ = 0;
  float momentum_ = 0.9f, eps_ = 1e-5f;
  Tensor xhat_;
  std::vector<float> inv_std_;
};

class ReLU {
 public:
  void forward_inplace(Tensor& x, const Context& ctx);
  void backward_inplace(Tensor& dy) const;

 private:
  std::vector<std::uint8_t> active_;
};

/// 2×2 max pooling, stride 2. Switches (argmax positions) are always recorded so that a mirrored
/// unpooling stage can consume them, also at inference.
class MaxPool2 {
 public:
  Tensor forward(const Tensor& x, const Context& ctx);
  Tensor backward(const Tensor& dy) const;

  const std::vector<std::int32_t>& switches() const { return switches_; }
  int in_h() const { return in_h_; }
  int in_w() const { return in_w_; }

 private:
  std::vector<std::int32_t> switches_;
  int in_n_ = 0, in_c_ = 0, in_h_ = 0, in_w_ = 0;
};

/// Places each value at its pooling switch; other positions are zero.
class Unpool2 {
 public:
  explicit Unpool2(const MaxPool2* pool = nullptr) : pool_(pool) {}
  Tensor forward(const Tensor& x, const Context& ctx) const;
  Tensor backward(const Tensor& dy) const;

 private:
  const MaxPool2* pool_;
};

/// 2× bilinear upsampling with half-pixel centers and replicated borders.
class Bilinear2x {
 public:
  Tensor forward(const Tensor& x, const Context& ctx) const;
  Tensor backward(const Tensor& dy) const;
};

class Dropout {
 public:
  explicit Dropout(float p = 0.5f) : p_(p) {}
  void forward_inplace(Tensor& x, const Context& ctx);
  void backward_inplace(Tensor& dy) const;
  float p() const { return p_; }

 private:
  float p_;
  std::vector<float> scale_;
};

/// Convolution, batch normalization and ReLU.
class ConvBlock {
 public:
  ConvBlock() = default;
  ConvBlock(const std::string& name, int in_channels, int out_channels);

  Tensor forward(const Tensor& x, const Context& ctx);
  Tensor backward(const Tensor& dy, bool need_input_grad = true);

  Conv2d conv;
  BatchNorm2d bn;
  ReLU relu;
};

Tensor concat_channels(const Tensor& a, const Tensor& b);
/// Splits a channel-concatenated gradient back into its two parts.
void split_channels(const Tensor& d, int channels_a, Tensor& da, Tensor& db);

}  // namespace ddff::nn
