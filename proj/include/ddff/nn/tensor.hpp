#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

#include "ddff/errors.hpp"

namespace ddff::nn {

using MatrixRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<MatrixRM>;
using ConstMatrixMap = Eigen::Map<const MatrixRM>;

/// Dense NCHW float tensor.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int n, int c, int h, int w, float fill = 0.0f)
      : n_(n), c_(c), h_(h), w_(w), data_(static_cast<std::size_t>(n) * c * h * w, fill) {}

  int n() const { return n_; }
  int c() const { return c_; }
  int h() const { return h_; }
  int w() const { return w_; }
  std::size_t size() const { return data_.size(); }
  std::size_t sample_size() const { return static_cast<std::size_t>(c_) * h_ * w_; }
  bool empty() const { return data_.empty(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  float* sample(int i) { return data_.data() + static_cast<std::size_t>(i) * sample_size(); }
  const float* sample(int i) const { return data_.data() + static_cast<std::size_t>(i) * sample_size(); }

  float& at(int i, int ch, int y, int x) {
    return data_[((static_cast<std::size_t>(i) * c_ + ch) * h_ + y) * w_ + x];
  }
  const float& at(int i, int ch, int y, int x) const {
    return data_[((static_cast<std::size_t>(i) * c_ + ch) * h_ + y) * w_ + x];
  }

  /// Sample i viewed as a (C, H·W) matrix.
  MatrixMap matrix(int i) { return MatrixMap(sample(i), c_, static_cast<Eigen::Index>(h_) * w_); }
  ConstMatrixMap matrix(int i) const { return ConstMatrixMap(sample(i), c_, static_cast<Eigen::Index>(h_) * w_); }

  /// Same storage, new shape with equal element count.
  Tensor reshaped(int n, int c, int h, int w) const&;
  Tensor reshaped(int n, int c, int h, int w) &&;

  std::vector<float>& storage() { return data_; }
  const std::vector<float>& storage() const { return data_; }

  bool same_shape(const Tensor& o) const { return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_; }
  std::string shape_string() const;

 private:
  int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<float> data_;
};

/// Focal-stack batch in (B, S, H, W, C) order, the layout callers hand to the network.
struct StackBatch {
  int batch = 0, slices = 0, height = 0, width = 0, channels = 0;
  std::vector<float> data;

  StackBatch() = default;
  StackBatch(int b, int s, int h, int w, int c)
      : batch(b), slices(s), height(h), width(w), channels(c), data(static_cast<std::size_t>(b) * s * h * w * c, 0.0f) {}

  float& at(int b, int s, int y, int x, int c) {
    return data[(((static_cast<std::size_t>(b) * slices + s) * height + y) * width + x) * channels + c];
  }
  const float& at(int b, int s, int y, int x, int c) const {
    return data[(((static_cast<std::size_t>(b) * slices + s) * height + y) * width + x) * channels + c];
  }
};

/// (B, S, H, W, C) → (B·S, C, H, W).
Tensor fold_stack(const StackBatch& batch);

/// Reflect-pad H and W at the bottom/right up to the given sizes.
Tensor reflect_pad(const Tensor& x, int height, int width);
Tensor crop_top_left(const Tensor& x, int height, int width);

inline int round_up(int v, int multiple) { return (v + multiple - 1) / multiple * multiple; }

}  // namespace ddff::nn
