#include "ddff/nn/tensor.hpp"

#include <algorithm>

namespace ddff::nn {

Tensor Tensor::reshaped(int n, int c, int h, int w) const& {
  Tensor t = *this;
  return std::move(t).reshaped(n, c, h, w);
}

Tensor Tensor::reshaped(int n, int c, int h, int w) && {
  if (static_cast<std::size_t>(n) * c * h * w != data_.size())
    throw ShapeError("reshape " + shape_string() + " to incompatible shape");
  Tensor t;
  t.n_ = n;
  t.c_ = c;
  t.h_ = h;
  t.w_ = w;
  t.data_ = std::move(data_);
  return t;
}

std::string Tensor::shape_string() const {
  return "(" + std::to_string(n_) + ", " + std::to_string(c_) + ", " + std::to_string(h_) + ", " +
         std::to_string(w_) + ")";
}

Tensor fold_stack(const StackBatch& batch) {
  Tensor t(batch.batch * batch.slices, batch.channels, batch.height, batch.width);
  for (int b = 0; b < batch.batch; ++b)
    for (int s = 0; s < batch.slices; ++s) {
      const int i = b * batch.slices + s;
      for (int y = 0; y < batch.height; ++y)
        for (int x = 0; x < batch.width; ++x)
          for (int c = 0; c < batch.channels; ++c) t.at(i, c, y, x) = batch.at(b, s, y, x, c);
    }
  return t;
}

Tensor reflect_pad(const Tensor& x, int height, int width) {
  if (height == x.h() && width == x.w()) return x;
  if (height < x.h() || width < x.w() || height - x.h() >= x.h() || width - x.w() >= x.w())
    throw ShapeError("reflect_pad: padding must be smaller than the input extent");
  Tensor out(x.n(), x.c(), height, width);
  auto reflect = [](int i, int n) { return i < n ? i : 2 * n - 2 - i; };
  for (int i = 0; i < x.n(); ++i)
    for (int c = 0; c < x.c(); ++c)
      for (int y = 0; y < height; ++y) {
        const int sy = reflect(y, x.h());
        for (int xx = 0; xx < width; ++xx) out.at(i, c, y, xx) = x.at(i, c, sy, reflect(xx, x.w()));
      }
  return out;
}

Tensor crop_top_left(const Tensor& x, int height, int width) {
  if (height == x.h() && width == x.w()) return x;
  if (height > x.h() || width > x.w()) throw ShapeError("crop larger than tensor");
  Tensor out(x.n(), x.c(), height, width);
  for (int i = 0; i < x.n(); ++i)
    for (int c = 0; c < x.c(); ++c)
      for (int y = 0; y < height; ++y)
        std::copy_n(&x.at(i, c, y, 0), width, &out.at(i, c, y, 0));
  return out;
}

}  // namespace ddff::nn
