#include "ddff/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace ddff::nn {
namespace {

// Per-channel sum of dy into grad, in a fixed order so results do not depend on buffer alignment.
void accumulate_channel_sums(const Tensor& dy, std::vector<float>& grad) {
  const std::size_t plane = static_cast<std::size_t>(dy.h()) * dy.w();
  for (int i = 0; i < dy.n(); ++i)
    for (int c = 0; c < dy.c(); ++c) {
      const float* p = dy.sample(i) + c * plane;
      double s = 0.0;
      for (std::size_t k = 0; k < plane; ++k) s += p[k];
      grad[static_cast<std::size_t>(c)] += static_cast<float>(s);
    }
}

constexpr std::size_t kColumnBudget = std::size_t{1} << 22;  // floats per im2col tile

int tile_rows(int kdim, int out_h, int out_w) {
  const std::size_t per_row = static_cast<std::size_t>(kdim) * out_w;
  return std::clamp(static_cast<int>(kColumnBudget / std::max<std::size_t>(per_row, 1)), 1, out_h);
}

std::size_t product(const std::vector<int>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
}

}  // namespace

Parameter::Parameter(std::string n, std::vector<int> s, bool with_decay)
    : name(std::move(n)), shape(std::move(s)), value(product(shape), 0.0f), grad(value.size(), 0.0f), decay(with_decay) {}

void Parameter::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0f); }

void im2col(const float* image, int channels, int height, int width, int kernel, int stride, int pad, int out_w,
            int oy0, int oy1, float* col) {
  const std::size_t ncols = static_cast<std::size_t>(oy1 - oy0) * out_w;
  for (int c = 0; c < channels; ++c)
    for (int ky = 0; ky < kernel; ++ky)
      for (int kx = 0; kx < kernel; ++kx) {
        float* row = col + (static_cast<std::size_t>(c * kernel + ky) * kernel + kx) * ncols;
        const float* plane = image + static_cast<std::size_t>(c) * height * width;
        for (int oy = oy0; oy < oy1; ++oy) {
          float* dst = row + static_cast<std::size_t>(oy - oy0) * out_w;
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= height) {
            std::fill_n(dst, out_w, 0.0f);
            continue;
          }
          const float* src = plane + static_cast<std::size_t>(iy) * width;
          if (stride == 1) {
            const int lo = std::clamp(pad - kx, 0, out_w), hi = std::clamp(width + pad - kx, lo, out_w);
            std::fill_n(dst, lo, 0.0f);
            std::memcpy(dst + lo, src + lo - pad + kx, sizeof(float) * static_cast<std::size_t>(hi - lo));
            std::fill(dst + hi, dst + out_w, 0.0f);
          } else {
            for (int ox = 0; ox < out_w; ++ox) {
              const int ix = ox * stride - pad + kx;
              dst[ox] = (ix >= 0 && ix < width) ? src[ix] : 0.0f;
            }
          }
        }
      }
}

void col2im(const float* col, int channels, int height, int width, int kernel, int stride, int pad, int out_w,
            int oy0, int oy1, float* image) {
  const std::size_t ncols = static_cast<std::size_t>(oy1 - oy0) * out_w;
  for (int c = 0; c < channels; ++c)
    for (int ky = 0; ky < kernel; ++ky)
      for (int kx = 0; kx < kernel; ++kx) {
        const float* row = col + (static_cast<std::size_t>(c * kernel + ky) * kernel + kx) * ncols;
        float* plane = image + static_cast<std::size_t>(c) * height * width;
        for (int oy = oy0; oy < oy1; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= height) continue;
          const float* src = row + static_cast<std::size_t>(oy - oy0) * out_w;
          float* dst = plane + static_cast<std::size_t>(iy) * width;
          if (stride == 1) {
            const int lo = std::clamp(pad - kx, 0, out_w), hi = std::clamp(width + pad - kx, lo, out_w);
            for (int ox = lo; ox < hi; ++ox) dst[ox - pad + kx] += src[ox];
          } else {
            for (int ox = 0; ox < out_w; ++ox) {
              const int ix = ox * stride - pad + kx;
              if (ix >= 0 && ix < width) dst[ix] += src[ox];
            }
          }
        }
      }
}

// ---------------------------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(const std::string& name, int in_channels, int out_channels, int kernel, int pad)
    : weight(name + "/weight", {out_channels, in_channels, kernel, kernel}, true),
      bias(name + "/bias", {out_channels}, false),
      in_(in_channels),
      out_(out_channels),
      k_(kernel),
      pad_(pad) {}

void Conv2d::init_variance_scaling(std::mt19937_64& rng) {
  const double fan_in = static_cast<double>(in_) * k_ * k_;
  std::normal_distribution<float> dist(0.0f, static_cast<float>(std::sqrt(2.0 / fan_in)));
  for (auto& v : weight.value) v = dist(rng);
  std::fill(bias.value.begin(), bias.value.end(), 0.0f);
}

Tensor Conv2d::forward(const Tensor& x, const Context& ctx) {
  if (x.c() != in_) throw ShapeError(weight.name + ": expected " + std::to_string(in_) + " channels, got " + x.shape_string());
  const int oh = x.h() + 2 * pad_ - k_ + 1, ow = x.w() + 2 * pad_ - k_ + 1;
  const int kdim = in_ * k_ * k_;
  Tensor y(x.n(), out_, oh, ow);
  const ConstMatrixMap w(weight.value.data(), out_, kdim);
  const Eigen::Map<const Eigen::VectorXf> b(bias.value.data(), out_);
  if (k_ == 1 && pad_ == 0) {
    for (int i = 0; i < x.n(); ++i) y.matrix(i).noalias() = w * x.matrix(i);
  } else {
    const int rows = tile_rows(kdim, oh, ow);
    std::vector<float> col(static_cast<std::size_t>(kdim) * rows * ow);
    for (int i = 0; i < x.n(); ++i)
      for (int oy0 = 0; oy0 < oh; oy0 += rows) {
        const int oy1 = std::min(oh, oy0 + rows);
        const int ncols = (oy1 - oy0) * ow;
        im2col(x.sample(i), in_, x.h(), x.w(), k_, 1, pad_, ow, oy0, oy1, col.data());
        y.matrix(i).middleCols(static_cast<Eigen::Index>(oy0) * ow, ncols).noalias() =
            w * ConstMatrixMap(col.data(), kdim, ncols);
      }
  }
  for (int i = 0; i < x.n(); ++i) y.matrix(i).colwise() += b;
  if (ctx.training) input_ = x;
  return y;
}

Tensor Conv2d::backward(const Tensor& dy, bool need_input_grad) {
  const Tensor& x = input_;
  if (x.empty()) throw ShapeError(weight.name + ": backward without a cached training forward");
  const int oh = dy.h(), ow = dy.w();
  const int kdim = in_ * k_ * k_;
  MatrixMap dw(weight.grad.data(), out_, kdim);
  const ConstMatrixMap w(weight.value.data(), out_, kdim);
  Tensor dx;
  if (need_input_grad) dx = Tensor(x.n(), in_, x.h(), x.w());
  accumulate_channel_sums(dy, bias.grad);
  if (k_ == 1 && pad_ == 0) {
    for (int i = 0; i < dy.n(); ++i) {
      dw.noalias() += dy.matrix(i) * x.matrix(i).transpose();
      if (need_input_grad) dx.matrix(i).noalias() = w.transpose() * dy.matrix(i);
    }
  } else {
    const int rows = tile_rows(kdim, oh, ow);
    std::vector<float> col(static_cast<std::size_t>(kdim) * rows * ow);
    MatrixRM dcol;
    for (int i = 0; i < dy.n(); ++i)
      for (int oy0 = 0; oy0 < oh; oy0 += rows) {
        const int oy1 = std::min(oh, oy0 + rows);
        const int ncols = (oy1 - oy0) * ow;
        im2col(x.sample(i), in_, x.h(), x.w(), k_, 1, pad_, ow, oy0, oy1, col.data());
        const auto dyb = dy.matrix(i).middleCols(static_cast<Eigen::Index>(oy0) * ow, ncols);
        dw.noalias() += dyb * ConstMatrixMap(col.data(), kdim, ncols).transpose();
        if (need_input_grad) {
          dcol.noalias() = w.transpose() * dyb;
          col2im(dcol.data(), in_, x.h(), x.w(), k_, 1, pad_, ow, oy0, oy1, dx.sample(i));
        }
      }
  }
  input_ = Tensor();
  return dx;
}

// ---------------------------------------------------------------------------------------------
// ConvTranspose2x

ConvTranspose2x::ConvTranspose2x(const std::string& name, int in_channels, int out_channels)
    : weight(name + "/weight", {in_channels, out_channels, 4, 4}, true),
      bias(name + "/bias", {out_channels}, false),
      in_(in_channels),
      out_(out_channels) {}

void ConvTranspose2x::init_bilinear() {
  std::fill(weight.value.begin(), weight.value.end(), 0.0f);
  // factor 2: center 1.5, taps 1 − |i − 1.5| / 2 = {0.25, 0.75, 0.75, 0.25}
  constexpr float taps[4] = {0.25f, 0.75f, 0.75f, 0.25f};
  for (int c = 0; c < std::min(in_, out_); ++c)
    for (int ky = 0; ky < 4; ++ky)
      for (int kx = 0; kx < 4; ++kx)
        weight.value[((static_cast<std::size_t>(c) * out_ + c) * 4 + ky) * 4 + kx] = taps[ky] * taps[kx];
  std::fill(bias.value.begin(), bias.value.end(), 0.0f);
}

Tensor ConvTranspose2x::forward(const Tensor& x, const Context& ctx) {
  if (x.c() != in_) throw ShapeError(weight.name + ": channel mismatch " + x.shape_string());
  const int h = x.h(), w = x.w();
  Tensor y(x.n(), out_, 2 * h, 2 * w);
  const ConstMatrixMap wm(weight.value.data(), in_, out_ * 16);
  MatrixRM cols;
  for (int i = 0; i < x.n(); ++i) {
    cols.noalias() = wm.transpose() * x.matrix(i);
    col2im(cols.data(), out_, 2 * h, 2 * w, 4, 2, 1, w, 0, h, y.sample(i));
    for (int c = 0; c < out_; ++c) y.matrix(i).row(c).array() += bias.value[static_cast<std::size_t>(c)];
  }
  if (ctx.training) input_ = x;
  return y;
}

Tensor ConvTranspose2x::backward(const Tensor& dy) {
  const Tensor& x = input_;
  if (x.empty()) throw ShapeError(weight.name + ": backward without a cached training forward");
  const int h = x.h(), w = x.w();
  MatrixMap dw(weight.grad.data(), in_, out_ * 16);
  const ConstMatrixMap wm(weight.value.data(), in_, out_ * 16);
  Tensor dx(x.n(), in_, h, w);
  std::vector<float> dcols(static_cast<std::size_t>(out_) * 16 * h * w);
  accumulate_channel_sums(dy, bias.grad);
  for (int i = 0; i < dy.n(); ++i) {
    im2col(dy.sample(i), out_, 2 * h, 2 * w, 4, 2, 1, w, 0, h, dcols.data());
    const ConstMatrixMap dc(dcols.data(), out_ * 16, static_cast<Eigen::Index>(h) * w);
    dw.noalias() += x.matrix(i) * dc.transpose();
    dx.matrix(i).noalias() = wm * dc;
  }
  input_ = Tensor();
  return dx;
}

// ---------------------------------------------------------------------------------------------
// BatchNorm2d

BatchNorm2d::BatchNorm2d(const std::string& name, int channels, float momentum, float eps)
    : gamma(name + "/gamma", {channels}, false),
      beta(name + "/beta", {channels}, false),
      running_mean{name + "/running_mean", std::vector<float>(static_cast<std::size_t>(channels), 0.0f)},
      running_var{name + "/running_var", std::vector<float>(static_cast<std::size_t>(channels), 1.0f)},
      c_(channels),
      momentum_(momentum),
      eps_(eps) {
  std::fill(gamma.value.begin(), gamma.value.end(), 1.0f);
}

Tensor BatchNorm2d::forward(const Tensor& x, const Context& ctx) {
  const std::size_t hw = static_cast<std::size_t>(x.h()) * x.w();
  Tensor y(x.n(), x.c(), x.h(), x.w());
  if (!ctx.training) {
    for (int c = 0; c < c_; ++c) {
      const float inv = 1.0f / std::sqrt(running_var.value[c] + eps_);
      const float scale = gamma.value[c] * inv, shift = beta.value[c] - running_mean.value[c] * scale;
      for (int i = 0; i < x.n(); ++i) {
        const float* src = x.sample(i) + c * hw;
        float* dst = y.sample(i) + c * hw;
        for (std::size_t k = 0; k < hw; ++k) dst[k] = src[k] * scale + shift;
      }
    }
    return y;
  }
  const double m = static_cast<double>(x.n()) * static_cast<double>(hw);
  xhat_ = Tensor(x.n(), x.c(), x.h(), x.w());
  inv_std_.assign(static_cast<std::size_t>(c_), 0.0f);
  for (int c = 0; c < c_; ++c) {
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < x.n(); ++i) {
      const float* src = x.sample(i) + c * hw;
      for (std::size_t k = 0; k < hw; ++k) {
        sum += src[k];
        sq += static_cast<double>(src[k]) * src[k];
      }
    }
    const double mean = sum / m;
    const double var = std::max(0.0, sq / m - mean * mean);
    const float inv = static_cast<float>(1.0 / std::sqrt(var + eps_));
    inv_std_[c] = inv;
    for (int i = 0; i < x.n(); ++i) {
      const float* src = x.sample(i) + c * hw;
      float* xh = xhat_.sample(i) + c * hw;
      float* dst = y.sample(i) + c * hw;
      for (std::size_t k = 0; k < hw; ++k) {
        xh[k] = (src[k] - static_cast<float>(mean)) * inv;
        dst[k] = gamma.value[c] * xh[k] + beta.value[c];
      }
    }
    const double unbiased = m > 1.0 ? var * m / (m - 1.0) : var;
    running_mean.value[c] = momentum_ * running_mean.value[c] + (1.0f - momentum_) * static_cast<float>(mean);
    running_var.value[c] = momentum_ * running_var.value[c] + (1.0f - momentum_) * static_cast<float>(unbiased);
  }
  return y;
}

Tensor BatchNorm2d::backward(const Tensor& dy) {
  if (xhat_.empty()) throw ShapeError(gamma.name + ": backward without a cached training forward");
  const std::size_t hw = static_cast<std::size_t>(dy.h()) * dy.w();
  const double m = static_cast<double>(dy.n()) * static_cast<double>(hw);
  Tensor dx(dy.n(), dy.c(), dy.h(), dy.w());
  for (int c = 0; c < c_; ++c) {
    double dgamma = 0.0, dbeta = 0.0;
    for (int i = 0; i < dy.n(); ++i) {
      const float* g = dy.sample(i) + c * hw;
      const float* xh = xhat_.sample(i) + c * hw;
      for (std::size_t k = 0; k < hw; ++k) {
        dgamma += static_cast<double>(g[k]) * xh[k];
        dbeta += g[k];
      }
    }
    gamma.grad[c] += static_cast<float>(dgamma);
    beta.grad[c] += static_cast<float>(dbeta);
    const float scale = static_cast<float>(gamma.value[c] * inv_std_[c] / m);
    const float mdb = static_cast<float>(dbeta), mdg = static_cast<float>(dgamma), fm = static_cast<float>(m);
    for (int i = 0; i < dy.n(); ++i) {
      const float* g = dy.sample(i) + c * hw;
      const float* xh = xhat_.sample(i) + c * hw;
      float* dst = dx.sample(i) + c * hw;
      for (std::size_t k = 0; k < hw; ++k) dst[k] = scale * (fm * g[k] - mdb - xh[k] * mdg);
    }
  }
  xhat_ = Tensor();
  return dx;
}

// ---------------------------------------------------------------------------------------------
// ReLU, pooling, upsampling, dropout

void ReLU::forward_inplace(Tensor& x, const Context& ctx) {
  auto& d = x.storage();
  if (ctx.training) active_.resize(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    const bool on = d[k] > 0.0f;
    if (!on) d[k] = 0.0f;
    if (ctx.training) active_[k] = on;
  }
}

void ReLU::backward_inplace(Tensor& dy) const {
  auto& d = dy.storage();
  if (active_.size() != d.size()) throw ShapeError("relu: backward shape mismatch");
  for (std::size_t k = 0; k < d.size(); ++k)
    if (!active_[k]) d[k] = 0.0f;
}

Tensor MaxPool2::forward(const Tensor& x, const Context&) {
  if (x.h() % 2 != 0 || x.w() % 2 != 0) throw ShapeError("maxpool: spatial dims must be even, got " + x.shape_string());
  const int oh = x.h() / 2, ow = x.w() / 2;
  in_n_ = x.n();
  in_c_ = x.c();
  in_h_ = x.h();
  in_w_ = x.w();
  Tensor y(x.n(), x.c(), oh, ow);
  switches_.resize(y.size());
  std::size_t o = 0;
  for (int i = 0; i < x.n(); ++i)
    for (int c = 0; c < x.c(); ++c)
      for (int yy = 0; yy < oh; ++yy)
        for (int xx = 0; xx < ow; ++xx, ++o) {
          int best = (2 * yy) * x.w() + 2 * xx;
          float bv = x.at(i, c, 2 * yy, 2 * xx);
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
              const float v = x.at(i, c, 2 * yy + dy, 2 * xx + dx);
              if (v > bv) {
                bv = v;
                best = (2 * yy + dy) * x.w() + 2 * xx + dx;
              }
            }
          y.storage()[o] = bv;
          switches_[o] = best;
        }
  return y;
}

Tensor MaxPool2::backward(const Tensor& dy) const {
  Tensor dx(in_n_, in_c_, in_h_, in_w_);
  const std::size_t plane_out = static_cast<std::size_t>(dy.h()) * dy.w();
  const std::size_t plane_in = static_cast<std::size_t>(in_h_) * in_w_;
  for (std::size_t o = 0; o < dy.size(); ++o) {
    const std::size_t plane = o / plane_out;
    dx.storage()[plane * plane_in + static_cast<std::size_t>(switches_[o])] += dy.storage()[o];
  }
  return dx;
}

Tensor Unpool2::forward(const Tensor& x, const Context&) const {
  if (!pool_ || pool_->switches().size() != x.size() || pool_->in_h() != 2 * x.h() || pool_->in_w() != 2 * x.w())
    throw ShapeError("unpool: input does not match the paired pooling stage");
  Tensor y(x.n(), x.c(), 2 * x.h(), 2 * x.w());
  const std::size_t plane_in = static_cast<std::size_t>(x.h()) * x.w();
  const std::size_t plane_out = plane_in * 4;
  const auto& sw = pool_->switches();
  for (std::size_t o = 0; o < x.size(); ++o)
    y.storage()[(o / plane_in) * plane_out + static_cast<std::size_t>(sw[o])] = x.storage()[o];
  return y;
}

Tensor Unpool2::backward(const Tensor& dy) const {
  Tensor dx(dy.n(), dy.c(), dy.h() / 2, dy.w() / 2);
  const std::size_t plane_in = static_cast<std::size_t>(dx.h()) * dx.w();
  const std::size_t plane_out = plane_in * 4;
  const auto& sw = pool_->switches();
  for (std::size_t o = 0; o < dx.size(); ++o)
    dx.storage()[o] = dy.storage()[(o / plane_in) * plane_out + static_cast<std::size_t>(sw[o])];
  return dx;
}

namespace {

// Source taps of output index o for 2× upsampling with half-pixel centers: src = o/2 − 0.25.
struct Taps {
  int i0, i1;
  float w0, w1;
};

Taps upsample_taps(int o, int n) {
  const int base = o / 2;
  if (o % 2 == 0) return {std::max(base - 1, 0), base, 0.25f, 0.75f};
  return {base, std::min(base + 1, n - 1), 0.75f, 0.25f};
}

}  // namespace

Tensor Bilinear2x::forward(const Tensor& x, const Context&) const {
  const int h = x.h(), w = x.w();
  Tensor y(x.n(), x.c(), 2 * h, 2 * w);
  std::vector<float> rowbuf(static_cast<std::size_t>(2 * w));
  for (int i = 0; i < x.n(); ++i)
    for (int c = 0; c < x.c(); ++c)
      for (int oy = 0; oy < 2 * h; ++oy) {
        const Taps ty = upsample_taps(oy, h);
        for (int ox = 0; ox < 2 * w; ++ox) {
          const Taps tx = upsample_taps(ox, w);
          const float a = tx.w0 * x.at(i, c, ty.i0, tx.i0) + tx.w1 * x.at(i, c, ty.i0, tx.i1);
          const float b = tx.w0 * x.at(i, c, ty.i1, tx.i0) + tx.w1 * x.at(i, c, ty.i1, tx.i1);
          y.at(i, c, oy, ox) = ty.w0 * a + ty.w1 * b;
        }
      }
  return y;
}

Tensor Bilinear2x::backward(const Tensor& dy) const {
  const int h = dy.h() / 2, w = dy.w() / 2;
  Tensor dx(dy.n(), dy.c(), h, w);
  for (int i = 0; i < dy.n(); ++i)
    for (int c = 0; c < dy.c(); ++c)
      for (int oy = 0; oy < 2 * h; ++oy) {
        const Taps ty = upsample_taps(oy, h);
        for (int ox = 0; ox < 2 * w; ++ox) {
          const Taps tx = upsample_taps(ox, w);
          const float g = dy.at(i, c, oy, ox);
          dx.at(i, c, ty.i0, tx.i0) += ty.w0 * tx.w0 * g;
          dx.at(i, c, ty.i0, tx.i1) += ty.w0 * tx.w1 * g;
          dx.at(i, c, ty.i1, tx.i0) += ty.w1 * tx.w0 * g;
          dx.at(i, c, ty.i1, tx.i1) += ty.w1 * tx.w1 * g;
        }
      }
  return dx;
}

void Dropout::forward_inplace(Tensor& x, const Context& ctx) {
  const bool active = (ctx.training || ctx.force_dropout) && p_ > 0.0f;
  if (!active) {
    scale_.clear();
    return;
  }
  if (!ctx.rng) throw ShapeError("dropout: active dropout needs a random generator");
  const float keep = 1.0f - p_;
  const float inv_keep = 1.0f / keep;
  const auto threshold = static_cast<std::uint64_t>(static_cast<double>(keep) * 16777216.0);  // 2^24
  scale_.resize(x.size());
  auto& d = x.storage();
  for (std::size_t k = 0; k < d.size(); ++k) {
    const bool kept = ((*ctx.rng)() >> 40) < threshold;
    scale_[k] = kept ? inv_keep : 0.0f;
    d[k] *= scale_[k];
  }
}

void Dropout::backward_inplace(Tensor& dy) const {
  if (scale_.empty()) return;
  auto& d = dy.storage();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] *= scale_[k];
}

// ---------------------------------------------------------------------------------------------

ConvBlock::ConvBlock(const std::string& name, int in_channels, int out_channels)
    : conv(name, in_channels, out_channels, 3, 1), bn(name + "/bn", out_channels) {}

Tensor ConvBlock::forward(const Tensor& x, const Context& ctx) {
  Tensor y = bn.forward(conv.forward(x, ctx), ctx);
  relu.forward_inplace(y, ctx);
  return y;
}

Tensor ConvBlock::backward(const Tensor& dy, bool need_input_grad) {
  Tensor g = dy;
  relu.backward_inplace(g);
  return conv.backward(bn.backward(g), need_input_grad);
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.n() != b.n() || a.h() != b.h() || a.w() != b.w())
    throw ShapeError("concat: " + a.shape_string() + " vs " + b.shape_string());
  Tensor y(a.n(), a.c() + b.c(), a.h(), a.w());
  for (int i = 0; i < a.n(); ++i) {
    std::copy_n(a.sample(i), a.sample_size(), y.sample(i));
    std::copy_n(b.sample(i), b.sample_size(), y.sample(i) + a.sample_size());
  }
  return y;
}

void split_channels(const Tensor& d, int channels_a, Tensor& da, Tensor& db) {
  da = Tensor(d.n(), channels_a, d.h(), d.w());
  db = Tensor(d.n(), d.c() - channels_a, d.h(), d.w());
  for (int i = 0; i < d.n(); ++i) {
    std::copy_n(d.sample(i), da.sample_size(), da.sample(i));
    std::copy_n(d.sample(i) + da.sample_size(), db.sample_size(), db.sample(i));
  }
}

}  // namespace ddff::nn
