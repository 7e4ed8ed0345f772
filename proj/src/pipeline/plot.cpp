#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ddff/errors.hpp"
#include "ddff/pipeline.hpp"

namespace ddff::pipeline {

namespace {

using Rgb = std::array<double, 3>;

Rgb jet(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto ramp = [](double x) { return std::clamp(1.5 - std::abs(4.0 * x), 0.0, 1.0); };
  return {ramp(t - 0.75), ramp(t - 0.5), ramp(t - 0.25)};
}

const std::array<Rgb, 8> kPalette = {{{0.12, 0.47, 0.71}, {1.0, 0.5, 0.05}, {0.17, 0.63, 0.17}, {0.84, 0.15, 0.16},
                                      {0.58, 0.4, 0.74}, {0.55, 0.34, 0.29}, {0.89, 0.47, 0.76}, {0.5, 0.5, 0.5}}};

struct Canvas {
  Image img;
  int w, h;
  Canvas(int width, int height) : img(height, width, 3, 1.0), w(width), h(height) {}

  void put(int x, int y, const Rgb& c) {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    for (int k = 0; k < 3; ++k) img[k](y, x) = c[k];
  }
  void line(int x0, int y0, int x1, int y1, const Rgb& c) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      put(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }
  void thick_line(int x0, int y0, int x1, int y1, const Rgb& c) {
    line(x0, y0, x1, y1, c);
    line(x0, y0 + 1, x1, y1 + 1, c);
  }
  void rect(int x0, int y0, int x1, int y1, const Rgb& c) {
    line(x0, y0, x1, y0, c);
    line(x1, y0, x1, y1, c);
    line(x1, y1, x0, y1, c);
    line(x0, y1, x0, y0, c);
  }
};

constexpr int kMargin = 40;

struct Frame {
  double x0, x1, y0, y1;
  int w, h;
  int px(double x) const { return kMargin + static_cast<int>(std::lround((x - x0) / (x1 - x0) * (w - 2 * kMargin))); }
  int py(double y) const {
    return h - kMargin - static_cast<int>(std::lround((y - y0) / (y1 - y0) * (h - 2 * kMargin)));
  }
};

void axes(Canvas& c, const Frame& f) {
  const Rgb black{0, 0, 0}, grid{0.85, 0.85, 0.85};
  for (int k = 1; k < 5; ++k) {
    const int y = kMargin + k * (f.h - 2 * kMargin) / 5;
    const int x = kMargin + k * (f.w - 2 * kMargin) / 5;
    c.line(kMargin, y, f.w - kMargin, y, grid);
    c.line(x, kMargin, x, f.h - kMargin, grid);
  }
  c.rect(kMargin, kMargin, f.w - kMargin, f.h - kMargin, black);
}

}  // namespace

Image colorize(const Plane<double>& values, double vmax) {
  if (!(vmax > 0)) throw DomainError("colorize: normalization maximum must be positive");
  Image out(values.rows(), values.cols(), 3);
  for (Eigen::Index y = 0; y < values.rows(); ++y)
    for (Eigen::Index x = 0; x < values.cols(); ++x) {
      const double v = values(y, x);
      const Rgb c = std::isfinite(v) ? jet(v / vmax) : Rgb{0, 0, 0};
      for (int k = 0; k < 3; ++k) out[k](y, x) = c[k];
    }
  return out;
}

Image render_line_plot(const std::vector<Series>& series, int width, int height) {
  Canvas c(width, height);
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y1 = 0.0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  if (!(x1 > x0)) {
    x0 = 0;
    x1 = 1;
  }
  if (!(y1 > 0)) y1 = 1;
  const Frame f{x0, x1, 0.0, y1 * 1.05, width, height};
  axes(c, f);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& pts = series[i].points;
    const Rgb& col = kPalette[i % kPalette.size()];
    for (std::size_t k = 1; k < pts.size(); ++k)
      c.thick_line(f.px(pts[k - 1].first), f.py(pts[k - 1].second), f.px(pts[k].first), f.py(pts[k].second), col);
    if (pts.size() == 1) c.put(f.px(pts[0].first), f.py(pts[0].second), col);
  }
  return c.img;
}

Whisker whisker_stats(std::vector<double> values, const std::string& label) {
  Whisker w;
  w.label = label;
  if (values.empty()) return w;
  std::sort(values.begin(), values.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  w.min = values.front();
  w.q1 = q(0.25);
  w.median = q(0.5);
  w.q3 = q(0.75);
  w.max = values.back();
  return w;
}

Image render_whiskers(const std::vector<Whisker>& whiskers, int width, int height) {
  Canvas c(width, height);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& w : whiskers) {
    lo = std::min(lo, w.min);
    hi = std::max(hi, w.max);
  }
  if (!(hi > lo)) {
    lo = 0;
    hi = 1;
  }
  const double pad = 0.05 * (hi - lo);
  const Frame f{0.0, static_cast<double>(std::max<std::size_t>(whiskers.size(), 1)), lo - pad, hi + pad, width, height};
  axes(c, f);
  const Rgb black{0, 0, 0};
  for (std::size_t i = 0; i < whiskers.size(); ++i) {
    const auto& w = whiskers[i];
    const Rgb& col = kPalette[i % kPalette.size()];
    const int cx = f.px(static_cast<double>(i) + 0.5);
    const int half = std::max(2, (width - 2 * kMargin) / static_cast<int>(4 * whiskers.size()));
    c.line(cx, f.py(w.min), cx, f.py(w.q1), black);
    c.line(cx, f.py(w.q3), cx, f.py(w.max), black);
    c.line(cx - half / 2, f.py(w.min), cx + half / 2, f.py(w.min), black);
    c.line(cx - half / 2, f.py(w.max), cx + half / 2, f.py(w.max), black);
    for (int y = f.py(w.q3); y <= f.py(w.q1); ++y) c.line(cx - half, y, cx + half, y, col);
    c.rect(cx - half, f.py(w.q3), cx + half, f.py(w.q1), black);
    c.thick_line(cx - half, f.py(w.median), cx + half, f.py(w.median), black);
  }
  return c.img;
}

std::string hash_files(const std::vector<fs::path>& files) {
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 16];
  for (const auto& p : files) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw LoadError(p.string() + ": cannot open for hashing");
    while (is.read(buf, sizeof buf) || is.gcount() > 0) {
      for (std::streamsize i = 0; i < is.gcount(); ++i) {
        h ^= static_cast<unsigned char>(buf[i]);
        h *= 1099511628211ULL;
      }
      if (!is) break;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace ddff::pipeline
