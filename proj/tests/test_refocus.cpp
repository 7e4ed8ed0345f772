#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ddff/refocus.hpp"

using namespace ddff;

namespace {

// Smooth periodic test image with no energy at Nyquist.
Plane<double> band_limited(int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Plane<double> p = Plane<double>::Constant(h, w, 0.5);
  for (int k = 0; k < 6; ++k) {
    const int fx = static_cast<int>(u(rng) * (w / 2 - 1)), fy = static_cast<int>(u(rng) * (h / 2 - 1));
    const double a = 0.05 * u(rng), ph = 2 * std::numbers::pi * u(rng);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) p(y, x) += a * std::cos(2 * std::numbers::pi * (fx * x / double(w) + fy * y / double(h)) + ph);
  }
  return p;
}

}  // namespace

TEST(PhaseShift, IntegerShiftsMatchCircularRoll) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Plane<double> img(17, 24);
  for (auto& v : img.reshaped()) v = u(rng);
  for (int dx : {-3, 0, 1, 5})
    for (int dy : {-2, 0, 4}) {
      const Plane<double> out = phase_shift(img, dx, dy);
      for (int y = 0; y < 17; ++y)
        for (int x = 0; x < 24; ++x) {
          const int sx = ((x + dx) % 24 + 24) % 24, sy = ((y + dy) % 17 + 17) % 17;
          ASSERT_NEAR(out(y, x), img(sy, sx), 1e-6);
        }
    }
}

TEST(PhaseShift, HalfPixelSinusoid) {
  const int n = 64, k = 5;
  Plane<double> img(8, n);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < n; ++x) img(y, x) = std::cos(2 * std::numbers::pi * k * x / n);
  const Plane<double> out = phase_shift(img, 0.5, 0.0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < n; ++x) ASSERT_NEAR(out(y, x), std::cos(2 * std::numbers::pi * k * (x + 0.5) / n), 1e-6);
}

TEST(PhaseShift, InverseShiftAndMeanPreservation) {
  const Plane<double> img = band_limited(32, 48, 11);
  const Plane<double> there = phase_shift(img, 0.37, -1.21);
  const Plane<double> back = phase_shift(there, -0.37, 1.21);
  EXPECT_LT((back - img).abs().maxCoeff(), 1e-9);
  EXPECT_NEAR(there.mean(), img.mean(), 1e-12);
}

TEST(PhaseShift, RejectsNonFinite) {
  Plane<double> img = Plane<double>::Zero(4, 4);
  EXPECT_THROW(phase_shift(img, NAN, 0.0), DomainError);
  img(1, 1) = INFINITY;
  EXPECT_THROW(phase_shift(img, 0.0, 0.0), DomainError);
}

TEST(Refocus, MatchesNaiveShiftAndMean) {
  LightField lf;
  lf.intrinsics = lytro_illum_intrinsics(3);
  for (int k = 0; k < 9; ++k) lf.views.emplace_back(band_limited(16, 20, 100 + k));
  const double d = 0.3;
  Plane<double> expected = Plane<double>::Zero(16, 20);
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 3; ++v) expected += phase_shift(lf.view(u, v)[0], d * (1 - u), d * (1 - v));
  expected /= 9.0;
  const Image got = refocus_at_disparity(lf, d);
  EXPECT_LT((got[0] - expected).abs().maxCoeff(), 1e-12);
  EXPECT_THROW(refocus_at_disparity(lf, -0.1), DomainError);
}

TEST(Refocus, ConstantLightFieldIsFixedPoint) {
  LightField lf;
  lf.intrinsics = lytro_illum_intrinsics(5);
  for (int k = 0; k < 25; ++k) lf.views.emplace_back(8, 8, 3, 0.25);
  const Image out = refocus_at_disparity(lf, 0.2);
  for (const auto& p : out.channels) EXPECT_LT((p - 0.25).abs().maxCoeff(), 1e-12);
}

TEST(Stack, LinearDisparities) {
  const auto d = linear_disparities(0.28, 0.02, 10);
  ASSERT_EQ(d.size(), 10u);
  EXPECT_DOUBLE_EQ(d.front(), 0.28);
  EXPECT_DOUBLE_EQ(d.back(), 0.02);
  for (std::size_t k = 1; k < d.size(); ++k) EXPECT_NEAR(d[k - 1] - d[k], 0.26 / 9.0, 1e-15);
  EXPECT_THROW(linear_disparities(0.02, 0.28, 10), DomainError);
  EXPECT_THROW(linear_disparities(0.28, 0.02, 0), DomainError);
}

TEST(Stack, ValidateRejectsNonMonotone) {
  FocalStack s;
  s.slices = {Image(4, 4, 1), Image(4, 4, 1), Image(4, 4, 1)};
  s.focus_disparities = {0.3, 0.1, 0.2};
  EXPECT_THROW(s.validate(), DomainError);
  s.focus_disparities = {0.3, 0.2, 0.1};
  EXPECT_NO_THROW(s.validate());
}
