#include <gtest/gtest.h>

#include <cmath>

#include "ddff/lightfield.hpp"

using namespace ddff;

TEST(Geometry, DisparityFromDepthMatchesClosedForm) {
  const auto intr = lytro_illum_intrinsics();
  // b·f / Z with b = 27e-5 m/px and f = 521.4 px.
  EXPECT_NEAR(disparity_from_depth(0.5, intr), 27e-5 * 521.4 / 0.5, 1e-15);
  EXPECT_NEAR(disparity_from_depth(0.5, intr), 0.28, 0.005);
  EXPECT_NEAR(disparity_from_depth(7.0, intr), 0.02, 0.005);
}

TEST(Geometry, RoundTripAcrossDepthRange) {
  const auto intr = lytro_illum_intrinsics();
  for (int k = 0; k <= 300; ++k) {
    const double z = 0.1 * std::pow(1000.0, k / 300.0);
    const double back = depth_from_disparity(disparity_from_depth(z, intr), intr);
    EXPECT_NEAR(back / z, 1.0, 1e-9) << z;
  }
}

TEST(Geometry, NonPositiveInputsAreDomainErrors) {
  const auto intr = lytro_illum_intrinsics();
  EXPECT_THROW(disparity_from_depth(0.0, intr), DomainError);
  EXPECT_THROW(disparity_from_depth(-1.0, intr), DomainError);
  EXPECT_THROW(depth_from_disparity(0.0, intr), DomainError);
  EXPECT_EQ(disparity_from_depth(INFINITY, intr), 0.0);
}

TEST(Geometry, MapConversionKeepsInvalidPixels) {
  const auto intr = lytro_illum_intrinsics();
  Plane<double> z(1, 3);
  z << 1.0, 0.0, 2.0;
  const DepthMap dm = DepthMap::from_positive(z);
  const DisparityMap d = disparity_from_depth(dm, intr);
  EXPECT_TRUE(d.mask(0, 0));
  EXPECT_FALSE(d.mask(0, 1));
  EXPECT_EQ(d.values(0, 1), 0.0);
  EXPECT_NEAR(d.values(0, 2), 27e-5 * 521.4 / 2.0, 1e-15);
}

TEST(Intrinsics, MicrolensDerivation) {
  const auto m = microlens_intrinsics(lytro_illum_main_lens());
  EXPECT_NEAR(m.focal_length_px, 7299.7 / 14.0, 1e-12);
  EXPECT_NEAR(m.focal_length_px, 521.4, 0.05);
  EXPECT_NEAR(m.principal_x, 285.11, 0.05);
  MainLens bad = lytro_illum_main_lens();
  bad.radius_m = 0.0;
  EXPECT_THROW(microlens_intrinsics(bad), DomainError);
}

TEST(Intrinsics, ValidateChecksMainLensConsistency) {
  auto intr = lytro_illum_intrinsics();
  EXPECT_NO_THROW(intr.validate());
  intr.focal_length_px = 530.0;
  EXPECT_THROW(intr.validate(), DomainError);
}

TEST(Subapertures, RadiusSevenGivesStrictCircleCount) {
  // Lattice points with i² + j² < 36 on the 13×13 grid, counted row by row.
  int expected = 0;
  for (int i = -6; i <= 6; ++i)
    for (int j = -6; j <= 6; ++j) expected += (i * i + j * j < 36);
  EXPECT_EQ(expected, 109);
  EXPECT_EQ(valid_subaperture_mask(7).count(), expected);
  EXPECT_THROW(valid_subaperture_mask(1), DomainError);
}

TEST(LightFieldType, SubapertureIndexing) {
  LightField lf;
  lf.intrinsics = lytro_illum_intrinsics(3);
  for (int k = 0; k < 9; ++k) lf.views.emplace_back(4, 5, 1, k / 10.0);
  EXPECT_NO_THROW(lf.validate());
  EXPECT_DOUBLE_EQ(subaperture(lf, 1, 2)[0](0, 0), 0.5);
  EXPECT_THROW(subaperture(lf, 3, 0), IndexError);
  lf.views[0][0](0, 0) = 1.5;
  EXPECT_THROW(lf.validate(), DomainError);
}
