#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace dfd;

TEST(Lddcv, ConstantInputsGiveZero) {
  const ScalarMap dark(5, 4, 0.3f);
  const RgbImage img(5, 4, 0.6f);
  const LddcvMap c = lddcv(dark, img);
  for (float v : c.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Lddcv, CentrePeakReachesAllNinePixels) {
  ScalarMap dark(3, 3, 0.0f);
  dark(1, 1) = 1.0f;
  const RgbImage img(3, 3, 0.4f);
  const LddcvMap c = lddcv(dark, img);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) {
      EXPECT_EQ(c(x, y, ldcv_channel), 1.0f);
      EXPECT_EQ(c(x, y, ldv_channel), 0.0f);
    }
}

TEST(Lddcv, SinglePixel) {
  const LddcvMap c = lddcv(ScalarMap(1, 1, 0.8f), RgbImage(1, 1, 0.1f));
  EXPECT_EQ(c(0, 0, 0), 0.0f);
  EXPECT_EQ(c(0, 0, 1), 0.0f);
}

TEST(Lddcv, ImageChannelTakesMaxOverNeighboursAndColours) {
  RgbImage img(2, 1, 0.5f);
  img(1, 0, 2) = 0.9f;  // blue differs by 0.4
  img(1, 0, 0) = 0.4f;  // red differs by 0.1
  const LddcvMap c = lddcv(ScalarMap(2, 1), img);
  EXPECT_FLOAT_EQ(c(0, 0, ldv_channel), 0.4f);
  EXPECT_FLOAT_EQ(c(1, 0, ldv_channel), 0.4f);
}

TEST(Lddcv, DimensionMismatch) {
  EXPECT_THROW(lddcv(ScalarMap(3, 3), RgbImage(3, 2)), Error);
}

TEST(Lddcv, InvariantUnderConstantShift) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<float> u(0.0f, 0.5f);
  std::vector<float> dv(12 * 9), iv(12 * 9 * 3);
  for (auto& v : dv) v = u(rng);
  for (auto& v : iv) v = u(rng);
  // 0.25 is a power of two, so shifting values in [0, 0.5] is exact.
  std::vector<float> dv2 = dv, iv2 = iv;
  for (auto& v : dv2) v += 0.25f;
  for (auto& v : iv2) v += 0.25f;
  const LddcvMap a = lddcv(ScalarMap(12, 9, dv), RgbImage(12, 9, iv));
  const LddcvMap b = lddcv(ScalarMap(12, 9, dv2), RgbImage(12, 9, iv2));
  EXPECT_LE(test::max_abs_diff(a.data(), b.data()), 1e-7f);
}

TEST(ValidityMask, StrictThreshold) {
  LddcvMap c(3, 1);
  c(0, 0, 0) = 0.04f;
  c(1, 0, 1) = 0.05f;
  c(2, 0, 0) = 0.051f;
  const ValidityMask m = validity_mask(c, 0.05);
  EXPECT_EQ(m(0, 0), 0);
  EXPECT_EQ(m(1, 0), 0);
  EXPECT_EQ(m(2, 0), 1);
}

TEST(ValidityMask, ZeroMapAndZeroThreshold) {
  LddcvMap c(4, 2);
  EXPECT_EQ(validity_mask(c).count(), 0u);
  c(3, 1, 1) = 1e-6f;
  const ValidityMask m = validity_mask(c, 0.0);
  EXPECT_EQ(m(3, 1), 1);
  EXPECT_EQ(m.count(), 1u);
}

TEST(ValidityMask, ThresholdRange) {
  LddcvMap c(1, 1);
  EXPECT_THROW(validity_mask(c, -0.1), Error);
  EXPECT_THROW(validity_mask(c, 1.0), Error);
}

TEST(ValidityMask, MonotoneNonincreasingInThreshold) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(20 * 20 * 2);
  for (auto& x : v) x = u(rng) * u(rng);
  const LddcvMap c(20, 20, v);
  std::size_t prev = c.pixels();
  for (double t = 0.0; t < 1.0; t += 0.01) {
    const ValidityMask m = validity_mask(c, t);
    ASSERT_LE(m.count(), prev);
    prev = m.count();
  }
}

TEST(CueFile, PlanarRoundTrip) {
  test::TempDir dir("cues");
  std::mt19937 rng(2);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(7 * 3 * 2);
  for (auto& x : v) x = u(rng);
  const LddcvMap c(7, 3, v);
  write_cues(c, dir / "c.raw");
  EXPECT_EQ(read_cues(dir / "c.raw"), c);
  // plane layout: header height is doubled, first plane is LDCV
  const ScalarMap planes = read_raw(dir / "c.raw");
  EXPECT_EQ(planes.height(), 6);
  EXPECT_EQ(planes(2, 1), c(2, 1, ldcv_channel));
  EXPECT_EQ(planes(2, 4), c(2, 1, ldv_channel));
}

TEST(Profile, AllZeroRadiiGiveSingleBin) {
  LddcvMap c(2, 2);
  for (int i = 0; i < 4; ++i) {
    c.data()[2 * i] = 0.1f * (i + 1);
    c.data()[2 * i + 1] = 0.2f;
  }
  const auto p = blur_cue_profile(c, ScalarMap(2, 2, 0.0f), 10);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].center, 0.0);
  EXPECT_EQ(p[0].count, 4u);
  EXPECT_NEAR(*p[0].mean_ldcv, 0.25, 1e-7);
  EXPECT_NEAR(*p[0].mean_ldv, 0.2, 1e-7);
}

TEST(Profile, ConstantCueEveryPopulatedBin) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> r(30 * 30);
  for (auto& v : r) v = u(rng);
  const LddcvMap c(30, 30, 0.3f);
  const auto p = blur_cue_profile(c, ScalarMap(30, 30, r), 20);
  ASSERT_EQ(p.size(), 20u);
  std::size_t total = 0;
  for (const auto& b : p) {
    total += b.count;
    if (b.count == 0) {
      EXPECT_FALSE(b.mean_ldcv.has_value());
      continue;
    }
    EXPECT_NEAR(*b.mean_ldcv, 0.3, 1e-7);
    EXPECT_NEAR(*b.mean_ldv, 0.3, 1e-7);
  }
  EXPECT_EQ(total, 900u);
  EXPECT_DOUBLE_EQ(p.front().center, 0.025);
  EXPECT_DOUBLE_EQ(p.back().center, 0.975);
}

TEST(Profile, EmptyBinsFlagged) {
  const LddcvMap c(2, 1, 0.5f);
  const auto p = blur_cue_profile(c, ScalarMap(2, 1, std::vector<float>{0.0f, 2.0f}), 4);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[0].count, 1u);
  EXPECT_EQ(p[1].count, 0u);
  EXPECT_FALSE(p[1].mean_ldv.has_value());
  EXPECT_EQ(p[3].count, 1u);  // normalized radius 1 lands in the last bin
}

TEST(Profile, Errors) {
  const LddcvMap c(2, 2);
  EXPECT_THROW(blur_cue_profile(c, ScalarMap(2, 3), 4), Error);
  EXPECT_THROW(blur_cue_profile(c, ScalarMap(2, 2), 1), Error);
  EXPECT_THROW(blur_cue_profile(c, ScalarMap(2, 2, -1.0f), 4), Error);
}

TEST(Profile, BlurredHalfHasLowerCues) {
  // Left half sharp (r = 0), right half blurred with r = 4 px.
  std::mt19937 rng(21);
  const int w = 96, h = 64;
  const RgbImage img = test::random_image(w, h, rng);
  ScalarMap radii(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = w / 2; x < w; ++x) radii(x, y) = 4.0f;
  const RgbImage blurred = synthesize_from_radii(img, radii);
  const LddcvMap c = lddcv(dark_channel(blurred, 3), blurred);
  const auto p = blur_cue_profile(c, radii, 2);
  ASSERT_EQ(p.size(), 2u);
  ASSERT_EQ(p[0].count, p[1].count);
  EXPECT_LT(*p[1].mean_ldcv, *p[0].mean_ldcv);
  EXPECT_LT(*p[1].mean_ldv, *p[0].mean_ldv);
}
