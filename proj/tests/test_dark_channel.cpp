#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace dfd;

TEST(DarkChannel, ConstantImage) {
  const RgbImage img(6, 4, 0.5f);
  for (int w : {1, 3, 7, 31}) {
    const ScalarMap d = dark_channel(img, w);
    for (float v : d.data()) EXPECT_EQ(v, 0.5f);
  }
}

TEST(DarkChannel, CentreMinimumSpreadsToClippedWindows) {
  RgbImage img(3, 3, 1.0f);
  img(1, 1, 0) = 0.9f;
  img(1, 1, 1) = 0.2f;
  img(1, 1, 2) = 0.7f;
  const ScalarMap d = dark_channel(img, 3);
  for (float v : d.data()) EXPECT_EQ(v, 0.2f);
}

TEST(DarkChannel, WindowOneIsChannelMinimum) {
  std::mt19937 rng(1);
  const RgbImage img = test::random_image(9, 5, rng);
  const ScalarMap d = dark_channel(img, 1);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 9; ++x)
      EXPECT_EQ(d(x, y), std::min({img(x, y, 0), img(x, y, 1), img(x, y, 2)}));
}

TEST(DarkChannel, RejectsEvenOrNonPositiveWindow) {
  const RgbImage img(2, 2);
  for (int w : {0, -1, 2, 4, 16}) EXPECT_THROW(dark_channel(img, w), Error);
}

TEST(DarkChannel, MatchesBruteForceExactly) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const RgbImage img = test::random_image(32, 32, rng);
    for (int w : {1, 3, 5, 15}) {
      const ScalarMap fast = dark_channel(img, w, Jobs{3});
      EXPECT_EQ(fast, test::brute_force_dark_channel(img, w)) << "window " << w;
    }
  }
}

TEST(DarkChannel, WindowLargerThanImage) {
  std::mt19937 rng(5);
  const RgbImage img = test::random_image(4, 3, rng);
  const ScalarMap d = dark_channel(img, 99);
  const float global = *std::min_element(img.data().begin(), img.data().end());
  for (float v : d.data()) EXPECT_EQ(v, global);
}

TEST(DarkChannel, BoundedByChannelMinimumAndMonotoneInWindow) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const RgbImage img = test::random_image(17, 13, rng);
    const ScalarMap base = dark_channel(img, 1);
    ScalarMap prev = base;
    for (int w = 3; w <= 21; w += 2) {
      const ScalarMap cur = dark_channel(img, w);
      for (std::size_t i = 0; i < cur.pixels(); ++i) {
        ASSERT_LE(cur.data()[i], base.data()[i]);
        ASSERT_LE(cur.data()[i], prev.data()[i]);
      }
      prev = cur;
    }
  }
}

TEST(DarkChannel, IndependentOfWorkerCount) {
  std::mt19937 rng(13);
  const RgbImage img = test::random_image(40, 23, rng);
  EXPECT_EQ(dark_channel(img, 5, Jobs{1}), dark_channel(img, 5, Jobs{7}));
}
