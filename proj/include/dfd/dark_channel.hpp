#pragma once

#include <algorithm>
#include <string>

#include "error.hpp"
#include "parallel.hpp"
#include "raster.hpp"

namespace dfd {

inline constexpr int default_dark_window = 15;

/// Dark channel: for every pixel, the smallest colour sample among the three
/// channels of all pixels in a window x window square centred on it. Windows
/// are clipped to the image, so border pixels only see in-bounds neighbours.
///
/// A box minimum is separable, so this runs as a per-pixel channel minimum
/// followed by a horizontal and then a vertical 1-D minimum.
inline ScalarMap dark_channel(const RgbImage& img, int window = default_dark_window,
                              Jobs jobs = {}) {
  detail::require(window >= 1 && window % 2 == 1, Errc::invalid_argument,
                  "dark channel window must be an odd positive integer, got " +
                      std::to_string(window));
  const int w = img.width();
  const int h = img.height();
  const int half = window / 2;

  ScalarMap horizontal(w, h);
  parallel_for(h, jobs, [&](int y0, int y1) {
    std::vector<float> channel_min(w);
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x)
        channel_min[x] = std::min({img(x, y, 0), img(x, y, 1), img(x, y, 2)});
      for (int x = 0; x < w; ++x) {
        const int lo = std::max(0, x - half);
        const int hi = std::min(w - 1, x + half);
        horizontal(x, y) = *std::min_element(channel_min.begin() + lo, channel_min.begin() + hi + 1);
      }
    }
  });

  ScalarMap out(w, h);
  parallel_for(h, jobs, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      const int lo = std::max(0, y - half);
      const int hi = std::min(h - 1, y + half);
      for (int x = 0; x < w; ++x) {
        float m = horizontal(x, lo);
        for (int yy = lo + 1; yy <= hi; ++yy) m = std::min(m, horizontal(x, yy));
        out(x, y) = m;
      }
    }
  });
  return out;
}

}  // namespace dfd
