#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "raster.hpp"

namespace dfd {

/// Two-channel local variation map. Channel order is fixed:
/// 0 = variation of the dark channel (LDCV), 1 = variation of the image (LDV).
using LddcvMap = Raster<2>;

inline constexpr int ldcv_channel = 0;
inline constexpr int ldv_channel = 1;
inline constexpr double default_mask_threshold = 0.05;

/// Binary per-pixel mask, values 0 or 1.
class ValidityMask {
public:
  ValidityMask(int width, int height, std::vector<std::uint8_t> bits)
      : width_(width), height_(height), bits_(std::move(bits)) {
    detail::require(width >= 1 && height >= 1 &&
                        bits_.size() == static_cast<std::size_t>(width) * height,
                    Errc::dimension_mismatch, "mask size does not match its extent");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint8_t operator()(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  friend bool operator==(const ValidityMask&, const ValidityMask&) = default;

private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

/// Largest absolute deviation between each pixel and its 3x3 neighbourhood
/// (clipped at the border), computed on the dark channel and on the image.
/// For the image the maximum also runs over the three colour channels.
inline LddcvMap lddcv(const ScalarMap& dark, const RgbImage& img, Jobs jobs = {}) {
  detail::require(dark.same_extent(img), Errc::dimension_mismatch,
                  "dark channel is " + std::to_string(dark.width()) + "x" +
                      std::to_string(dark.height()) + ", image is " +
                      std::to_string(img.width()) + "x" + std::to_string(img.height()));
  const int w = img.width();
  const int h = img.height();
  LddcvMap out(w, h);
  parallel_for(h, jobs, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      const int ylo = std::max(0, y - 1), yhi = std::min(h - 1, y + 1);
      for (int x = 0; x < w; ++x) {
        const int xlo = std::max(0, x - 1), xhi = std::min(w - 1, x + 1);
        float ldcv = 0.0f;
        float ldv = 0.0f;
        for (int q = ylo; q <= yhi; ++q) {
          for (int p = xlo; p <= xhi; ++p) {
            ldcv = std::max(ldcv, std::abs(dark(x, y) - dark(p, q)));
            for (int c = 0; c < 3; ++c) ldv = std::max(ldv, std::abs(img(x, y, c) - img(p, q, c)));
          }
        }
        out(x, y, ldcv_channel) = ldcv;
        out(x, y, ldv_channel) = ldv;
      }
    }
  });
  return out;
}

/// 1 where the larger of the two cue channels strictly exceeds `threshold`.
inline ValidityMask validity_mask(const LddcvMap& cues, double threshold = default_mask_threshold) {
  detail::require(threshold >= 0.0 && threshold < 1.0, Errc::invalid_argument,
                  "mask threshold must lie in [0,1), got " + std::to_string(threshold));
  // Compared at the cue map's own precision so that a stored 0.05f does not
  // exceed a threshold of 0.05.
  const float t = static_cast<float>(threshold);
  std::vector<std::uint8_t> bits(cues.pixels());
  auto data = cues.data();
  for (std::size_t i = 0; i < bits.size(); ++i)
    bits[i] = std::max(data[2 * i], data[2 * i + 1]) > t ? 1 : 0;
  return {cues.width(), cues.height(), std::move(bits)};
}

/// One row of the blur-level profile. Means are empty for bins with no pixels.
struct ProfileBin {
  double center = 0.0;
  std::optional<double> mean_ldcv;
  std::optional<double> mean_ldv;
  std::size_t count = 0;
};

/// Groups pixels by blur radius normalized to [0,1] by the maximum radius
/// and averages both cue channels per bin. `n_bins` equal-width bins; if
/// every radius is zero there is a single bin centred at 0.
inline std::vector<ProfileBin> blur_cue_profile(const LddcvMap& cues, const ScalarMap& radii,
                                                int n_bins) {
  detail::require(cues.same_extent(radii), Errc::dimension_mismatch,
                  "cue map and radius map extents differ");
  detail::require(n_bins >= 2, Errc::invalid_argument,
                  "profile needs at least 2 bins, got " + std::to_string(n_bins));
  auto r = radii.data();
  float r_max = 0.0f;
  for (float v : r) {
    detail::require(v >= 0.0f, Errc::out_of_range, "blur radii must be nonnegative");
    r_max = std::max(r_max, v);
  }
  auto c = cues.data();

  const int bins = r_max > 0.0f ? n_bins : 1;
  std::vector<double> sum_ldcv(bins, 0.0), sum_ldv(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    int b = 0;
    if (bins > 1) {
      const double t = static_cast<double>(r[i]) / r_max;
      b = std::min(bins - 1, static_cast<int>(t * bins));
    }
    sum_ldcv[b] += c[2 * i];
    sum_ldv[b] += c[2 * i + 1];
    ++count[b];
  }

  std::vector<ProfileBin> out(bins);
  for (int b = 0; b < bins; ++b) {
    out[b].center = bins > 1 ? (b + 0.5) / bins : 0.0;
    out[b].count = count[b];
    if (count[b] > 0) {
      out[b].mean_ldcv = sum_ldcv[b] / static_cast<double>(count[b]);
      out[b].mean_ldv = sum_ldv[b] / static_cast<double>(count[b]);
    }
  }
  return out;
}

/// Stores a cue map in the raw float format with the two channels stacked
/// as planes: header extent is width x (2 * height), LDCV plane first.
inline void write_cues(const LddcvMap& cues, const std::filesystem::path& path) {
  std::vector<float> planar(cues.pixels() * 2);
  auto d = cues.data();
  for (std::size_t i = 0; i < cues.pixels(); ++i) {
    planar[i] = d[2 * i];
    planar[cues.pixels() + i] = d[2 * i + 1];
  }
  detail::write_raw_samples(path, cues.width(), cues.height() * 2, planar);
}

inline LddcvMap read_cues(const std::filesystem::path& path) {
  auto raw = detail::read_raw_samples(path);
  if (raw.height % 2 != 0)
    throw Error(Errc::bad_format, path.string() + " does not hold two stacked planes");
  const int h = raw.height / 2;
  const std::size_t n = static_cast<std::size_t>(raw.width) * h;
  std::vector<float> interleaved(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    interleaved[2 * i] = raw.samples[i];
    interleaved[2 * i + 1] = raw.samples[n + i];
  }
  LddcvMap cues(raw.width, h, std::move(interleaved));
  for (float v : cues.data())
    if (!(v >= 0.0f && v <= 1.0f))
      throw Error(Errc::bad_format, path.string() + " holds a cue value outside [0,1]");
  return cues;
}

/// 8-bit greyscale PNG, 0 for masked-out pixels and 255 for valid ones.
inline void write_mask(const ValidityMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint16_t> samples(mask.bits().size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = mask.bits()[i] ? 255 : 0;
  detail::write_png(path, mask.width(), mask.height(), 1, 8, samples);
}

}  // namespace dfd
