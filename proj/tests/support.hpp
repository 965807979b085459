#pragma once

// Test fixtures and reference implementations. The oracles here are
// deliberately naive direct transcriptions of the defining formulas and
// share no code with the library paths they check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dfd/dfd.hpp"

namespace dfd::test {

inline RgbImage random_image(int w, int h, std::mt19937& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> data(static_cast<std::size_t>(w) * h * 3);
  for (auto& v : data) v = u(rng);
  return {w, h, std::move(data)};
}

/// Blocky random texture: independent random colours on cells of `cell` px.
inline RgbImage textured_image(int w, int h, int cell, std::mt19937& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  const int cw = (w + cell - 1) / cell, ch = (h + cell - 1) / cell;
  std::vector<float> cells(static_cast<std::size_t>(cw) * ch * 3);
  for (auto& v : cells) v = u(rng);
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        img(x, y, c) = cells[(static_cast<std::size_t>(y / cell) * cw + x / cell) * 3 + c];
  return img;
}

/// Multi-scale random texture: the mean of blocky layers whose cell sizes
/// double from `finest` to `coarsest`, a rough stand-in for natural scenes.
inline RgbImage multiscale_texture(int w, int h, int finest, int coarsest, std::mt19937& rng) {
  std::vector<RgbImage> layers;
  for (int cell = finest; cell <= coarsest; cell *= 2) layers.push_back(textured_image(w, h, cell, rng));
  std::vector<float> acc(static_cast<std::size_t>(w) * h * 3, 0.0f);
  for (const auto& layer : layers) {
    auto d = layer.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i] / static_cast<float>(layers.size());
  }
  for (auto& v : acc) v = std::min(v, 1.0f);
  return {w, h, std::move(acc)};
}

inline DepthMap constant_depth(int w, int h, float meters) {
  return {w, h, std::vector<float>(static_cast<std::size_t>(w) * h, meters)};
}

/// Left half at `left`, right half at `right`.
inline DepthMap two_level_depth(int w, int h, float left, float right) {
  std::vector<float> d(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) d[static_cast<std::size_t>(y) * w + x] = x < w / 2 ? left : right;
  return {w, h, std::move(d)};
}

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("dfd_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

/// Writes raw PNG samples of any layout libpng accepts (for error-path tests).
inline void write_png_samples(const std::filesystem::path& path, int w, int h, int channels,
                              int bits, const std::vector<std::uint16_t>& samples) {
  detail::write_png(path, w, h, channels, bits, samples);
}

/// NYU-style layout: <root>/rgb/<id>.png (8-bit) and <root>/depth/<id>.png
/// (16-bit millimeters, with a few zero holes), plus `split.txt`.
inline void write_rgbd_fixture(const std::filesystem::path& root,
                               const std::vector<std::string>& ids, int w, int h,
                               unsigned seed) {
  std::filesystem::create_directories(root / "rgb");
  std::filesystem::create_directories(root / "depth");
  std::mt19937 rng(seed);
  std::ofstream split(root / "split.txt");
  for (const auto& id : ids) {
    split << id << "\n";
    const RgbImage img = textured_image(w, h, 4, rng);
    write_rgb(img, root / "rgb" / (id + ".png"), 8);
    std::uniform_int_distribution<int> near(500, 1500), far(2000, 9000);
    const int a = near(rng), b = far(rng);
    std::vector<std::uint16_t> mm(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        mm[static_cast<std::size_t>(y) * w + x] =
            static_cast<std::uint16_t>(x < w / 3 ? a : (x < 2 * w / 3 ? 700 : b));
    mm[0] = 0;
    write_png_samples(root / "depth" / (id + ".png"), w, h, 1, 16, mm);
  }
}

// ---- oracles ---------------------------------------------------------------

inline ScalarMap brute_force_dark_channel(const RgbImage& img, int window) {
  const int half = window / 2;
  ScalarMap out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      float m = 1.0f;
      for (int q = y - half; q <= y + half; ++q)
        for (int p = x - half; p <= x + half; ++p) {
          if (p < 0 || q < 0 || p >= img.width() || q >= img.height()) continue;
          for (int c = 0; c < 3; ++c) m = std::min(m, img(p, q, c));
        }
      out(x, y) = m;
    }
  return out;
}

/// Convolution of the whole image with one 2-D kernel, renormalizing over
/// in-bounds taps at the border.
inline RgbImage dense_convolution(const RgbImage& img, const Psf& psf) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double acc[3] = {0, 0, 0};
      double norm = 0.0;
      for (int ky = -psf.half; ky <= psf.half; ++ky)
        for (int kx = -psf.half; kx <= psf.half; ++kx) {
          const int sx = x - kx, sy = y - ky;
          if (sx < 0 || sy < 0 || sx >= img.width() || sy >= img.height()) continue;
          const double w = psf(kx, ky);
          norm += w;
          for (int c = 0; c < 3; ++c) acc[c] += w * img(sx, sy, c);
        }
      for (int c = 0; c < 3; ++c) out(x, y, c) = static_cast<float>(acc[c] / norm);
    }
  return out;
}

/// Direct evaluation of X_k = sum_i x_i cos(pi/L (i + 1/2) k).
inline std::vector<double> direct_dct(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      out[k] += x[i] * std::cos(std::numbers::pi / n * (i + 0.5) * k);
  return out;
}

struct ScalarMetrics {
  double abs_rel, sq_rel, rmse, log_rmse, d1, d2, d3;
};

inline ScalarMetrics loop_metrics(const std::vector<double>& pred, const std::vector<double>& gt) {
  double a = 0, s = 0, r = 0, l = 0, d1 = 0, d2 = 0, d3 = 0;
  const double n = static_cast<double>(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double p = pred[i], g = gt[i];
    a += std::fabs(p - g) / g;
    s += (p - g) * (p - g) / g;
    r += (p - g) * (p - g);
    l += std::pow(std::log(p) - std::log(g), 2);
    const double t = std::max(p / g, g / p);
    d1 += t < 1.25;
    d2 += t < 1.25 * 1.25;
    d3 += t < 1.25 * 1.25 * 1.25;
  }
  return {a / n, s / n, std::sqrt(r / n), std::sqrt(l / n), d1 / n, d2 / n, d3 / n};
}

/// Trapezoidal integral of the density evaluated on a uniform grid.
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return s;
}

inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + step * static_cast<double>(i));
  return g;
}

inline float max_abs_diff(std::span<const float> a, std::span<const float> b) {
  float m = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace dfd::test
