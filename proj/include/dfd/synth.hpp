#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "raster.hpp"

namespace dfd {

inline constexpr double default_truncation = 3.0;

/// Radii below this many pixels use the identity kernel.
inline constexpr double min_blur_radius = 0.25;

/// Depth-independent part of the thin-lens blur radius, in pixels. It is also
/// the limit of the radius as depth goes to infinity.
inline double blur_radius_scale(const CameraParams& cam) {
  const double f = cam.focal_length();
  return (1.0 / (std::sqrt(2.0) * cam.pixel_pitch())) *
         (cam.aperture() * f / (cam.focus_distance() - f));
}

/// Thin-lens defocus blur radius in pixels for an object at `depth` meters.
inline double blur_radius(double depth, const CameraParams& cam) {
  detail::require(depth > 0.0 && std::isfinite(depth), Errc::out_of_range,
                  "depth must be positive, got " + std::to_string(depth));
  return blur_radius_scale(cam) * std::abs(depth - cam.focus_distance()) / depth;
}

/// Per-pixel blur radius map. Invalid depth pixels get radius 0.
inline ScalarMap blur_radius(const DepthMap& depth, const CameraParams& cam) {
  ScalarMap out(depth.width(), depth.height());
  auto d = depth.data();
  auto v = depth.valid();
  auto r = out.data();
  for (std::size_t i = 0; i < d.size(); ++i)
    r[i] = v[i] ? static_cast<float>(blur_radius(static_cast<double>(d[i]), cam)) : 0.0f;
  return out;
}

/// Square normalized Gaussian point spread function of side 2 * half + 1.
struct Psf {
  int half = 0;
  std::vector<double> weights;  // row-major, side * side

  int side() const noexcept { return 2 * half + 1; }
  double operator()(int x, int y) const noexcept {
    return weights[static_cast<std::size_t>(y + half) * side() + (x + half)];
  }
};

namespace detail {

inline void check_psf_args(double radius, double truncation) {
  require(radius >= 0.0 && std::isfinite(radius), Errc::invalid_argument,
          "blur radius must be nonnegative, got " + std::to_string(radius));
  require(truncation > 0.0 && std::isfinite(truncation), Errc::invalid_argument,
          "kernel truncation must be positive");
}

inline int psf_half_width(double radius, double truncation) {
  return radius < min_blur_radius ? 0 : static_cast<int>(std::ceil(truncation * radius));
}

/// Unnormalized 1-D Gaussian profile exp(-x^2 / (2 r^2)) for x in [-half, half].
inline std::vector<double> gaussian_profile(double radius, int half) {
  std::vector<double> g(2 * half + 1, 1.0);
  if (half == 0) return g;
  const double inv = 1.0 / (2.0 * radius * radius);
  for (int x = -half; x <= half; ++x) g[x + half] = std::exp(-static_cast<double>(x) * x * inv);
  return g;
}

}  // namespace detail

/// Gaussian PSF of standard deviation `radius` pixels, truncated at
/// ceil(truncation * radius) and renormalized to unit sum. Radii below
/// `min_blur_radius` give the 1x1 identity kernel.
inline Psf gaussian_psf(double radius, double truncation = default_truncation) {
  detail::check_psf_args(radius, truncation);
  Psf psf;
  psf.half = detail::psf_half_width(radius, truncation);
  const int side = psf.side();
  psf.weights.assign(static_cast<std::size_t>(side) * side, 1.0);
  if (psf.half == 0) return psf;
  const double inv = 1.0 / (2.0 * radius * radius);
  double total = 0.0;
  for (int y = -psf.half; y <= psf.half; ++y)
    for (int x = -psf.half; x <= psf.half; ++x) {
      const double w = std::exp(-static_cast<double>(x * x + y * y) * inv);
      psf.weights[static_cast<std::size_t>(y + psf.half) * side + (x + psf.half)] = w;
      total += w;
    }
  for (double& w : psf.weights) w /= total;
  return psf;
}

/// Spatially varying Gaussian blur. Each output pixel gathers its
/// neighbourhood with the kernel of its own radius; taps that fall outside
/// the image are dropped and the remaining weights renormalized.
///
/// The Gaussian is separable and the in-bounds support is always a
/// rectangle, so the 2-D weight and its border normalizer both factor into
/// products of 1-D profiles. One profile is built per distinct radius before
/// the parallel phase.
inline RgbImage synthesize_from_radii(const RgbImage& img, const ScalarMap& radii,
                                      double truncation = default_truncation, Jobs jobs = {}) {
  detail::require(img.same_extent(radii), Errc::dimension_mismatch,
                  "image is " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                      ", radius map is " + std::to_string(radii.width()) + "x" +
                      std::to_string(radii.height()));
  detail::check_psf_args(0.0, truncation);

  struct Profile {
    int half;
    std::vector<double> g;
  };
  std::vector<Profile> profiles;
  std::unordered_map<float, int> lookup;
  std::vector<int> which(radii.pixels());
  auto r = radii.data();
  for (std::size_t i = 0; i < r.size(); ++i) {
    auto [it, inserted] = lookup.try_emplace(r[i], static_cast<int>(profiles.size()));
    if (inserted) {
      const double radius = r[i];
      detail::check_psf_args(radius, truncation);
      const int half = detail::psf_half_width(radius, truncation);
      profiles.push_back({half, detail::gaussian_profile(radius, half)});
    }
    which[i] = it->second;
  }

  const int w = img.width();
  const int h = img.height();
  RgbImage out(w, h);
  parallel_for(h, jobs, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const Profile& k = profiles[which[static_cast<std::size_t>(y) * w + x]];
        if (k.half == 0) {
          for (int c = 0; c < 3; ++c) out(x, y, c) = img(x, y, c);
          continue;
        }
        const int dx_lo = std::max(-k.half, x - (w - 1)), dx_hi = std::min(k.half, x);
        const int dy_lo = std::max(-k.half, y - (h - 1)), dy_hi = std::min(k.half, y);
        double acc[3] = {0.0, 0.0, 0.0};
        double norm_x = 0.0, norm_y = 0.0;
        for (int dx = dx_lo; dx <= dx_hi; ++dx) norm_x += k.g[dx + k.half];
        for (int dy = dy_lo; dy <= dy_hi; ++dy) {
          const double gy = k.g[dy + k.half];
          norm_y += gy;
          double row[3] = {0.0, 0.0, 0.0};
          for (int dx = dx_lo; dx <= dx_hi; ++dx) {
            const double gx = k.g[dx + k.half];
            for (int c = 0; c < 3; ++c) row[c] += gx * img(x - dx, y - dy, c);
          }
          for (int c = 0; c < 3; ++c) acc[c] += gy * row[c];
        }
        const double norm = norm_x * norm_y;
        for (int c = 0; c < 3; ++c)
          out(x, y, c) = static_cast<float>(std::clamp(acc[c] / norm, 0.0, 1.0));
      }
    }
  });
  return out;
}

/// Defocused rendering of an all-in-focus image given its depth map and
/// the camera that would have captured it.
inline RgbImage synthesize_defocus(const RgbImage& img, const DepthMap& depth,
                                   const CameraParams& cam,
                                   double truncation = default_truncation, Jobs jobs = {}) {
  detail::require(img.width() == depth.width() && img.height() == depth.height(),
                  Errc::dimension_mismatch,
                  "image is " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                      ", depth is " + std::to_string(depth.width()) + "x" +
                      std::to_string(depth.height()));
  return synthesize_from_radii(img, blur_radius(depth, cam), truncation, jobs);
}

}  // namespace dfd
