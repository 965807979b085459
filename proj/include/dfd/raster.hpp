#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace dfd {

/// Row-major raster of float samples with `Channels` interleaved channels,
/// top-left origin. Immutable once built apart from the explicit mutable
/// accessors used while filling it.
template <int Channels>
class Raster {
  static_assert(Channels >= 1);

public:
  static constexpr int channels = Channels;

  Raster() = default;

  Raster(int width, int height, float fill = 0.0f)
      : width_(width), height_(height) {
    check_extent(width, height);
    data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
  }

  Raster(int width, int height, std::vector<float> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_extent(width, height);
    detail::require(data_.size() == static_cast<std::size_t>(width) * height * Channels,
                    Errc::dimension_mismatch,
                    "sample count " + std::to_string(data_.size()) + " does not match " +
                        std::to_string(width) + "x" + std::to_string(height) + "x" +
                        std::to_string(Channels));
    for (float v : data_)
      detail::require(std::isfinite(v), Errc::out_of_range, "non-finite sample");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixels() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const noexcept { return data_.empty(); }

  float operator()(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }
  float& operator()(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  std::span<const float> row(int y) const noexcept {
    return std::span<const float>(data_).subspan(
        static_cast<std::size_t>(y) * width_ * Channels,
        static_cast<std::size_t>(width_) * Channels);
  }

  template <int Other>
  bool same_extent(const Raster<Other>& o) const noexcept {
    return width_ == o.width() && height_ == o.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

private:
  static void check_extent(int w, int h) {
    detail::require(w >= 1 && h >= 1, Errc::invalid_argument,
                    "raster extent must be at least 1x1, got " + std::to_string(w) + "x" +
                        std::to_string(h));
  }

  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * Channels + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Unitless scalar field (dark channel, blur radius in pixels, ...).
using ScalarMap = Raster<1>;

/// Normalized colour image, interleaved R,G,B in [0,1].
class RgbImage : public Raster<3> {
public:
  RgbImage() = default;
  RgbImage(int width, int height, float fill = 0.0f) : Raster<3>(width, height, fill) {
    check_range();
  }
  RgbImage(int width, int height, std::vector<float> data)
      : Raster<3>(width, height, std::move(data)) {
    check_range();
  }

private:
  void check_range() const {
    for (float v : data())
      if (!(v >= 0.0f && v <= 1.0f))
        throw Error(Errc::out_of_range, "colour sample " + std::to_string(v) + " outside [0,1]");
  }
};

inline constexpr double default_max_depth = 10.0;

/// Metric depth in meters plus a per-pixel validity flag. Invalid pixels
/// (sensor holes) hold 0 and are skipped by every statistic.
class DepthMap {
public:
  DepthMap() = default;

  /// Every pixel valid; all samples must be finite, positive and within
  /// `default_max_depth`.
  DepthMap(int width, int height, std::vector<float> meters)
      : DepthMap(width, height, std::move(meters),
                 std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                               std::max(height, 0),
                                           1)) {}

  DepthMap(int width, int height, std::vector<float> meters, std::vector<std::uint8_t> valid,
           double max_depth = default_max_depth)
      : map_(width, height, std::move(meters)), valid_(std::move(valid)) {
    detail::require(valid_.size() == map_.pixels(), Errc::dimension_mismatch,
                    "validity flag count does not match depth extent");
    auto d = map_.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!valid_[i]) {
        d[i] = 0.0f;
        continue;
      }
      valid_[i] = 1;
      // Messages are built only on failure: this loop runs once per pixel.
      if (!(d[i] > 0.0f))
        throw Error(Errc::out_of_range, "depth must be positive, got " + std::to_string(d[i]));
      if (!(d[i] <= max_depth))
        throw Error(Errc::out_of_range, "depth " + std::to_string(d[i]) + " m exceeds maximum " +
                                            std::to_string(max_depth) + " m");
    }
  }

  int width() const noexcept { return map_.width(); }
  int height() const noexcept { return map_.height(); }
  std::size_t pixels() const noexcept { return map_.pixels(); }

  float operator()(int x, int y) const noexcept { return map_(x, y); }
  bool valid(int x, int y) const noexcept {
    return valid_[static_cast<std::size_t>(y) * width() + x] != 0;
  }

  std::span<const float> data() const noexcept { return map_.data(); }
  std::span<const std::uint8_t> valid() const noexcept { return valid_; }
  std::size_t valid_count() const noexcept {
    std::size_t n = 0;
    for (auto v : valid_) n += v;
    return n;
  }

  /// Depth samples as a plain scalar map (invalid pixels read 0).
  const ScalarMap& map() const noexcept { return map_; }

  template <int C>
  bool same_extent(const Raster<C>& o) const noexcept {
    return map_.same_extent(o);
  }
  bool same_extent(const DepthMap& o) const noexcept { return map_.same_extent(o.map_); }

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

private:
  ScalarMap map_;
  std::vector<std::uint8_t> valid_;
};

/// Thin-lens camera constants, all lengths in meters.
class CameraParams {
public:
  CameraParams(double focal_length, double f_number, double focus_distance, double pixel_pitch)
      : focal_length_(focal_length),
        f_number_(f_number),
        focus_distance_(focus_distance),
        pixel_pitch_(pixel_pitch) {
    detail::require(focal_length > 0, Errc::invalid_argument, "focal length must be positive");
    detail::require(f_number > 0, Errc::invalid_argument, "f-number must be positive");
    detail::require(pixel_pitch > 0, Errc::invalid_argument, "pixel pitch must be positive");
    detail::require(focus_distance > focal_length, Errc::invalid_argument,
                    "focus distance must exceed the focal length");
  }

  /// 9 mm lens at f/2 focused at 0.7 m on a 7.5 um pixel pitch sensor.
  static CameraParams nyu_synthetic() { return {0.009, 2.0, 0.7, 7.5e-6}; }

  double focal_length() const noexcept { return focal_length_; }
  double f_number() const noexcept { return f_number_; }
  double focus_distance() const noexcept { return focus_distance_; }
  double pixel_pitch() const noexcept { return pixel_pitch_; }
  double aperture() const noexcept { return focal_length_ / f_number_; }

private:
  double focal_length_;
  double f_number_;
  double focus_distance_;
  double pixel_pitch_;
};

}  // namespace dfd
