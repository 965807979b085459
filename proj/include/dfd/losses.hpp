#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "raster.hpp"

namespace dfd {

/// Double-precision row-major 2-D field. Used for transform coefficients and
/// for depth values that should not be rounded to float.
struct Grid2D {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Grid2D() = default;
  Grid2D(int w, int h, std::vector<double> v) : width(w), height(h), values(std::move(v)) {
    detail::require(w >= 1 && h >= 1 && values.size() == static_cast<std::size_t>(w) * h,
                    Errc::dimension_mismatch, "grid size does not match its extent");
  }
  Grid2D(int w, int h, double fill = 0.0)
      : Grid2D(w, h, std::vector<double>(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0), fill)) {}

  template <int C>
  static Grid2D from(const Raster<C>& r, int channel = 0) {
    std::vector<double> v(r.pixels());
    auto d = r.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = d[i * C + channel];
    return {r.width(), r.height(), std::move(v)};
  }
  static Grid2D from(const DepthMap& d) { return from(d.map()); }

  double operator()(int x, int y) const noexcept {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  double& operator()(int x, int y) noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
  bool same_extent(const Grid2D& o) const noexcept { return width == o.width && height == o.height; }
};

inline constexpr double freq_loss_weight = 0.1;
inline constexpr double adv_loss_weight = 0.1;

struct LossReport {
  double l_spafid = 0.0;
  double l_freq = 0.0;
  std::optional<double> l_adv;
  double l_total = 0.0;
  double w_freq = freq_loss_weight;
  double w_adv = adv_loss_weight;
};

namespace detail {

inline void require_same_extent(const Grid2D& a, const Grid2D& b) {
  require(a.same_extent(b), Errc::dimension_mismatch,
          std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
              std::to_string(b.width) + "x" + std::to_string(b.height));
}

/// table[k * n + i] = cos(pi / n * (i + 1/2) * k)
inline std::vector<double> dct_table(int n) {
  std::vector<double> t(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      t[static_cast<std::size_t>(k) * n + i] =
          std::cos(std::numbers::pi / n * (i + 0.5) * k);
  return t;
}

// Applies `transform(table, in, out)` along rows then along columns.
template <typename Transform>
Grid2D separable(const Grid2D& in, Jobs jobs, Transform transform) {
  const int w = in.width, h = in.height;
  const auto row_table = dct_table(w);
  const auto col_table = h == w ? row_table : dct_table(h);

  Grid2D rows(w, h);
  parallel_for(h, jobs, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y)
      transform(row_table, w,
                std::span<const double>(in.values).subspan(static_cast<std::size_t>(y) * w, w),
                std::span<double>(rows.values).subspan(static_cast<std::size_t>(y) * w, w));
  });

  Grid2D out(w, h);
  parallel_for(w, jobs, [&](int x0, int x1) {
    std::vector<double> column(h), result(h);
    for (int x = x0; x < x1; ++x) {
      for (int y = 0; y < h; ++y) column[y] = rows(x, y);
      transform(col_table, h, std::span<const double>(column), std::span<double>(result));
      for (int y = 0; y < h; ++y) out(x, y) = result[y];
    }
  });
  return out;
}

inline void dct_apply(const std::vector<double>& table, int n, std::span<const double> in,
                      std::span<double> out) {
  for (int k = 0; k < n; ++k) {
    const double* c = table.data() + static_cast<std::size_t>(k) * n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += in[i] * c[i];
    out[k] = s;
  }
}

inline void idct_apply(const std::vector<double>& table, int n, std::span<const double> in,
                       std::span<double> out) {
  for (int i = 0; i < n; ++i) {
    double s = in[0];
    for (int k = 1; k < n; ++k) s += 2.0 * in[k] * table[static_cast<std::size_t>(k) * n + i];
    out[i] = s / n;
  }
}

}  // namespace detail

/// Unnormalized DCT-II of a sequence of length L:
///   X_k = sum_{i=0}^{L-1} x_i cos(pi / L * (i + 1/2) * k)
inline std::vector<double> dct(std::span<const double> x) {
  detail::require(!x.empty(), Errc::empty_input, "DCT of an empty sequence");
  const int n = static_cast<int>(x.size());
  std::vector<double> out(n);
  detail::dct_apply(detail::dct_table(n), n, x, out);
  return out;
}

/// Inverse of `dct` (a scaled DCT-III).
inline std::vector<double> idct(std::span<const double> coeffs) {
  detail::require(!coeffs.empty(), Errc::empty_input, "inverse DCT of an empty sequence");
  const int n = static_cast<int>(coeffs.size());
  std::vector<double> out(n);
  detail::idct_apply(detail::dct_table(n), n, coeffs, out);
  return out;
}

/// 2-D DCT: the 1-D transform along every row, then along every column.
inline Grid2D dct2(const Grid2D& map, Jobs jobs = {}) {
  return detail::separable(map, jobs, detail::dct_apply);
}
inline Grid2D dct2(const ScalarMap& map, Jobs jobs = {}) { return dct2(Grid2D::from(map), jobs); }

inline Grid2D idct2(const Grid2D& coeffs, Jobs jobs = {}) {
  return detail::separable(coeffs, jobs, detail::idct_apply);
}

/// Mean absolute error over pixels whose flag is set.
inline double spatial_fidelity(const Grid2D& pred, const Grid2D& gt,
                               std::span<const std::uint8_t> valid) {
  detail::require_same_extent(pred, gt);
  detail::require(valid.size() == pred.values.size(), Errc::dimension_mismatch,
                  "validity flags do not match the depth extent");
  std::vector<double> err;
  err.reserve(valid.size());
  for (std::size_t i = 0; i < valid.size(); ++i)
    if (valid[i]) err.push_back(std::abs(pred.values[i] - gt.values[i]));
  detail::require(!err.empty(), Errc::empty_input, "no valid pixels for the spatial loss");
  return pairwise_mean(err);
}

/// Mean absolute error over pixels valid in both maps.
inline double spatial_fidelity(const DepthMap& pred, const DepthMap& gt) {
  detail::require(pred.same_extent(gt), Errc::dimension_mismatch,
                  "prediction and ground truth extents differ");
  std::vector<std::uint8_t> both(gt.pixels());
  for (std::size_t i = 0; i < both.size(); ++i) both[i] = pred.valid()[i] && gt.valid()[i];
  return spatial_fidelity(Grid2D::from(pred), Grid2D::from(gt), both);
}

/// Mean absolute difference between the 2-D DCT spectra of the two maps,
/// taken over all coefficients.
inline double frequency_loss(const Grid2D& pred, const Grid2D& gt, Jobs jobs = {}) {
  detail::require_same_extent(pred, gt);
  const Grid2D a = dct2(pred, jobs);
  const Grid2D b = dct2(gt, jobs);
  std::vector<double> diff(a.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(a.values[i] - b.values[i]);
  return pairwise_mean(diff);
}

inline double frequency_loss(const DepthMap& pred, const DepthMap& gt, Jobs jobs = {}) {
  detail::require(pred.same_extent(gt), Errc::dimension_mismatch,
                  "prediction and ground truth extents differ");
  return frequency_loss(Grid2D::from(pred), Grid2D::from(gt), jobs);
}

/// Least-squares generator term: half the mean squared distance of the
/// discriminator scores from the "real" label 1.
inline double adversarial_loss_g(std::span<const double> scores) {
  detail::require(!scores.empty(), Errc::empty_input, "no discriminator scores");
  std::vector<double> sq(scores.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    detail::require(std::isfinite(scores[i]), Errc::out_of_range, "non-finite score");
    sq[i] = (scores[i] - 1.0) * (scores[i] - 1.0);
  }
  return 0.5 * pairwise_mean(sq);
}

inline LossReport total_loss(double l_spafid, double l_freq, std::optional<double> l_adv = {}) {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  detail::require(ok(l_spafid) && ok(l_freq) && (!l_adv || ok(*l_adv)), Errc::out_of_range,
                  "loss components must be finite and nonnegative");
  LossReport r;
  r.l_spafid = l_spafid;
  r.l_freq = l_freq;
  r.l_adv = l_adv;
  r.l_total = l_spafid + freq_loss_weight * l_freq + adv_loss_weight * l_adv.value_or(0.0);
  return r;
}

}  // namespace dfd
