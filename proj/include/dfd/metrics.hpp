#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "losses.hpp"
#include "numeric.hpp"
#include "raster.hpp"

namespace dfd {

/// Standard monocular depth benchmark errors and threshold accuracies.
struct MetricsReport {
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double rmse = 0.0;      // meters
  double log_rmse = 0.0;  // natural log
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  std::size_t n_pixels = 0;
};

inline constexpr double delta_base = 1.25;

/// Evaluates `pred` against `gt` over pixels whose flag is set and whose
/// ground truth does not exceed `cap` meters.
///   abs_rel  = mean |p - g| / g
///   sq_rel   = mean (p - g)^2 / g
///   rmse     = sqrt(mean (p - g)^2)
///   log_rmse = sqrt(mean (ln p - ln g)^2)
///   delta_i  = fraction with max(p/g, g/p) < 1.25^i  (strict)
inline MetricsReport evaluate(const Grid2D& pred, const Grid2D& gt,
                              std::span<const std::uint8_t> valid,
                              double cap = default_max_depth) {
  detail::require(pred.same_extent(gt), Errc::dimension_mismatch,
                  "prediction and ground truth extents differ");
  detail::require(valid.size() == gt.values.size(), Errc::dimension_mismatch,
                  "validity flags do not match the depth extent");
  detail::require(cap > 0.0, Errc::invalid_argument, "depth cap must be positive");

  const double t1 = delta_base, t2 = t1 * t1, t3 = t2 * t1;
  std::vector<double> abs_rel, sq_rel, sq, log_sq, d1, d2, d3;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (!valid[i]) continue;
    const double g = gt.values[i];
    const double p = pred.values[i];
    if (g > cap) continue;
    detail::require(g > 0.0 && p > 0.0 && std::isfinite(p), Errc::out_of_range,
                    "depths must be positive on evaluated pixels");
    const double e = p - g;
    abs_rel.push_back(std::abs(e) / g);
    sq_rel.push_back(e * e / g);
    sq.push_back(e * e);
    const double le = std::log(p) - std::log(g);
    log_sq.push_back(le * le);
    const double ratio = std::max(p / g, g / p);
    d1.push_back(ratio < t1 ? 1.0 : 0.0);
    d2.push_back(ratio < t2 ? 1.0 : 0.0);
    d3.push_back(ratio < t3 ? 1.0 : 0.0);
  }
  detail::require(!abs_rel.empty(), Errc::empty_input, "no valid pixels within the depth cap");

  MetricsReport r;
  r.n_pixels = abs_rel.size();
  r.abs_rel = pairwise_mean(abs_rel);
  r.sq_rel = pairwise_mean(sq_rel);
  r.rmse = std::sqrt(pairwise_mean(sq));
  r.log_rmse = std::sqrt(pairwise_mean(log_sq));
  r.delta1 = pairwise_mean(d1);
  r.delta2 = pairwise_mean(d2);
  r.delta3 = pairwise_mean(d3);
  return r;
}

/// Pixels valid in both maps are evaluated.
inline MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt,
                              double cap = default_max_depth) {
  detail::require(pred.same_extent(gt), Errc::dimension_mismatch,
                  "prediction and ground truth extents differ");
  std::vector<std::uint8_t> both(gt.pixels());
  for (std::size_t i = 0; i < both.size(); ++i) both[i] = pred.valid()[i] && gt.valid()[i];
  return evaluate(Grid2D::from(pred), Grid2D::from(gt), both, cap);
}

/// Unweighted mean of per-image reports; n_pixels is the total.
inline MetricsReport average(std::span<const MetricsReport> reports) {
  detail::require(!reports.empty(), Errc::empty_input, "no reports to average");
  MetricsReport m;
  for (const auto& r : reports) {
    m.abs_rel += r.abs_rel;
    m.sq_rel += r.sq_rel;
    m.rmse += r.rmse;
    m.log_rmse += r.log_rmse;
    m.delta1 += r.delta1;
    m.delta2 += r.delta2;
    m.delta3 += r.delta3;
    m.n_pixels += r.n_pixels;
  }
  const double n = static_cast<double>(reports.size());
  m.abs_rel /= n;
  m.sq_rel /= n;
  m.rmse /= n;
  m.log_rmse /= n;
  m.delta1 /= n;
  m.delta2 /= n;
  m.delta3 /= n;
  return m;
}

}  // namespace dfd
