#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "parallel.hpp"

namespace dfd {

struct KdeResult {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

inline constexpr int default_kde_points = 512;

/// Sample standard deviation with the n - 1 denominator.
inline double sample_stddev(std::span<const double> x) {
  detail::require(x.size() >= 2, Errc::empty_input, "need at least 2 samples");
  const double mean = pairwise_mean(x);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - mean) * (x[i] - mean);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(x.size() - 1));
}

/// Silverman's rule of thumb for a Gaussian kernel: (4 s^5 / (3 n))^(1/5).
inline double silverman_bandwidth(std::span<const double> samples) {
  detail::require(samples.size() >= 2, Errc::empty_input,
                  "Silverman's rule needs at least 2 samples, got " +
                      std::to_string(samples.size()));
  const double s = sample_stddev(samples);
  detail::require(s > 0.0, Errc::invalid_argument, "samples have zero variance");
  const double n = static_cast<double>(samples.size());
  return std::pow(4.0 * std::pow(s, 5) / (3.0 * n), 0.2);
}

/// Gaussian kernel density estimate evaluated on `grid`.
inline KdeResult gaussian_kde(std::span<const double> samples, std::span<const double> grid,
                              double bandwidth, Jobs jobs = {}) {
  detail::require(bandwidth > 0.0 && std::isfinite(bandwidth), Errc::invalid_argument,
                  "bandwidth must be positive");
  detail::require(!samples.empty(), Errc::empty_input, "no samples");
  detail::require(!grid.empty(), Errc::empty_input, "empty evaluation grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    detail::require(grid[i] > grid[i - 1], Errc::invalid_argument,
                    "evaluation grid must be strictly increasing");

  KdeResult r;
  r.bandwidth = bandwidth;
  r.grid.assign(grid.begin(), grid.end());
  r.density.assign(grid.size(), 0.0);
  const double norm =
      1.0 / (static_cast<double>(samples.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  parallel_for(static_cast<int>(grid.size()), jobs, [&](int g0, int g1) {
    std::vector<double> terms(samples.size());
    for (int g = g0; g < g1; ++g) {
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const double u = grid[g] - samples[i];
        terms[i] = std::exp(-u * u * inv);
      }
      r.density[g] = norm * pairwise_sum(terms);
    }
  });
  return r;
}

/// `points` evenly spaced positions over [min - 3h, max + 3h].
inline std::vector<double> default_kde_grid(std::span<const double> samples, double bandwidth,
                                            int points = default_kde_points) {
  detail::require(!samples.empty(), Errc::empty_input, "no samples");
  detail::require(points >= 2, Errc::invalid_argument, "grid needs at least 2 points");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 3.0 * bandwidth;
  const double hi = *hi_it + 3.0 * bandwidth;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
  return grid;
}

/// Silverman bandwidth plus the default grid.
inline KdeResult gaussian_kde(std::span<const double> samples, Jobs jobs = {}) {
  const double h = silverman_bandwidth(samples);
  const auto grid = default_kde_grid(samples, h);
  return gaussian_kde(samples, grid, h, jobs);
}

}  // namespace dfd
