#pragma once

#include <cstddef>
#include <span>

namespace dfd {

/// Pairwise (cascade) summation in a fixed order: the result depends only
/// on the input sequence, and the rounding error grows as O(log n).
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t leaf = 16;
  if (v.size() <= leaf) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_mean(std::span<const double> v) {
  return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace dfd
