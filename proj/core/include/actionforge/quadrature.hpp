#pragma once

#include <span>
#include <vector>

namespace actionforge {

/// Sums a buffer by recursive halving. The bracketing is a fixed function of
/// the length, so results are reproducible bit-for-bit regardless of how the
/// values were produced, and roundoff grows like log(n) instead of n.
double pairwise_sum(std::span<const double> values);

/// Trapezoid rule on the equispaced periodic nodes t_j = j*T/K, j = 0..K-1.
/// For T-periodic integrands the end node coincides with the start, so the
/// rule collapses to (T/K) * sum f(t_j) and is spectrally accurate for smooth
/// integrands. This is the one quadrature used throughout.
template <class F>
double periodic_trapezoid(F&& f, double period, int nodes) {
  std::vector<double> vals(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) {
    vals[static_cast<std::size_t>(j)] = f(period * j / nodes);
  }
  return (period / nodes) * pairwise_sum(vals);
}

}  // namespace actionforge
