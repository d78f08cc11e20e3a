#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace motion_insight {

/// Linear-interpolated percentile (q in [0, 100]) of already sorted values.
double percentile_sorted(std::span<const double> sorted, double q);

/// Collects the finite entries of `values` where `flags` has the valid bit.
std::vector<double> valid_values(std::span<const double> values,
                                 std::span<const std::uint8_t> flags);

struct RunningMoments {
  std::size_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    ++count;
    sum += v;
    sum_sq += v * v;
  }
};

}  // namespace motion_insight
