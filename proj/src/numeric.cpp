#include "motion_insight/numeric.hpp"

#include <cmath>
#include <cstdint>

#include "motion_insight/kinematics.hpp"

namespace motion_insight {

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = (q / 100.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = lo + 1 < sorted.size() ? lo + 1 : lo;
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> valid_values(std::span<const double> values,
                                 std::span<const std::uint8_t> flags) {
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if ((flags[i] & frame_flags::kValid) && std::isfinite(values[i])) out.push_back(values[i]);
  }
  return out;
}

}  // namespace motion_insight
