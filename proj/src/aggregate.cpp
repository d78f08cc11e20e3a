#include "motion_insight/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "motion_insight/error.hpp"
#include "motion_insight/numeric.hpp"

namespace motion_insight {

namespace {
bool frame_ok(const SeriesSlice& s, std::size_t i) {
  return (s.flags[i] & frame_flags::kValid) && std::isfinite(s.values[i]);
}
}  // namespace

SeriesSlice slice_of(const BodyVariableSeries& series, Variable variable, std::int64_t start_frame,
                     std::int64_t end_frame) {
  const auto n = static_cast<std::int64_t>(series.size());
  const auto lo = std::clamp<std::int64_t>(start_frame, 0, n);
  const auto hi = std::clamp<std::int64_t>(end_frame, lo, n);
  const auto first = static_cast<std::size_t>(lo);
  const auto count = static_cast<std::size_t>(hi - lo);
  return {variable, lo, series.values(variable).subspan(first, count),
          std::span<const std::uint8_t>(series.flags).subspan(first, count)};
}

std::string_view to_string(SimplifyScope scope) {
  return scope == SimplifyScope::Global ? "global" : "selection";
}

std::optional<SimplifyScope> simplify_scope_from_string(std::string_view name) {
  if (name == "selection") return SimplifyScope::Selection;
  if (name == "global") return SimplifyScope::Global;
  return std::nullopt;
}

ScopeMoments moments_of(std::span<const SeriesSlice> slices) {
  ScopeMoments m;
  double sum = 0.0;
  for (const auto& s : slices) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (frame_ok(s, i)) {
        sum += s.values[i];
        ++m.count;
      }
    }
  }
  if (m.count == 0) return m;
  m.mean = sum / static_cast<double>(m.count);
  double ss = 0.0;
  for (const auto& s : slices) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (frame_ok(s, i)) {
        const double d = s.values[i] - m.mean;
        ss += d * d;
      }
    }
  }
  m.stddev = std::sqrt(ss / static_cast<double>(m.count));
  return m;
}

ScopeMoments selection_moments(Variable variable, std::span<const Event> events,
                               std::span<const BodyVariableSeries> series) {
  std::vector<SeriesSlice> slices;
  slices.reserve(events.size());
  for (const auto& e : events) {
    slices.push_back(slice_of(series[e.segment], variable, e.start_frame, e.end_frame));
  }
  return moments_of(slices);
}

ScopeMoments global_moments(Variable variable, std::span<const BodyVariableSeries> series) {
  std::vector<SeriesSlice> slices;
  for (const auto& s : series) {
    slices.push_back(slice_of(s, variable, 0, static_cast<std::int64_t>(s.size())));
  }
  return moments_of(slices);
}

BinnedSeries simplify(const SeriesSlice& slice, const ScopeMoments& scope) {
  if (slice.values.empty()) throw Error(ErrorCode::EmptySlice, "cannot simplify an empty slice");
  BinnedSeries out;
  out.variable = slice.variable;
  out.scope = scope;

  std::size_t run_start = 0;
  bool run_open = false;
  bool run_outlier = false;
  double run_sum = 0.0;

  auto flush = [&](std::size_t end) {
    if (!run_open) return;
    const auto width = static_cast<double>(end - run_start);
    out.bins.push_back({slice.first_frame + static_cast<std::int64_t>(run_start),
                        slice.first_frame + static_cast<std::int64_t>(end), run_sum / width,
                        run_outlier});
    run_open = false;
  };

  for (std::size_t i = 0; i < slice.values.size(); ++i) {
    if (!frame_ok(slice, i)) {
      flush(i);
      continue;
    }
    const double v = slice.values[i];
    const bool outlier = std::abs(v - scope.mean) > scope.stddev;
    if (run_open && outlier != run_outlier) flush(i);
    if (!run_open) {
      run_open = true;
      run_start = i;
      run_outlier = outlier;
      run_sum = 0.0;
    }
    run_sum += v;
  }
  flush(slice.values.size());
  return out;
}

std::vector<DownsampledPoint> downsample(const SeriesSlice& slice, std::size_t max_points) {
  if (max_points < 2) throw Error(ErrorCode::BadQuery, "max_points must be at least 2");
  const std::size_t n = slice.values.size();
  const std::size_t buckets = std::min(n, max_points);
  std::vector<DownsampledPoint> out;
  out.reserve(buckets);
  for (std::size_t b = 0; b < buckets; ++b) {
    const std::size_t lo = b * n / buckets;
    const std::size_t hi = (b + 1) * n / buckets;
    DownsampledPoint p;
    p.frame = slice.first_frame + static_cast<std::int64_t>(lo);
    p.min = std::numeric_limits<double>::infinity();
    p.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (!frame_ok(slice, i)) continue;
      const double v = slice.values[i];
      sum += v;
      p.min = std::min(p.min, v);
      p.max = std::max(p.max, v);
      ++p.count;
    }
    if (p.count == 0) continue;
    p.mean = sum / static_cast<double>(p.count);
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(VariableFamily family) {
  switch (family) {
    case VariableFamily::Trunk: return "trunk";
    case VariableFamily::Arm: return "arm";
    case VariableFamily::Foot: return "foot";
    case VariableFamily::Weight: return "weight";
  }
  return "unknown";
}

std::optional<VariableFamily> family_from_string(std::string_view name) {
  for (auto f : {VariableFamily::Trunk, VariableFamily::Arm, VariableFamily::Foot,
                 VariableFamily::Weight}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

VariableFamily family_of(Variable v) {
  switch (v) {
    case Variable::Trunk: return VariableFamily::Trunk;
    case Variable::ArmL:
    case Variable::ArmR: return VariableFamily::Arm;
    case Variable::FootL:
    case Variable::FootR: return VariableFamily::Foot;
    case Variable::WeightL:
    case Variable::WeightR: return VariableFamily::Weight;
  }
  return VariableFamily::Trunk;
}

bool is_paired(VariableFamily family) { return family != VariableFamily::Trunk; }

Distribution distribution(VariableFamily family, std::span<const double> left,
                          std::span<const double> right) {
  std::vector<double> all;
  all.reserve(left.size() + right.size());
  for (double v : left) if (std::isfinite(v)) all.push_back(v);
  for (double v : right) if (std::isfinite(v)) all.push_back(v);
  if (all.empty()) throw Error(ErrorCode::EmptyScope, "no valid frames in distribution scope");
  std::sort(all.begin(), all.end());

  double lo = percentile_sorted(all, 0.5);
  double hi = percentile_sorted(all, 99.5);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }

  Distribution d;
  d.family = family;
  d.edges.resize(kDistributionBins + 1);
  const double width = (hi - lo) / static_cast<double>(kDistributionBins);
  for (std::size_t i = 0; i <= kDistributionBins; ++i) {
    d.edges[i] = lo + width * static_cast<double>(i);
  }
  d.edges.back() = hi;

  auto count = [&](std::span<const double> values, std::vector<std::uint64_t>& counts) {
    counts.assign(kDistributionBins, 0);
    for (double v : values) {
      if (!std::isfinite(v) || v < lo || v > hi) continue;
      auto idx = static_cast<std::size_t>((v - lo) / (hi - lo) * kDistributionBins);
      counts[std::min(idx, kDistributionBins - 1)] += 1;
    }
  };
  count(left, d.left);
  if (is_paired(family)) count(right, d.right);
  return d;
}

// ---------------------------------------------------------------------------

std::string_view to_string(WeightText text) {
  switch (text) {
    case WeightText::Balanced: return "balanced";
    case WeightText::SlightLeft: return "slight_left";
    case WeightText::SlightRight: return "slight_right";
    case WeightText::StrongLeft: return "strong_left";
    case WeightText::StrongRight: return "strong_right";
  }
  return "balanced";
}

WeightText describe_weight(double mean_weight_l, const WeightTextThresholds& t) {
  const double d = mean_weight_l - 0.5;
  const double mag = std::abs(d);
  if (mag <= t.balanced) return WeightText::Balanced;
  const bool left = d > 0.0;
  if (mag <= t.slight) return left ? WeightText::SlightLeft : WeightText::SlightRight;
  return left ? WeightText::StrongLeft : WeightText::StrongRight;
}

EventStats event_stats(const Event& event, const BodyVariableSeries& series,
                       const WeightTextThresholds& thresholds) {
  EventStats stats;
  stats.duration_s = event.duration_s();
  for (std::size_t k = 0; k < kAllVariables.size(); ++k) {
    const auto slice = slice_of(series, kAllVariables[k], event.start_frame, event.end_frame);
    VariableSummary& sum = stats.variables[k];
    sum.min = std::numeric_limits<double>::infinity();
    sum.max = -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t i = 0; i < slice.values.size(); ++i) {
      if (!frame_ok(slice, i)) continue;
      const double v = slice.values[i];
      total += v;
      sum.min = std::min(sum.min, v);
      sum.max = std::max(sum.max, v);
      ++sum.count;
    }
    if (sum.count == 0) {
      throw Error(ErrorCode::NoValidFrames,
                  "event " + event.id().str() + " has no valid frames");
    }
    sum.mean = total / static_cast<double>(sum.count);
  }
  stats.valid_frames = stats.variables[0].count;
  stats.weight_mean_l = stats.variables[static_cast<std::size_t>(Variable::WeightL)].mean;
  stats.weight_text = describe_weight(stats.weight_mean_l, thresholds);
  return stats;
}

GlobalStats global_stats(const Dataset& dataset, const EventSet& events) {
  GlobalStats g;
  g.total_frames = dataset.total_frames();
  g.captured_s = dataset.total_duration_s();
  g.span_s = dataset.span_s();
  std::size_t sitting_frames = 0;
  for (const Event& e : events.events) {
    const auto a = static_cast<std::size_t>(e.action);
    g.action_seconds[a] += e.duration_s();
    g.action_events[a] += 1;
    if (e.action == Action::Sitting) sitting_frames += static_cast<std::size_t>(e.frame_count());
  }
  g.percent_sitting =
      g.total_frames == 0 ? 0.0
                          : static_cast<double>(sitting_frames) / static_cast<double>(g.total_frames);
  return g;
}

}  // namespace motion_insight
