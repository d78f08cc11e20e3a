#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "motion_insight/events.hpp"
#include "motion_insight/kinematics.hpp"
#include "motion_insight/model.hpp"

namespace motion_insight {

// A contiguous run of one variable. `first_frame` is the capture frame index
// of values[0].
struct SeriesSlice {
  Variable variable = Variable::Trunk;
  std::int64_t first_frame = 0;
  std::span<const double> values;
  std::span<const std::uint8_t> flags;
};

SeriesSlice slice_of(const BodyVariableSeries& series, Variable variable, std::int64_t start_frame,
                     std::int64_t end_frame);

// Population mean and standard deviation of the frames that define "normal".
struct ScopeMoments {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

enum class SimplifyScope : std::uint8_t { Selection, Global };
std::string_view to_string(SimplifyScope scope);
std::optional<SimplifyScope> simplify_scope_from_string(std::string_view name);

ScopeMoments moments_of(std::span<const SeriesSlice> slices);

/// Moments over every valid frame of the given events.
ScopeMoments selection_moments(Variable variable, std::span<const Event> events,
                               std::span<const BodyVariableSeries> series);
/// Moments over every valid frame of every segment.
ScopeMoments global_moments(Variable variable, std::span<const BodyVariableSeries> series);

struct Bin {
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  double mean = 0.0;
  bool is_outlier = false;
  friend bool operator==(const Bin&, const Bin&) = default;
};

struct BinnedSeries {
  Variable variable = Variable::Trunk;
  ScopeMoments scope;
  std::vector<Bin> bins;
};

/// Splits valid frames into maximal same-class runs (|v - mean| <= stddev is
/// the mean class, anything beyond is the outlier class) and averages each
/// run. Invalid frames split runs and are not covered by any bin. Throws
/// Error(EmptySlice) for an empty slice.
BinnedSeries simplify(const SeriesSlice& slice, const ScopeMoments& scope);

struct DownsampledPoint {
  std::int64_t frame = 0;  // first frame of the bucket
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Per-bucket mean with min and max kept, so extremes survive. Buckets split
/// the slice into at most `max_points` equal index ranges; buckets without a
/// valid frame are dropped. A slice no longer than `max_points` comes back one
/// point per valid frame.
std::vector<DownsampledPoint> downsample(const SeriesSlice& slice, std::size_t max_points);

enum class VariableFamily : std::uint8_t { Trunk, Arm, Foot, Weight };
std::string_view to_string(VariableFamily family);
std::optional<VariableFamily> family_from_string(std::string_view name);
VariableFamily family_of(Variable v);
bool is_paired(VariableFamily family);

inline constexpr std::size_t kDistributionBins = 64;

/// Histogram over [p0.5, p99.5] of the scope. Paired families share one range
/// across left and right; `right` is empty for trunk.
struct Distribution {
  VariableFamily family = VariableFamily::Trunk;
  std::vector<double> edges;  // kDistributionBins + 1
  std::vector<std::uint64_t> left;
  std::vector<std::uint64_t> right;
};

/// Throws Error(EmptyScope) when there are no values at all.
Distribution distribution(VariableFamily family, std::span<const double> left,
                          std::span<const double> right = {});

// ---------------------------------------------------------------------------

enum class WeightText : std::uint8_t { Balanced, SlightLeft, SlightRight, StrongLeft, StrongRight };
std::string_view to_string(WeightText text);

struct WeightTextThresholds {
  double balanced = 0.05;
  double slight = 0.15;
};

WeightText describe_weight(double mean_weight_l, const WeightTextThresholds& thresholds = {});

struct VariableSummary {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct EventStats {
  double duration_s = 0.0;
  double weight_mean_l = 0.5;
  WeightText weight_text = WeightText::Balanced;
  std::size_t valid_frames = 0;
  std::array<VariableSummary, kAllVariables.size()> variables{};
};

/// Throws Error(NoValidFrames) when the event has no valid frame.
EventStats event_stats(const Event& event, const BodyVariableSeries& series,
                       const WeightTextThresholds& thresholds = {});

struct GlobalStats {
  double percent_sitting = 0.0;  // fraction in [0, 1]
  std::array<double, kAllActions.size()> action_seconds{};
  std::array<std::size_t, kAllActions.size()> action_events{};
  std::size_t total_frames = 0;
  double captured_s = 0.0;
  double span_s = 0.0;
};

GlobalStats global_stats(const Dataset& dataset, const EventSet& events);

}  // namespace motion_insight
