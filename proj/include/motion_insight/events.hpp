#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motion_insight/kinematics.hpp"
#include "motion_insight/model.hpp"

namespace motion_insight {

struct EventId {
  Action action = Action::Standing;
  std::size_t segment = 0;
  std::int64_t start_frame = 0;

  /// "<action>:<segment>:<start_frame>", e.g. "walking:0:120".
  std::string str() const;
  static std::optional<EventId> parse(std::string_view text);
  friend bool operator==(const EventId&, const EventId&) = default;
};

struct Event {
  Action action = Action::Standing;
  std::size_t segment = 0;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  double fps = 30.0;

  EventId id() const { return {action, segment, start_frame}; }
  std::int64_t frame_count() const { return end_frame - start_frame; }
  double duration_s() const { return static_cast<double>(end_frame - start_frame) / fps; }
  friend bool operator==(const Event&, const Event&) = default;
};

/// Events ordered by (action, segment, start_frame); each action's events are
/// contiguous, disjoint and time-ordered within a segment.
struct EventSet {
  std::vector<Event> events;

  std::size_t size() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }
  const Event* find(const EventId& id) const;
  std::span<const Event> of_action(Action action) const;
  bool contains(const EventId& id) const { return find(id) != nullptr; }
};

EventSet extract_events(const Dataset& dataset);

// ---------------------------------------------------------------------------
// Freeze candidates

struct FreezeParams {
  double delta_feet_m = 0.15;  // both |foot_pos| below this counts as feet under the pelvis
  double min_freeze_s = 1.0;
  int max_gap_frames = 5;      // invalid runs up to this length are bridged
};

struct FreezeInterval {
  EventId parent;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  double duration_s = 0.0;
  friend bool operator==(const FreezeInterval&, const FreezeInterval&) = default;
};

/// Maximal runs inside one event where both feet stay within delta of the
/// pelvis along the forward axis on every valid frame. Does not check the
/// event's action.
std::vector<FreezeInterval> detect_freezes_in(const BodyVariableSeries& series, const Event& event,
                                              const FreezeParams& params);

/// Freeze candidates for every walking event. `series` is indexed by segment.
std::vector<FreezeInterval> detect_freezes(std::span<const BodyVariableSeries> series,
                                           const EventSet& events, const FreezeParams& params);

// ---------------------------------------------------------------------------
// Filters

enum class FilterKind : std::uint8_t {
  MinDuration,
  HighTrunk,
  ImbalancedArm,
  ImbalancedWeight,
  PotentialFreezes,
};

std::string_view to_string(FilterKind kind);
std::optional<FilterKind> filter_kind_from_string(std::string_view name);

struct FilterThresholds {
  double min_duration_s = 5.0;
  double high_trunk_deg = 25.0;
  double trunk_percentile = 95.0;
  double arm_ratio = 2.0;
  double weight_deviation = 0.15;
};

/// One predicate and its threshold. For potential_freezes the threshold is
/// the minimum freeze duration in seconds.
struct FilterSpec {
  FilterKind kind = FilterKind::MinDuration;
  double threshold = 0.0;
  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

FilterSpec default_filter(FilterKind kind, const FilterThresholds& thresholds,
                          const FreezeParams& freeze);

/// Parses "kind" or "kind=value". Throws Error(UnknownFilter) for unknown
/// kinds and Error(BadQuery) for malformed or out-of-range values.
FilterSpec parse_filter(std::string_view text, const FilterThresholds& thresholds,
                        const FreezeParams& freeze);
std::string format_filter(const FilterSpec& spec);

struct FilterContext {
  std::span<const BodyVariableSeries> series;  // by segment
  FilterThresholds thresholds;
  FreezeParams freeze;
};

bool matches(const Event& event, const FilterSpec& filter, const FilterContext& ctx);

/// Conjunction of all filters; preserves order and never adds events.
EventSet apply_filters(const EventSet& events, std::span<const FilterSpec> filters,
                       const FilterContext& ctx);

}  // namespace motion_insight
