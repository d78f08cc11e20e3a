#include "motion_insight/events.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "motion_insight/error.hpp"
#include "motion_insight/numeric.hpp"

namespace motion_insight {

std::string EventId::str() const {
  return std::string(to_string(action)) + ":" + std::to_string(segment) + ":" +
         std::to_string(start_frame);
}

std::optional<EventId> EventId::parse(std::string_view text) {
  const auto c1 = text.find(':');
  if (c1 == std::string_view::npos) return std::nullopt;
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) return std::nullopt;
  const auto action = action_from_string(text.substr(0, c1));
  if (!action) return std::nullopt;

  EventId id;
  id.action = *action;
  const auto seg = text.substr(c1 + 1, c2 - c1 - 1);
  const auto start = text.substr(c2 + 1);
  auto r1 = std::from_chars(seg.data(), seg.data() + seg.size(), id.segment);
  auto r2 = std::from_chars(start.data(), start.data() + start.size(), id.start_frame);
  if (seg.empty() || start.empty() || r1.ec != std::errc{} || r1.ptr != seg.data() + seg.size() ||
      r2.ec != std::errc{} || r2.ptr != start.data() + start.size()) {
    return std::nullopt;
  }
  return id;
}

namespace {
bool event_less(const Event& a, const Event& b) {
  if (a.action != b.action) return a.action < b.action;
  if (a.segment != b.segment) return a.segment < b.segment;
  return a.start_frame < b.start_frame;
}
}  // namespace

const Event* EventSet::find(const EventId& id) const {
  const Event probe{id.action, id.segment, id.start_frame, 0, 0.0};
  auto it = std::lower_bound(events.begin(), events.end(), probe, event_less);
  if (it != events.end() && it->id() == id) return &*it;
  return nullptr;
}

std::span<const Event> EventSet::of_action(Action action) const {
  auto lo = std::lower_bound(events.begin(), events.end(), action,
                             [](const Event& e, Action a) { return e.action < a; });
  auto hi = std::upper_bound(events.begin(), events.end(), action,
                             [](Action a, const Event& e) { return a < e.action; });
  return {lo, hi};
}

EventSet extract_events(const Dataset& dataset) {
  EventSet set;
  for (std::size_t s = 0; s < dataset.segment_count(); ++s) {
    const auto& seg = dataset.segment(s);
    for (const auto& label : merge_labels(seg.labels)) {
      set.events.push_back(
          {label.action, s, label.start_frame, label.end_frame, seg.capture.fps()});
    }
  }
  std::sort(set.events.begin(), set.events.end(), event_less);
  return set;
}

// ---------------------------------------------------------------------------

std::vector<FreezeInterval> detect_freezes_in(const BodyVariableSeries& series, const Event& event,
                                              const FreezeParams& params) {
  std::vector<FreezeInterval> out;
  const auto end = std::min<std::int64_t>(event.end_frame, static_cast<std::int64_t>(series.size()));
  std::int64_t run_start = -1;
  std::int64_t last_pinned = -1;
  int gap = 0;

  auto close_run = [&] {
    if (run_start < 0) return;
    const std::int64_t stop = last_pinned + 1;
    const double duration = static_cast<double>(stop - run_start) / series.fps;
    if (duration >= params.min_freeze_s) {
      out.push_back({event.id(), run_start, stop, duration});
    }
    run_start = -1;
  };

  for (std::int64_t f = std::max<std::int64_t>(event.start_frame, 0); f < end; ++f) {
    const auto i = static_cast<std::size_t>(f);
    if (!series.valid(i)) {
      if (run_start >= 0 && ++gap > params.max_gap_frames) close_run();
      continue;
    }
    const bool pinned = std::abs(series.foot_pos_l[i]) < params.delta_feet_m &&
                        std::abs(series.foot_pos_r[i]) < params.delta_feet_m;
    if (pinned) {
      if (run_start < 0) run_start = f;
      last_pinned = f;
      gap = 0;
    } else {
      close_run();
    }
  }
  close_run();
  return out;
}

std::vector<FreezeInterval> detect_freezes(std::span<const BodyVariableSeries> series,
                                           const EventSet& events, const FreezeParams& params) {
  std::vector<FreezeInterval> out;
  for (const Event& e : events.of_action(Action::Walking)) {
    auto found = detect_freezes_in(series[e.segment], e, params);
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::MinDuration: return "min_duration";
    case FilterKind::HighTrunk: return "high_trunk";
    case FilterKind::ImbalancedArm: return "imbalanced_arm";
    case FilterKind::ImbalancedWeight: return "imbalanced_weight";
    case FilterKind::PotentialFreezes: return "potential_freezes";
  }
  return "unknown";
}

std::optional<FilterKind> filter_kind_from_string(std::string_view name) {
  for (auto k : {FilterKind::MinDuration, FilterKind::HighTrunk, FilterKind::ImbalancedArm,
                 FilterKind::ImbalancedWeight, FilterKind::PotentialFreezes}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

FilterSpec default_filter(FilterKind kind, const FilterThresholds& t, const FreezeParams& freeze) {
  switch (kind) {
    case FilterKind::MinDuration: return {kind, t.min_duration_s};
    case FilterKind::HighTrunk: return {kind, t.high_trunk_deg};
    case FilterKind::ImbalancedArm: return {kind, t.arm_ratio};
    case FilterKind::ImbalancedWeight: return {kind, t.weight_deviation};
    case FilterKind::PotentialFreezes: return {kind, freeze.min_freeze_s};
  }
  return {kind, 0.0};
}

namespace {
bool threshold_in_range(FilterKind kind, double v) {
  if (!std::isfinite(v)) return false;
  switch (kind) {
    case FilterKind::MinDuration: return v >= 0.0;
    case FilterKind::HighTrunk: return v > 0.0 && v < 180.0;
    case FilterKind::ImbalancedArm: return v >= 1.0;
    case FilterKind::ImbalancedWeight: return v >= 0.0 && v < 0.5;
    case FilterKind::PotentialFreezes: return v > 0.0;
  }
  return false;
}
}  // namespace

FilterSpec parse_filter(std::string_view text, const FilterThresholds& thresholds,
                        const FreezeParams& freeze) {
  const auto eq = text.find('=');
  const auto name = text.substr(0, eq);
  const auto kind = filter_kind_from_string(name);
  if (!kind) throw Error(ErrorCode::UnknownFilter, "unknown filter '" + std::string(name) + "'");
  FilterSpec spec = default_filter(*kind, thresholds, freeze);
  if (eq != std::string_view::npos) {
    const auto value = text.substr(eq + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
      throw Error(ErrorCode::BadQuery, "filter '" + std::string(name) + "' has a non-numeric value '" +
                                           std::string(value) + "'");
    }
    spec.threshold = v;
  }
  if (!threshold_in_range(spec.kind, spec.threshold)) {
    throw Error(ErrorCode::BadQuery, "filter '" + std::string(name) + "' threshold out of range");
  }
  return spec;
}

std::string format_filter(const FilterSpec& spec) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, spec.threshold);
  return std::string(to_string(spec.kind)) + "=" + std::string(buf, ptr);
}

bool matches(const Event& event, const FilterSpec& filter, const FilterContext& ctx) {
  if (filter.kind == FilterKind::MinDuration) return event.duration_s() > filter.threshold;

  const BodyVariableSeries& s = ctx.series[event.segment];
  const auto first = static_cast<std::size_t>(event.start_frame);
  const auto last = std::min(static_cast<std::size_t>(event.end_frame), s.size());
  auto slice = [&](const std::vector<double>& v) {
    return std::span<const double>(v).subspan(first, last - first);
  };
  const auto flags = std::span<const std::uint8_t>(s.flags).subspan(first, last - first);

  switch (filter.kind) {
    case FilterKind::HighTrunk: {
      auto trunk = valid_values(slice(s.trunk_deg), flags);
      if (trunk.empty()) return false;
      std::sort(trunk.begin(), trunk.end());
      return percentile_sorted(trunk, ctx.thresholds.trunk_percentile) > filter.threshold;
    }
    case FilterKind::ImbalancedArm: {
      const auto l = valid_values(slice(s.arm_use_l), flags);
      const auto r = valid_values(slice(s.arm_use_r), flags);
      if (l.empty()) return false;
      double sum_l = 0.0, sum_r = 0.0;
      for (double v : l) sum_l += v;
      for (double v : r) sum_r += v;
      const double mean_l = sum_l / static_cast<double>(l.size());
      const double mean_r = sum_r / static_cast<double>(r.size());
      const double ratio = std::max(mean_l, mean_r) / std::max(std::min(mean_l, mean_r), 1e-6);
      return ratio > filter.threshold;
    }
    case FilterKind::ImbalancedWeight: {
      const auto w = valid_values(slice(s.weight_l), flags);
      if (w.empty()) return false;
      double sum = 0.0;
      for (double v : w) sum += v;
      return std::abs(sum / static_cast<double>(w.size()) - 0.5) > filter.threshold;
    }
    case FilterKind::PotentialFreezes: {
      if (event.action != Action::Walking) return false;
      FreezeParams params = ctx.freeze;
      params.min_freeze_s = filter.threshold;
      return !detect_freezes_in(s, event, params).empty();
    }
    case FilterKind::MinDuration: break;
  }
  return false;
}

EventSet apply_filters(const EventSet& events, std::span<const FilterSpec> filters,
                       const FilterContext& ctx) {
  EventSet out;
  for (const Event& e : events.events) {
    const bool keep = std::all_of(filters.begin(), filters.end(),
                                  [&](const FilterSpec& f) { return matches(e, f, ctx); });
    if (keep) out.events.push_back(e);
  }
  return out;
}

}  // namespace motion_insight
