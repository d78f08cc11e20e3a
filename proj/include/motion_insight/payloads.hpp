#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "motion_insight/analysis.hpp"

// JSON documents served by the API and embedded in the analyze report. Each
// builder is a pure function of the analysis and its arguments.
namespace motion_insight::payload {

using nlohmann::json;

json event_ref(const Analysis& a, const Event& e);

json meta(const Analysis& a);
json actions_summary(const Analysis& a);
json actions_timeline(const Analysis& a);
json events(const Analysis& a, std::optional<Action> action, std::span<const FilterSpec> filters);

struct SeriesQuery {
  std::vector<Variable> variables{kAllVariables.begin(), kAllVariables.end()};
  bool simplify = false;
  std::size_t max_points = 1000;
  SimplifyScope scope = SimplifyScope::Selection;
};
json event_series(const Analysis& a, const Event& e, const SeriesQuery& q);
/// Same bytes as `event_series(a, e, q).dump()`, written without building the
/// numeric columns as JSON values.
std::string event_series_text(const Analysis& a, const Event& e, const SeriesQuery& q);

json event_stats(const Analysis& a, const Event& e);
json global_stats(const Analysis& a);
json distributions(const Analysis& a, std::span<const VariableFamily> families,
                   std::optional<Action> action);

struct FrameQuery {
  std::int64_t from = 0;  // segment frame indices, clamped to the event
  std::int64_t to = 0;
  std::int64_t stride = 1;
};
/// Throws Error(BadQuery) when the request would exceed the configured frame cap.
json frames(const Analysis& a, const Event& e, const FrameQuery& q);

json freezes(const Analysis& a, const std::optional<EventId>& event);

json error(std::string_view code, std::string_view message);

}  // namespace motion_insight::payload
