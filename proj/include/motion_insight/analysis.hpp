#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "motion_insight/aggregate.hpp"
#include "motion_insight/config.hpp"
#include "motion_insight/events.hpp"
#include "motion_insight/kinematics.hpp"
#include "motion_insight/model.hpp"

namespace motion_insight {

// A dataset with everything derived from it computed once: body-variable
// series per segment, events, freeze candidates and the σ-binning moments for
// both scopes. Immutable after construction, so one instance can serve
// concurrent readers.
class Analysis {
 public:
  Analysis(Dataset dataset, Config config);

  Analysis(const Analysis&) = delete;
  Analysis& operator=(const Analysis&) = delete;

  const Dataset& dataset() const noexcept { return dataset_; }
  const Config& config() const noexcept { return config_; }
  std::span<const BodyVariableSeries> series() const noexcept { return series_; }
  const EventSet& events() const noexcept { return events_; }
  const std::vector<FreezeInterval>& freezes() const noexcept { return freezes_; }
  FilterContext filter_context() const;

  /// Throws Error(NotFound) for unknown or malformed ids.
  const Event& event(const EventId& id) const;
  const Event& event(std::string_view id) const;

  /// Events of `action` (all actions when empty) passing every filter.
  EventSet select(std::optional<Action> action, std::span<const FilterSpec> filters) const;

  std::vector<FreezeInterval> freezes_of(const EventId& id) const;

  /// Selection scope: every frame of the events sharing `action`.
  const ScopeMoments& moments(Variable variable, SimplifyScope scope, Action action) const;

 private:
  Dataset dataset_;
  Config config_;
  std::vector<BodyVariableSeries> series_;
  EventSet events_;
  std::vector<FreezeInterval> freezes_;
  std::array<ScopeMoments, kAllVariables.size()> global_moments_{};
  std::array<std::array<ScopeMoments, kAllVariables.size()>, kAllActions.size()> selection_moments_{};
};

}  // namespace motion_insight
