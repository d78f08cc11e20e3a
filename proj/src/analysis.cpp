#include "motion_insight/analysis.hpp"

#include "motion_insight/error.hpp"

namespace motion_insight {

Analysis::Analysis(Dataset dataset, Config config)
    : dataset_(std::move(dataset)), config_(std::move(config)) {
  validate(config_);
  series_.reserve(dataset_.segment_count());
  for (const auto& seg : dataset_.segments()) {
    series_.push_back(compute_series(seg.capture, config_.kinematics));
  }
  events_ = extract_events(dataset_);
  freezes_ = detect_freezes(series_, events_, config_.freeze);
  for (std::size_t v = 0; v < kAllVariables.size(); ++v) {
    global_moments_[v] = global_moments(kAllVariables[v], series_);
    for (std::size_t a = 0; a < kAllActions.size(); ++a) {
      selection_moments_[a][v] =
          selection_moments(kAllVariables[v], events_.of_action(kAllActions[a]), series_);
    }
  }
}

FilterContext Analysis::filter_context() const {
  return {series_, config_.filters, config_.freeze};
}

const Event& Analysis::event(const EventId& id) const {
  if (const Event* e = events_.find(id)) return *e;
  throw Error(ErrorCode::NotFound, "no event '" + id.str() + "'");
}

const Event& Analysis::event(std::string_view id) const {
  const auto parsed = EventId::parse(id);
  if (!parsed) throw Error(ErrorCode::NotFound, "no event '" + std::string(id) + "'");
  return event(*parsed);
}

EventSet Analysis::select(std::optional<Action> action, std::span<const FilterSpec> filters) const {
  EventSet scope;
  if (action) {
    const auto span = events_.of_action(*action);
    scope.events.assign(span.begin(), span.end());
  } else {
    scope = events_;
  }
  if (filters.empty()) return scope;
  return apply_filters(scope, filters, filter_context());
}

std::vector<FreezeInterval> Analysis::freezes_of(const EventId& id) const {
  std::vector<FreezeInterval> out;
  for (const auto& f : freezes_) {
    if (f.parent == id) out.push_back(f);
  }
  return out;
}

const ScopeMoments& Analysis::moments(Variable variable, SimplifyScope scope, Action action) const {
  const auto v = static_cast<std::size_t>(variable);
  if (scope == SimplifyScope::Global) return global_moments_[v];
  return selection_moments_[static_cast<std::size_t>(action)][v];
}

}  // namespace motion_insight
