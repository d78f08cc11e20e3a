#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motion_insight/aggregate.hpp"
#include "motion_insight/events.hpp"
#include "motion_insight/kinematics.hpp"

namespace motion_insight {

// A named set of actions and filters evaluated by `analyze`. Filters are kept
// as text ("kind" or "kind=value") and resolved against the active thresholds.
struct Probe {
  std::string name;
  std::vector<Action> actions;
  std::vector<std::string> filters;
};

std::vector<Probe> default_probes();

struct Config {
  KinematicsOptions kinematics;
  FreezeParams freeze;
  FilterThresholds filters;
  WeightTextThresholds weight_text;
  std::size_t max_points = 1000;
  SimplifyScope simplify_scope = SimplifyScope::Selection;
  std::size_t max_frames_per_request = 20000;
  std::vector<Probe> probes = default_probes();
};

/// Throws Error(Config) naming the first field out of range.
void validate(const Config& config);

/// Overlays the keys present in `text` on the defaults. Unknown keys are
/// rejected.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);
std::string serialize_config(const Config& config);

/// Resolves a probe's filters against the config thresholds.
std::vector<FilterSpec> resolve_filters(std::span<const std::string> filters, const Config& config);

inline constexpr const char* kConfigEnvVar = "MOTION_INSIGHT_CONFIG";

/// Path named by MOTION_INSIGHT_CONFIG, if set and non-empty.
std::optional<std::filesystem::path> config_path_from_env();

}  // namespace motion_insight
