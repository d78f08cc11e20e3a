#include "motion_insight/config.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>

#include <json.hpp>

#include "motion_insight/error.hpp"
#include "motion_insight/ingest.hpp"

namespace motion_insight {

using nlohmann::json;

std::vector<Probe> default_probes() {
  return {
      {"freeze", {Action::Walking}, {"potential_freezes"}},
      {"posture", {Action::Walking, Action::Standing}, {"high_trunk"}},
      {"arm_swing", {Action::Walking}, {"imbalanced_arm"}},
      {"weight", {Action::Walking, Action::Standing}, {"imbalanced_weight"}},
      {"slow_transfer", {Action::SitToStand, Action::StandToSit}, {"min_duration"}},
  };
}

std::vector<FilterSpec> resolve_filters(std::span<const std::string> filters, const Config& config) {
  std::vector<FilterSpec> out;
  out.reserve(filters.size());
  for (const auto& f : filters) out.push_back(parse_filter(f, config.filters, config.freeze));
  return out;
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::Config, what); }

void require(bool ok, const char* what) {
  if (!ok) bad(what);
}

using Handlers = std::map<std::string, std::function<void(const json&)>, std::less<>>;

void apply_section(const json& j, const std::string& where, const Handlers& handlers) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    auto it = handlers.find(key);
    if (it == handlers.end()) bad("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    try {
      it->second(value);
    } catch (const json::exception&) {
      bad("wrong type for '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

double number(const json& v) {
  if (!v.is_number()) throw json::type_error::create(302, "number expected", &v);
  return v.get<double>();
}

std::int64_t integer(const json& v) {
  if (!v.is_number_integer()) throw json::type_error::create(302, "integer expected", &v);
  return v.get<std::int64_t>();
}

}  // namespace

void validate(const Config& c) {
  const auto& k = c.kinematics;
  require(std::isfinite(k.sanity_bound_m) && k.sanity_bound_m > 0.0,
          "kinematics.sanity_bound_m must be positive");
  require(k.fallback_frames >= 0, "kinematics.fallback_frames must be >= 0");

  require(std::isfinite(c.freeze.delta_feet_m) && c.freeze.delta_feet_m > 0.0,
          "freeze.delta_feet_m must be positive");
  require(std::isfinite(c.freeze.min_freeze_s) && c.freeze.min_freeze_s > 0.0,
          "freeze.min_freeze_s must be positive");
  require(c.freeze.max_gap_frames >= 0, "freeze.max_gap_frames must be >= 0");

  const auto& f = c.filters;
  require(std::isfinite(f.min_duration_s) && f.min_duration_s >= 0.0,
          "filters.min_duration_s must be >= 0");
  require(f.high_trunk_deg > 0.0 && f.high_trunk_deg < 180.0,
          "filters.high_trunk_deg must be in (0, 180)");
  require(f.trunk_percentile >= 0.0 && f.trunk_percentile <= 100.0,
          "filters.trunk_percentile must be in [0, 100]");
  require(std::isfinite(f.arm_ratio) && f.arm_ratio >= 1.0, "filters.arm_ratio must be >= 1");
  require(f.weight_deviation >= 0.0 && f.weight_deviation < 0.5,
          "filters.weight_deviation must be in [0, 0.5)");

  require(c.weight_text.balanced >= 0.0 && c.weight_text.balanced <= c.weight_text.slight &&
              c.weight_text.slight < 0.5,
          "weight_text needs 0 <= balanced <= slight < 0.5");

  require(c.max_points >= 2 && c.max_points <= 1000000, "service.max_points must be in [2, 1e6]");
  require(c.max_frames_per_request >= 1, "service.max_frames_per_request must be >= 1");

  for (const auto& p : c.probes) {
    require(!p.name.empty(), "probe names must be non-empty");
    require(!p.actions.empty(), "probes need at least one action");
    try {
      resolve_filters(p.filters, c);
    } catch (const Error& e) {
      bad("probe '" + p.name + "': " + e.what());
    }
  }
}

Config parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  Config c;
  auto& k = c.kinematics;
  auto& fz = c.freeze;
  auto& f = c.filters;
  auto& w = c.weight_text;

  auto probes = [&](const json& v) {
    if (!v.is_array()) bad("probes must be an array");
    c.probes.clear();
    for (const auto& p : v) {
      Probe probe;
      apply_section(p, "probes[]",
                    {{"name", [&](const json& x) { probe.name = x.get<std::string>(); }},
                     {"actions",
                      [&](const json& x) {
                        if (!x.is_array()) bad("probe actions must be an array");
                        for (const auto& a : x) {
                          auto action = action_from_string(a.get<std::string>());
                          if (!action) bad("unknown action '" + a.get<std::string>() + "' in probe");
                          probe.actions.push_back(*action);
                        }
                      }},
                     {"filters", [&](const json& x) {
                        probe.filters = x.get<std::vector<std::string>>();
                      }}});
      c.probes.push_back(std::move(probe));
    }
  };

  apply_section(
      j, "",
      {{"version", [&](const json& v) { require(integer(v) == 1, "config version must be 1"); }},
       {"kinematics",
        [&](const json& v) {
          apply_section(v, "kinematics",
                        {{"forward_flip", [&](const json& x) { k.forward_flip = x.get<bool>(); }},
                         {"weight_literal", [&](const json& x) { k.weight_literal = x.get<bool>(); }},
                         {"sanity_bound_m", [&](const json& x) { k.sanity_bound_m = number(x); }},
                         {"fallback_frames",
                          [&](const json& x) { k.fallback_frames = static_cast<int>(integer(x)); }}});
        }},
       {"freeze",
        [&](const json& v) {
          apply_section(v, "freeze",
                        {{"delta_feet_m", [&](const json& x) { fz.delta_feet_m = number(x); }},
                         {"min_freeze_s", [&](const json& x) { fz.min_freeze_s = number(x); }},
                         {"max_gap_frames",
                          [&](const json& x) { fz.max_gap_frames = static_cast<int>(integer(x)); }}});
        }},
       {"filters",
        [&](const json& v) {
          apply_section(v, "filters",
                        {{"min_duration_s", [&](const json& x) { f.min_duration_s = number(x); }},
                         {"high_trunk_deg", [&](const json& x) { f.high_trunk_deg = number(x); }},
                         {"trunk_percentile", [&](const json& x) { f.trunk_percentile = number(x); }},
                         {"arm_ratio", [&](const json& x) { f.arm_ratio = number(x); }},
                         {"weight_deviation", [&](const json& x) { f.weight_deviation = number(x); }}});
        }},
       {"weight_text",
        [&](const json& v) {
          apply_section(v, "weight_text",
                        {{"balanced", [&](const json& x) { w.balanced = number(x); }},
                         {"slight", [&](const json& x) { w.slight = number(x); }}});
        }},
       {"service",
        [&](const json& v) {
          apply_section(
              v, "service",
              {{"max_points",
                [&](const json& x) {
                  const auto n = integer(x);
                  require(n >= 2, "service.max_points must be in [2, 1e6]");
                  c.max_points = static_cast<std::size_t>(n);
                }},
               {"max_frames_per_request",
                [&](const json& x) {
                  const auto n = integer(x);
                  require(n >= 1, "service.max_frames_per_request must be >= 1");
                  c.max_frames_per_request = static_cast<std::size_t>(n);
                }},
               {"simplify_scope", [&](const json& x) {
                  auto s = simplify_scope_from_string(x.get<std::string>());
                  if (!s) bad("service.simplify_scope must be 'selection' or 'global'");
                  c.simplify_scope = *s;
                }}});
        }},
       {"probes", probes}});
  validate(c);
  return c;
}

Config load_config(const std::filesystem::path& path) {
  try {
    return parse_config(read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.what(), e.details());
  }
}

std::string serialize_config(const Config& c) {
  json probes = json::array();
  for (const auto& p : c.probes) {
    json actions = json::array();
    for (auto a : p.actions) actions.push_back(to_string(a));
    probes.push_back({{"name", p.name}, {"actions", actions}, {"filters", p.filters}});
  }
  json j = {
      {"version", 1},
      {"kinematics",
       {{"forward_flip", c.kinematics.forward_flip},
        {"weight_literal", c.kinematics.weight_literal},
        {"sanity_bound_m", c.kinematics.sanity_bound_m},
        {"fallback_frames", c.kinematics.fallback_frames}}},
      {"freeze",
       {{"delta_feet_m", c.freeze.delta_feet_m},
        {"min_freeze_s", c.freeze.min_freeze_s},
        {"max_gap_frames", c.freeze.max_gap_frames}}},
      {"filters",
       {{"min_duration_s", c.filters.min_duration_s},
        {"high_trunk_deg", c.filters.high_trunk_deg},
        {"trunk_percentile", c.filters.trunk_percentile},
        {"arm_ratio", c.filters.arm_ratio},
        {"weight_deviation", c.filters.weight_deviation}}},
      {"weight_text", {{"balanced", c.weight_text.balanced}, {"slight", c.weight_text.slight}}},
      {"service",
       {{"max_points", c.max_points},
        {"max_frames_per_request", c.max_frames_per_request},
        {"simplify_scope", to_string(c.simplify_scope)}}},
      {"probes", probes},
  };
  return j.dump(2);
}

std::optional<std::filesystem::path> config_path_from_env() {
  const char* v = std::getenv(kConfigEnvVar);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

}  // namespace motion_insight
