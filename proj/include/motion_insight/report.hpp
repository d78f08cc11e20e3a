#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "motion_insight/analysis.hpp"

namespace motion_insight {

struct ReportOptions {
  // Optional user selection reported under "selection".
  std::optional<Action> action;
  std::vector<FilterSpec> filters;
  bool with_selection = false;
};

/// Global stats, per-action summary, per-event stats, freeze intervals, probe
/// hits and the optional selection. Sections reuse the API payloads verbatim.
nlohmann::json build_report(const Analysis& analysis, const ReportOptions& options = {});

/// Per-frame body variables of every segment; invalid values are empty cells.
std::string series_csv(const Analysis& analysis);

}  // namespace motion_insight
