#include "motion_insight/report.hpp"

#include <charconv>
#include <cmath>

#include "motion_insight/config.hpp"
#include "motion_insight/error.hpp"
#include "motion_insight/payloads.hpp"

namespace motion_insight {

using nlohmann::json;

nlohmann::json build_report(const Analysis& a, const ReportOptions& options) {
  json events = json::array();
  for (const Event& e : a.events().events) {
    try {
      events.push_back(payload::event_stats(a, e));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::NoValidFrames) throw;
      events.push_back({{"event", payload::event_ref(a, e)},
                        {"error", {{"code", to_string(err.code())}, {"message", err.what()}}}});
    }
  }

  json probes = json::array();
  for (const Probe& p : a.config().probes) {
    const auto filters = resolve_filters(p.filters, a.config());
    json actions = json::array();
    json hits = json::array();
    for (Action act : p.actions) {
      actions.push_back(to_string(act));
      for (const Event& e : a.select(act, filters).events) hits.push_back(e.id().str());
    }
    json applied = json::array();
    for (const auto& f : filters) applied.push_back(format_filter(f));
    probes.push_back({{"name", p.name},
                      {"actions", actions},
                      {"filters", applied},
                      {"count", hits.size()},
                      {"hits", hits}});
  }

  json report = {
      {"dataset_id", a.dataset().id()},
      {"config", json::parse(serialize_config(a.config()))},
      {"meta", payload::meta(a)},
      {"global_stats", payload::global_stats(a)},
      {"actions_summary", payload::actions_summary(a)},
      {"events", events},
      {"freezes", payload::freezes(a, std::nullopt)},
      {"probes", probes},
  };
  if (options.with_selection) {
    report["selection"] = payload::events(a, options.action, options.filters);
  }
  return report;
}

std::string series_csv(const Analysis& a) {
  std::string out = "segment,frame,valid,suspect,trunk_deg,arm_use_l,arm_use_r,foot_pos_l,foot_pos_r,"
                    "weight_l,weight_r\n";
  char buf[64];
  auto put_int = [&](std::int64_t v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
  };
  auto put_num = [&](double v) {
    out.push_back(',');
    if (!std::isfinite(v)) return;
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
  };
  const auto series = a.series();
  for (std::size_t s = 0; s < series.size(); ++s) {
    const BodyVariableSeries& bs = series[s];
    for (std::size_t i = 0; i < bs.size(); ++i) {
      put_int(static_cast<std::int64_t>(s));
      out.push_back(',');
      put_int(static_cast<std::int64_t>(i));
      out += bs.valid(i) ? ",1" : ",0";
      out += (bs.flags[i] & frame_flags::kSuspect) ? ",1" : ",0";
      put_num(bs.trunk_deg[i]);
      put_num(bs.arm_use_l[i]);
      put_num(bs.arm_use_r[i]);
      put_num(bs.foot_pos_l[i]);
      put_num(bs.foot_pos_r[i]);
      put_num(bs.weight_l[i]);
      put_num(bs.weight_r[i]);
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace motion_insight
