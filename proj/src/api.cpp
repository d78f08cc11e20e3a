#include "motion_insight/api.hpp"

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <list>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "motion_insight/error.hpp"
#include "motion_insight/payloads.hpp"

namespace motion_insight {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::BadQuery:
    case ErrorCode::UnknownFilter: return 400;
    case ErrorCode::EmptyScope:
    case ErrorCode::EmptySlice:
    case ErrorCode::NoValidFrames: return 422;
    default: return 500;
  }
}

namespace {

[[noreturn]] void bad_query(const std::string& message) {
  throw Error(ErrorCode::BadQuery, message);
}

void allow_only(const QueryParams& params, std::initializer_list<std::string_view> allowed,
                std::string_view repeatable = {}) {
  for (auto it = params.begin(); it != params.end(); ++it) {
    bool known = false;
    for (auto a : allowed) known = known || it->first == a;
    if (!known) bad_query("unknown query parameter '" + it->first + "'");
    if (it->first != repeatable && params.count(it->first) > 1) {
      bad_query("query parameter '" + it->first + "' given more than once");
    }
  }
}

std::optional<std::string> single(const QueryParams& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    bad_query("'" + key + "' must be an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  bad_query("'" + key + "' must be true or false, got '" + text + "'");
}

std::optional<Action> parse_action(const QueryParams& params) {
  const auto text = single(params, "action");
  if (!text) return std::nullopt;
  auto action = action_from_string(*text);
  if (!action) bad_query("unknown action '" + *text + "'");
  return action;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    out.push_back(text.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<Variable> parse_variables(const QueryParams& params) {
  const auto text = single(params, "vars");
  if (!text) return {kAllVariables.begin(), kAllVariables.end()};
  std::vector<Variable> out;
  for (const auto& name : split_commas(*text)) {
    auto v = variable_from_string(name);
    if (!v) bad_query("unknown variable '" + name + "'");
    if (std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
  }
  return out;
}

std::vector<VariableFamily> parse_families(const QueryParams& params) {
  const auto text = single(params, "vars");
  if (!text) {
    return {VariableFamily::Trunk, VariableFamily::Arm, VariableFamily::Foot, VariableFamily::Weight};
  }
  std::vector<VariableFamily> out;
  for (const auto& name : split_commas(*text)) {
    // Accept a family name or any of its member variables.
    std::optional<VariableFamily> f = family_from_string(name);
    if (!f) {
      if (auto v = variable_from_string(name)) f = family_of(*v);
    }
    if (!f) bad_query("unknown variable '" + name + "'");
    if (std::find(out.begin(), out.end(), *f) == out.end()) out.push_back(*f);
  }
  return out;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const auto slash = path.find('/', pos);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > pos) parts.push_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return parts;
}

}  // namespace

class Api::SeriesCache {
 public:
  explicit SeriesCache(std::size_t capacity) : capacity_(capacity) {}

  std::shared_ptr<const std::string> find(const std::string& key) {
    std::lock_guard lock(mutex_);
    const auto it = index_.find(key);
    if (it == index_.end()) return nullptr;
    entries_.splice(entries_.begin(), entries_, it->second);
    return it->second->second;
  }

  void insert(const std::string& key, std::shared_ptr<const std::string> body) {
    if (body->size() > capacity_) return;
    std::lock_guard lock(mutex_);
    if (index_.count(key)) return;
    bytes_ += body->size();
    entries_.emplace_front(key, std::move(body));
    index_[key] = entries_.begin();
    while (bytes_ > capacity_) {
      bytes_ -= entries_.back().second->size();
      index_.erase(entries_.back().first);
      entries_.pop_back();
    }
  }

 private:
  using Entry = std::pair<std::string, std::shared_ptr<const std::string>>;
  std::mutex mutex_;
  std::size_t capacity_;
  std::size_t bytes_ = 0;
  std::list<Entry> entries_;
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
};

Api::Api(const Analysis& analysis, std::size_t cache_bytes)
    : analysis_(analysis), cache_(std::make_unique<SeriesCache>(cache_bytes)) {}

Api::~Api() = default;

ApiResponse Api::handle(std::string_view path, const QueryParams& params) const {
  using nlohmann::json;
  const Analysis& a = analysis_;
  try {
    if (path.substr(0, kPrefix.size()) != kPrefix) {
      throw Error(ErrorCode::NotFound, "no route for '" + std::string(path) + "'");
    }
    const auto parts = split_path(path.substr(kPrefix.size()));
    auto route_is = [&](std::initializer_list<std::string_view> want) {
      if (parts.size() != want.size()) return false;
      std::size_t i = 0;
      for (auto w : want) {
        if (w != "*" && parts[i] != w) return false;
        ++i;
      }
      return true;
    };

    json body;
    if (route_is({"meta"})) {
      allow_only(params, {});
      body = payload::meta(a);
    } else if (route_is({"actions", "summary"})) {
      allow_only(params, {});
      body = payload::actions_summary(a);
    } else if (route_is({"actions", "timeline"})) {
      allow_only(params, {});
      body = payload::actions_timeline(a);
    } else if (route_is({"events"})) {
      allow_only(params, {"action", "filter"}, "filter");
      const auto action = parse_action(params);
      std::vector<FilterSpec> filters;
      auto [lo, hi] = params.equal_range("filter");
      for (auto it = lo; it != hi; ++it) {
        filters.push_back(parse_filter(it->second, a.config().filters, a.config().freeze));
      }
      body = payload::events(a, action, filters);
    } else if (route_is({"events", "*", "series"})) {
      allow_only(params, {"vars", "simplify", "max_points", "scope"});
      const Event& e = a.event(parts[1]);
      payload::SeriesQuery q;
      q.variables = parse_variables(params);
      q.max_points = a.config().max_points;
      q.scope = a.config().simplify_scope;
      if (auto v = single(params, "simplify")) q.simplify = parse_bool("simplify", *v);
      if (auto v = single(params, "max_points")) {
        const auto n = parse_int("max_points", *v);
        if (n < 2 || n > 1000000) bad_query("'max_points' must be in [2, 1000000]");
        q.max_points = static_cast<std::size_t>(n);
      }
      if (auto v = single(params, "scope")) {
        auto s = simplify_scope_from_string(*v);
        if (!s) bad_query("'scope' must be 'selection' or 'global'");
        q.scope = *s;
      }
      std::string key = e.id().str() + "|" + (q.simplify ? "s" : "d") + "|" + std::to_string(q.max_points) +
                        "|" + std::string(to_string(q.scope));
      for (Variable v : q.variables) key += "|" + std::string(to_string(v));
      auto cached = cache_->find(key);
      if (!cached) {
        cached = std::make_shared<const std::string>(payload::event_series_text(a, e, q));
        cache_->insert(key, cached);
      }
      return {200, *cached};
    } else if (route_is({"events", "*", "stats"})) {
      allow_only(params, {});
      body = payload::event_stats(a, a.event(parts[1]));
    } else if (route_is({"events", "*", "frames"})) {
      allow_only(params, {"from", "to", "stride"});
      const Event& e = a.event(parts[1]);
      payload::FrameQuery q;
      q.from = e.start_frame;
      if (auto v = single(params, "stride")) q.stride = parse_int("stride", *v);
      if (q.stride < 1) bad_query("'stride' must be >= 1");
      if (auto v = single(params, "from")) q.from = parse_int("from", *v);
      if (auto v = single(params, "to")) {
        q.to = parse_int("to", *v);
      } else {
        // Without an explicit end, return as much as the frame cap allows.
        const auto cap = static_cast<std::int64_t>(a.config().max_frames_per_request);
        q.to = std::min(e.end_frame, std::max(q.from, e.start_frame) + cap * q.stride);
      }
      body = payload::frames(a, e, q);
    } else if (route_is({"stats", "global"})) {
      allow_only(params, {});
      body = payload::global_stats(a);
    } else if (route_is({"distributions"})) {
      allow_only(params, {"vars", "action"});
      body = payload::distributions(a, parse_families(params), parse_action(params));
    } else if (route_is({"freezes"})) {
      allow_only(params, {"event"});
      std::optional<EventId> id;
      if (auto v = single(params, "event")) id = a.event(*v).id();
      body = payload::freezes(a, id);
    } else {
      throw Error(ErrorCode::NotFound, "no route for '" + std::string(path) + "'");
    }
    return {200, body.dump()};
  } catch (const Error& e) {
    return {http_status(e.code()), payload::error(to_string(e.code()), e.what()).dump()};
  } catch (const std::exception& e) {
    return {500, payload::error("Internal", e.what()).dump()};
  }
}

}  // namespace motion_insight
