#include "motion_insight/payloads.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <type_traits>

#include "motion_insight/error.hpp"

namespace motion_insight::payload {

namespace {

std::string wall(const Analysis& a, std::size_t segment, std::int64_t frame) {
  return format_rfc3339(a.dataset().wall_time(segment, static_cast<double>(frame)));
}

json vec(const Vec3& v) {
  if (!is_finite(v)) return nullptr;
  return json::array({v.x, v.y, v.z});
}

json moments_json(const ScopeMoments& m) {
  return {{"mean", m.mean}, {"stddev", m.stddev}, {"count", m.count}};
}

json action_or_null(std::optional<Action> action) {
  if (!action) return nullptr;
  return to_string(*action);
}

}  // namespace

json event_ref(const Analysis& a, const Event& e) {
  return {{"id", e.id().str()},
          {"action", to_string(e.action)},
          {"segment", e.segment},
          {"start_frame", e.start_frame},
          {"end_frame", e.end_frame},
          {"duration_s", e.duration_s()},
          {"start_time", wall(a, e.segment, e.start_frame)},
          {"end_time", wall(a, e.segment, e.end_frame)}};
}

json meta(const Analysis& a) {
  const Dataset& ds = a.dataset();
  json segments = json::array();
  for (std::size_t i = 0; i < ds.segment_count(); ++i) {
    const Segment& s = ds.segment(i);
    const auto frames = static_cast<std::int64_t>(s.capture.frame_count());
    segments.push_back({{"index", i},
                        {"capture", s.ref.capture_path},
                        {"labels", s.ref.labels_path},
                        {"fps", s.capture.fps()},
                        {"frames", frames},
                        {"duration_s", s.capture.duration_s()},
                        {"wall_clock_start", wall(a, i, 0)},
                        {"wall_clock_end", wall(a, i, frames)},
                        {"global_offset", ds.global_offset(i)},
                        {"invalid_frames", s.capture.invalid_frame_count()},
                        {"gap_frames", a.series()[i].gap_count()},
                        {"joints", s.capture.joints()}});
  }
  json actions = json::array();
  for (auto act : kAllActions) actions.push_back(to_string(act));
  json variables = json::array();
  for (auto v : kAllVariables) variables.push_back(to_string(v));
  json filters = json::array();
  for (auto k : {FilterKind::MinDuration, FilterKind::HighTrunk, FilterKind::ImbalancedArm,
                 FilterKind::ImbalancedWeight, FilterKind::PotentialFreezes}) {
    const auto spec = default_filter(k, a.config().filters, a.config().freeze);
    filters.push_back({{"kind", to_string(k)}, {"default", spec.threshold}});
  }
  const bool any = ds.segment_count() > 0;
  return {{"dataset_id", ds.id()},
          {"fps", any ? json(ds.segment(0).capture.fps()) : json(nullptr)},
          {"joints", any ? json(ds.segment(0).capture.joints()) : json::array()},
          {"total_frames", ds.total_frames()},
          {"captured_s", ds.total_duration_s()},
          {"span_s", ds.span_s()},
          {"segments", segments},
          {"actions", actions},
          {"variables", variables},
          {"filters", filters},
          {"event_count", a.events().size()}};
}

json actions_summary(const Analysis& a) {
  const GlobalStats g = motion_insight::global_stats(a.dataset(), a.events());
  json rows = json::array();
  for (std::size_t i = 0; i < kAllActions.size(); ++i) {
    rows.push_back({{"action", to_string(kAllActions[i])},
                    {"total_s", g.action_seconds[i]},
                    {"events", g.action_events[i]},
                    {"fraction_of_captured", g.captured_s > 0.0 ? g.action_seconds[i] / g.captured_s : 0.0}});
  }
  return {{"captured_s", g.captured_s}, {"actions", rows}};
}

json actions_timeline(const Analysis& a) {
  std::vector<const Event*> order;
  for (const Event& e : a.events().events) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const Event* x, const Event* y) {
    if (x->segment != y->segment) return x->segment < y->segment;
    if (x->start_frame != y->start_frame) return x->start_frame < y->start_frame;
    return x->action < y->action;
  });
  // Simultaneous actions go on stacked rows: each interval takes the lowest
  // row that is free at its start.
  std::vector<TimePoint> row_end;
  json intervals = json::array();
  for (const Event* e : order) {
    const TimePoint start = a.dataset().wall_time(e->segment, static_cast<double>(e->start_frame));
    const TimePoint end = a.dataset().wall_time(e->segment, static_cast<double>(e->end_frame));
    std::size_t row = 0;
    while (row < row_end.size() && row_end[row] > start) ++row;
    if (row == row_end.size()) row_end.push_back(end);
    else row_end[row] = end;
    json item = event_ref(a, *e);
    item["row"] = row;
    intervals.push_back(std::move(item));
  }
  return {{"rows", row_end.size()}, {"intervals", intervals}};
}

json events(const Analysis& a, std::optional<Action> action, std::span<const FilterSpec> filters) {
  const EventSet hits = a.select(action, filters);
  json list = json::array();
  for (const Event& e : hits.events) list.push_back(event_ref(a, e));
  json applied = json::array();
  for (const auto& f : filters) applied.push_back(format_filter(f));
  return {{"action", action_or_null(action)},
          {"filters", applied},
          {"count", hits.size()},
          {"events", list}};
}

namespace {

// Numeric columns of a series payload. `Sink` either stores each column as a
// JSON array or renders it straight to text and returns a placeholder.
template <typename Sink>
json series_document(const Analysis& a, const Event& e, const SeriesQuery& q, Sink&& column) {
  const BodyVariableSeries& s = a.series()[e.segment];
  json out = json::array();
  for (Variable v : q.variables) {
    const SeriesSlice slice = slice_of(s, v, e.start_frame, e.end_frame);
    json item = {{"variable", to_string(v)}};
    if (q.simplify) {
      const ScopeMoments& m = a.moments(v, q.scope, e.action);
      const BinnedSeries binned = simplify(slice, m);
      const auto& bins = binned.bins;
      item["scope"] = moments_json(m);
      item["bins"] = {{"start_frame", column(bins, [](const Bin& b) { return b.start_frame; })},
                      {"end_frame", column(bins, [](const Bin& b) { return b.end_frame; })},
                      {"mean", column(bins, [](const Bin& b) { return b.mean; })},
                      {"is_outlier", column(bins, [](const Bin& b) { return b.is_outlier; })}};
    } else {
      const auto points = downsample(slice, q.max_points);
      using P = DownsampledPoint;
      item["points"] = {{"frame", column(points, [](const P& p) { return p.frame; })},
                        {"mean", column(points, [](const P& p) { return p.mean; })},
                        {"min", column(points, [](const P& p) { return p.min; })},
                        {"max", column(points, [](const P& p) { return p.max; })},
                        {"count", column(points, [](const P& p) { return p.count; })}};
    }
    out.push_back(std::move(item));
  }
  return {{"event", event_ref(a, e)},
          {"simplify", q.simplify},
          {"scope", to_string(q.scope)},
          {"max_points", q.max_points},
          {"series", out}};
}

// Buffers number text in fixed chunks before appending to the column.
class ColumnWriter {
 public:
  explicit ColumnWriter(std::string& out) : out_(out) {}
  ~ColumnWriter() { flush(); }

  void put(char c) {
    reserve(1);
    buf_[pos_++] = c;
  }
  void put(bool v) {
    reserve(5);
    const char* text = v ? "true" : "false";
    const std::size_t n = v ? 4 : 5;
    std::memcpy(buf_.data() + pos_, text, n);
    pos_ += n;
  }
  void put(double v) {
    reserve(32);
    if (!std::isfinite(v)) {
      std::memcpy(buf_.data() + pos_, "null", 4);
      pos_ += 4;
      return;
    }
    char* begin = buf_.data() + pos_;
    pos_ += static_cast<std::size_t>(nlohmann::detail::to_chars(begin, begin + 32, v) - begin);
  }
  template <typename Int>
    requires std::is_integral_v<Int>
  void put(Int v) {
    reserve(24);
    char* begin = buf_.data() + pos_;
    pos_ += static_cast<std::size_t>(std::to_chars(begin, begin + 24, v).ptr - begin);
  }

 private:
  void reserve(std::size_t n) {
    if (pos_ + n > buf_.size()) flush();
  }
  void flush() {
    out_.append(buf_.data(), pos_);
    pos_ = 0;
  }

  std::string& out_;
  std::array<char, 1 << 15> buf_;
  std::size_t pos_ = 0;
};

constexpr char kMarker = '\x01';

}  // namespace

json event_series(const Analysis& a, const Event& e, const SeriesQuery& q) {
  return series_document(a, e, q, [](const auto& items, auto field) {
    json col = json::array();
    col.get_ref<json::array_t&>().reserve(items.size());
    for (const auto& item : items) col.push_back(field(item));
    return col;
  });
}

std::string event_series_text(const Analysis& a, const Event& e, const SeriesQuery& q) {
  std::vector<std::string> columns;
  const json skeleton = series_document(a, e, q, [&](const auto& items, auto field) {
    std::string text;
    text.reserve(items.size() * 10 + 2);
    {
      ColumnWriter w(text);
      w.put('[');
      bool first = true;
      for (const auto& item : items) {
        if (!first) w.put(',');
        first = false;
        w.put(field(item));
      }
      w.put(']');
    }
    columns.push_back(std::move(text));
    return std::string(1, kMarker) + std::to_string(columns.size() - 1);
  });

  // Each placeholder dumps as "\u0001<index>" including its quotes.
  const std::string head = skeleton.dump();
  std::size_t total = head.size();
  for (const auto& c : columns) total += c.size();
  std::string out;
  out.reserve(total);
  const std::string_view tag = "\"\\u0001";
  std::size_t pos = 0;
  while (true) {
    const auto hit = head.find(tag, pos);
    if (hit == std::string::npos) break;
    out.append(head, pos, hit - pos);
    std::size_t digits = hit + tag.size();
    std::size_t index = 0;
    while (head[digits] != '"') index = index * 10 + static_cast<std::size_t>(head[digits++] - '0');
    out += columns[index];
    pos = digits + 1;
  }
  out.append(head, pos, std::string::npos);
  return out;
}

json event_stats(const Analysis& a, const Event& e) {
  const EventStats st = motion_insight::event_stats(e, a.series()[e.segment], a.config().weight_text);
  json vars = json::object();
  for (std::size_t k = 0; k < kAllVariables.size(); ++k) {
    const auto& v = st.variables[k];
    vars[std::string(to_string(kAllVariables[k]))] = {
        {"min", v.min}, {"mean", v.mean}, {"max", v.max}, {"count", v.count}};
  }
  return {{"event", event_ref(a, e)},
          {"duration_s", st.duration_s},
          {"valid_frames", st.valid_frames},
          {"weight_mean_l", st.weight_mean_l},
          {"weight_text", to_string(st.weight_text)},
          {"variables", vars}};
}

json global_stats(const Analysis& a) {
  const GlobalStats g = motion_insight::global_stats(a.dataset(), a.events());
  json actions = json::array();
  for (std::size_t i = 0; i < kAllActions.size(); ++i) {
    actions.push_back({{"action", to_string(kAllActions[i])},
                       {"total_s", g.action_seconds[i]},
                       {"events", g.action_events[i]}});
  }
  return {{"percent_sitting", g.percent_sitting},
          {"total_frames", g.total_frames},
          {"captured_s", g.captured_s},
          {"span_s", g.span_s},
          {"actions", actions}};
}

json distributions(const Analysis& a, std::span<const VariableFamily> families,
                   std::optional<Action> action) {
  auto values_of = [&](Variable v) {
    std::vector<double> out;
    auto take = [&](const BodyVariableSeries& s, std::int64_t lo, std::int64_t hi) {
      const SeriesSlice slice = slice_of(s, v, lo, hi);
      for (std::size_t i = 0; i < slice.values.size(); ++i) {
        if (slice.flags[i] & frame_flags::kValid) out.push_back(slice.values[i]);
      }
    };
    if (action) {
      for (const Event& e : a.events().of_action(*action)) {
        take(a.series()[e.segment], e.start_frame, e.end_frame);
      }
    } else {
      for (const auto& s : a.series()) take(s, 0, static_cast<std::int64_t>(s.size()));
    }
    return out;
  };

  json out = json::array();
  for (VariableFamily f : families) {
    Distribution d;
    switch (f) {
      case VariableFamily::Trunk:
        d = distribution(f, values_of(Variable::Trunk));
        break;
      case VariableFamily::Arm:
        d = distribution(f, values_of(Variable::ArmL), values_of(Variable::ArmR));
        break;
      case VariableFamily::Foot:
        d = distribution(f, values_of(Variable::FootL), values_of(Variable::FootR));
        break;
      case VariableFamily::Weight:
        d = distribution(f, values_of(Variable::WeightL), values_of(Variable::WeightR));
        break;
    }
    json item = {{"family", to_string(f)},
                 {"paired", is_paired(f)},
                 {"edges", d.edges},
                 {"left", d.left}};
    if (is_paired(f)) item["right"] = d.right;
    out.push_back(std::move(item));
  }
  return {{"action", action_or_null(action)}, {"bins", kDistributionBins}, {"distributions", out}};
}

json frames(const Analysis& a, const Event& e, const FrameQuery& q) {
  if (q.stride < 1) throw Error(ErrorCode::BadQuery, "stride must be >= 1");
  const std::int64_t from = std::clamp(q.from, e.start_frame, e.end_frame);
  const std::int64_t to = std::clamp(q.to, from, e.end_frame);
  const auto count = static_cast<std::size_t>((to - from + q.stride - 1) / q.stride);
  if (count > a.config().max_frames_per_request) {
    throw Error(ErrorCode::BadQuery, "request spans " + std::to_string(count) +
                                         " frames; the limit is " +
                                         std::to_string(a.config().max_frames_per_request) +
                                         ", raise stride or narrow the range");
  }
  const Capture& cap = a.dataset().segment(e.segment).capture;
  const BodyVariableSeries& s = a.series()[e.segment];
  const CanonicalJoints& cj = cap.canonical();
  const bool flip = a.config().kinematics.forward_flip;

  auto arrow = [](const char* origin, const Vec3& at, const Vec3& dir, double magnitude,
                  double value) {
    const Vec3 d = magnitude > 0.0 ? dir : Vec3{0.0, 0.0, 0.0};
    return json{{"origin", origin},
                {"position", vec(at)},
                {"direction", vec(d)},
                {"magnitude", magnitude},
                {"value", value}};
  };
  auto sign = [](double v) { return v < 0.0 ? -1.0 : 1.0; };

  json list = json::array();
  for (std::int64_t f = from; f < to; f += q.stride) {
    const auto i = static_cast<std::size_t>(f);
    json positions = json::array();
    for (const Vec3& p : cap.frame(i)) positions.push_back(vec(p));
    json item = {{"frame", f}, {"valid", s.valid(i)}, {"positions", std::move(positions)}};
    if (!s.valid(i)) {
      item["arrows"] = nullptr;
      list.push_back(std::move(item));
      continue;
    }
    const auto src = static_cast<std::size_t>(s.axes_source[i]);
    const LocalFrame lf = pelvis_frame(cap.at(src, cj.pelvis), cap.at(src, cj.left_hip), flip);
    const Vec3 pelvis = cap.at(i, cj.pelvis);
    const Vec3 trunk = cap.at(i, cj.neck) - pelvis;
    const Vec3 hand_l = cap.at(i, cj.left_hand);
    const Vec3 hand_r = cap.at(i, cj.right_hand);
    const Vec3 foot_l = cap.at(i, cj.left_foot);
    const Vec3 foot_r = cap.at(i, cj.right_foot);
    auto toward = [&](const Vec3& target) {
      return sign(dot(target - pelvis, lf.x_hat)) * lf.x_hat;
    };
    json arrows = {
        {"trunk", arrow("pelvis", pelvis, (1.0 / norm(trunk)) * trunk, s.trunk_deg[i], s.trunk_deg[i])},
        {"arm_l", arrow("left_hand", hand_l, sign(dot(hand_l - pelvis, lf.z_hat)) * lf.z_hat,
                        s.arm_use_l[i], s.arm_use_l[i])},
        {"arm_r", arrow("right_hand", hand_r, sign(dot(hand_r - pelvis, lf.z_hat)) * lf.z_hat,
                        s.arm_use_r[i], s.arm_use_r[i])},
        {"foot_l", arrow("left_foot", foot_l, sign(s.foot_pos_l[i]) * lf.z_hat,
                         std::abs(s.foot_pos_l[i]), s.foot_pos_l[i])},
        {"foot_r", arrow("right_foot", foot_r, sign(s.foot_pos_r[i]) * lf.z_hat,
                         std::abs(s.foot_pos_r[i]), s.foot_pos_r[i])},
        {"weight_l", arrow("pelvis", pelvis, toward(foot_l), s.weight_l[i], s.weight_l[i])},
        {"weight_r", arrow("pelvis", pelvis, toward(foot_r), s.weight_r[i], s.weight_r[i])},
    };
    item["arrows"] = std::move(arrows);
    list.push_back(std::move(item));
  }
  return {{"event", event_ref(a, e)},
          {"from", from},
          {"to", to},
          {"stride", q.stride},
          {"fps", cap.fps()},
          {"joints", cap.joints()},
          {"frames", list}};
}

json freezes(const Analysis& a, const std::optional<EventId>& event) {
  const std::vector<FreezeInterval> list = event ? a.freezes_of(*event) : a.freezes();
  json items = json::array();
  for (const auto& f : list) {
    items.push_back({{"event", f.parent.str()},
                     {"segment", f.parent.segment},
                     {"start_frame", f.start_frame},
                     {"end_frame", f.end_frame},
                     {"duration_s", f.duration_s},
                     {"start_time", wall(a, f.parent.segment, f.start_frame)}});
  }
  const FreezeParams& p = a.config().freeze;
  return {{"event", event ? json(event->str()) : json(nullptr)},
          {"params",
           {{"delta_feet_m", p.delta_feet_m},
            {"min_freeze_s", p.min_freeze_s},
            {"max_gap_frames", p.max_gap_frames}}},
          {"count", items.size()},
          {"freezes", items}};
}

json error(std::string_view code, std::string_view message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace motion_insight::payload
