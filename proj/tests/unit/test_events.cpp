#include <doctest.h>

#include <algorithm>

#include "motion_insight/error.hpp"
#include "motion_insight/events.hpp"
#include "support.hpp"

using namespace motion_insight;
using testsupport::Gen;

namespace {

Dataset dataset_with(std::vector<std::vector<ActionLabel>> labels_per_segment, std::size_t frames = 600) {
  std::vector<Segment> segs;
  TimePoint t = parse_rfc3339("2024-03-14T09:00:00Z");
  for (auto& labels : labels_per_segment) {
    Segment s;
    s.ref.wall_clock_start = t;
    s.capture = Capture(30.0, testsupport::canonical_names(), std::vector<Vec3>(frames * 8, Vec3{0, 1, 0}), t);
    s.labels = std::move(labels);
    segs.push_back(std::move(s));
    t += std::chrono::hours(1);
  }
  return Dataset("d", std::move(segs));
}

// Walking-like foot trajectory with the feet pinned on [pin_start, pin_end).
std::vector<double> stride(std::size_t n, std::size_t pin_start, std::size_t pin_end, double phase) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = (i >= pin_start && i < pin_end) ? 0.02 : 0.3 * std::sin(0.19 * static_cast<double>(i) + phase) + (phase > 0 ? 0.45 : -0.45);
  }
  return v;
}

Event walking_event(std::int64_t start, std::int64_t end) { return {Action::Walking, 0, start, end, 30.0}; }

FilterContext context_for(const std::vector<BodyVariableSeries>& series) {
  return {series, FilterThresholds{}, FreezeParams{}};
}

}  // namespace

TEST_CASE("event ids format and parse") {
  const EventId id{Action::Walking, 0, 120};
  CHECK(id.str() == "walking:0:120");
  CHECK(EventId::parse("walking:0:120") == id);
  CHECK(EventId::parse("sit_to_stand:3:0") == EventId{Action::SitToStand, 3, 0});
  for (auto bad : {"", "walking", "walking:0", "walking:x:1", "walking:0:", "jogging:0:1", "walking:0:1x",
                   "walking:-1:4"}) {
    CHECK_FALSE(EventId::parse(bad).has_value());
  }
}

TEST_CASE("extract_events yields one event per merged label") {
  const Dataset ds = dataset_with({{{Action::Walking, 0, 100}, {Action::Walking, 200, 300}, {Action::Walking, 400, 450},
                                    {Action::Standing, 0, 100}, {Action::Reaching, 50, 80}},
                                   {{Action::Walking, 10, 20}, {Action::Walking, 20, 30}}});
  const EventSet set = extract_events(ds);
  CHECK(set.size() == 6);
  const auto walks = set.of_action(Action::Walking);
  REQUIRE(walks.size() == 4);
  CHECK(walks[0].segment == 0);
  CHECK(walks[3].segment == 1);
  CHECK(walks[3].start_frame == 10);
  CHECK(walks[3].end_frame == 30);
  CHECK(set.of_action(Action::Standing).size() == 1);
  CHECK(set.of_action(Action::Reaching).size() == 1);
  CHECK(set.of_action(Action::Sitting).empty());
  CHECK(set.contains({Action::Reaching, 0, 50}));
  CHECK_FALSE(set.contains({Action::Reaching, 0, 51}));
  CHECK(set.find({Action::Walking, 0, 200})->duration_s() == doctest::Approx(100.0 / 30.0));

  CHECK(extract_events(dataset_with({{}})).empty());
}

TEST_CASE("freeze detector threshold anchors") {
  const std::size_t n = 300;
  for (auto [pinned_frames, expected] : {std::pair<std::size_t, std::size_t>{27, 0}, {45, 1}}) {
    const auto s = testsupport::series_from(stride(n, 120, 120 + pinned_frames, 1.0),
                                            stride(n, 120, 120 + pinned_frames, -1.0), {});
    const auto found = detect_freezes_in(s, walking_event(0, n), FreezeParams{});
    REQUIRE(found.size() == expected);
    if (expected == 1) {
      CHECK(found[0].start_frame == 120);
      CHECK(found[0].end_frame == 165);
      CHECK(found[0].duration_s == doctest::Approx(1.5));
      CHECK(found[0].parent == EventId{Action::Walking, 0, 0});
    }
  }
}

TEST_CASE("freeze runs bridge short gaps and split on long ones") {
  const std::size_t n = 200;
  std::vector<bool> valid(n, true);
  auto l = stride(n, 50, 150, 1.0), r = stride(n, 50, 150, -1.0);
  for (std::size_t i = 80; i < 85; ++i) valid[i] = false;  // 5-frame gap: bridged
  auto s = testsupport::series_from(l, r, valid);
  auto found = detect_freezes_in(s, walking_event(0, n), FreezeParams{});
  REQUIRE(found.size() == 1);
  CHECK(found[0].start_frame == 50);
  CHECK(found[0].end_frame == 150);

  valid[85] = false;  // 6-frame gap: split
  s = testsupport::series_from(l, r, valid);
  found = detect_freezes_in(s, walking_event(0, n), FreezeParams{});
  REQUIRE(found.size() == 2);
  CHECK(found[0].end_frame == 80);
  CHECK(found[1].start_frame == 86);

  // a trailing gap is not part of the interval
  std::vector<bool> tail(n, true);
  for (std::size_t i = 150; i < 153; ++i) tail[i] = false;
  s = testsupport::series_from(stride(n, 50, 150, 1.0), stride(n, 50, 150, -1.0), tail);
  found = detect_freezes_in(s, walking_event(0, n), FreezeParams{});
  REQUIRE(found.size() == 1);
  CHECK(found[0].end_frame == 150);
}

TEST_CASE("freeze intervals are clipped to the event") {
  const std::size_t n = 200;
  const auto s = testsupport::series_from(stride(n, 50, 150, 1.0), stride(n, 50, 150, -1.0), {});
  const auto found = detect_freezes_in(s, walking_event(100, 190), FreezeParams{});
  REQUIRE(found.size() == 1);
  CHECK(found[0].start_frame == 100);
  CHECK(found[0].end_frame == 150);
}

TEST_CASE("freezes are only searched in walking events") {
  const std::size_t n = 300;
  std::vector<BodyVariableSeries> series{testsupport::series_from(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), {})};
  EventSet events;
  events.events.push_back({Action::Standing, 0, 0, 300, 30.0});
  CHECK(detect_freezes(series, events, FreezeParams{}).empty());
  const FilterSpec pf{FilterKind::PotentialFreezes, 1.0};
  CHECK_FALSE(matches(events.events[0], pf, context_for(series)));

  events.events.insert(events.events.begin(), walking_event(0, 300));
  const auto found = detect_freezes(series, events, FreezeParams{});
  REQUIRE(found.size() == 1);
  CHECK(found[0].parent.action == Action::Walking);
}

TEST_CASE("freeze detector equals the brute-force oracle") {
  Gen g(81);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(g.integer(1, 2000));
    std::vector<double> l(n), r(n);
    std::vector<bool> valid(n, true);
    const double p_pin = g.uniform(0.0, 1.0);
    bool pinned = g.chance(0.5);
    for (std::size_t i = 0; i < n; ++i) {
      if (g.chance(0.03)) pinned = g.chance(p_pin);
      l[i] = pinned ? g.uniform(-0.149, 0.149) : g.uniform(-0.6, 0.6);
      r[i] = pinned ? g.uniform(-0.149, 0.149) : g.uniform(-0.6, 0.6);
      if (g.chance(0.01)) {
        const auto len = static_cast<std::size_t>(g.integer(1, 8));
        for (std::size_t k = i; k < std::min(n, i + len); ++k) valid[k] = false;
      }
    }
    const auto s = testsupport::series_from(l, r, valid, g.chance(0.5) ? 30.0 : 60.0);
    const auto a = g.integer(0, static_cast<std::int64_t>(n) - 1);
    const Event e = walking_event(a, g.integer(a + 1, static_cast<std::int64_t>(n)));
    FreezeParams p;
    p.min_freeze_s = g.uniform(0.05, 1.5);
    p.max_gap_frames = static_cast<int>(g.integer(0, 6));
    const auto got = detect_freezes_in(s, e, p);
    CHECK(got == testsupport::oracle_freezes(s, e, p));
    for (const auto& f : got) {
      CHECK(f.start_frame >= e.start_frame);
      CHECK(f.end_frame <= e.end_frame);
      CHECK(f.duration_s >= p.min_freeze_s);
    }
  }
}

TEST_CASE("filter parsing") {
  const FilterThresholds t;
  const FreezeParams fp;
  CHECK(parse_filter("min_duration", t, fp) == FilterSpec{FilterKind::MinDuration, 5.0});
  CHECK(parse_filter("min_duration=12.5", t, fp) == FilterSpec{FilterKind::MinDuration, 12.5});
  CHECK(parse_filter("potential_freezes", t, fp) == FilterSpec{FilterKind::PotentialFreezes, 1.0});
  CHECK(parse_filter("high_trunk", t, fp).threshold == 25.0);
  CHECK(parse_filter("imbalanced_arm", t, fp).threshold == 2.0);
  CHECK(parse_filter("imbalanced_weight", t, fp).threshold == 0.15);
  CHECK(format_filter(parse_filter("min_duration=12.5", t, fp)) == "min_duration=12.5");

  auto code = [&](const char* text) {
    try {
      parse_filter(text, t, fp);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Spec;
  };
  CHECK(code("fast_walking") == ErrorCode::UnknownFilter);
  CHECK(code("min_duration=") == ErrorCode::BadQuery);
  CHECK(code("min_duration=abc") == ErrorCode::BadQuery);
  CHECK(code("min_duration=-1") == ErrorCode::BadQuery);
  CHECK(code("imbalanced_weight=0.5") == ErrorCode::BadQuery);
  CHECK(code("imbalanced_arm=0.5") == ErrorCode::BadQuery);
  CHECK(code("high_trunk=nan") == ErrorCode::BadQuery);
  for (auto k : {FilterKind::MinDuration, FilterKind::HighTrunk, FilterKind::ImbalancedArm,
                 FilterKind::ImbalancedWeight, FilterKind::PotentialFreezes}) {
    CHECK(filter_kind_from_string(to_string(k)) == k);
  }
}

TEST_CASE("min_duration keeps only longer events") {
  EventSet set;
  set.events.push_back({Action::Walking, 0, 0, 90, 30.0});
  set.events.push_back({Action::Walking, 0, 100, 280, 30.0});
  set.events.push_back({Action::Walking, 0, 300, 450, 30.0});  // exactly 5 s
  const std::vector<BodyVariableSeries> series{testsupport::series_from(std::vector<double>(450, 0.5),
                                                                        std::vector<double>(450, -0.5), {})};
  const FilterSpec f{FilterKind::MinDuration, 5.0};
  const auto out = apply_filters(set, std::span(&f, 1), context_for(series));
  REQUIRE(out.size() == 1);
  CHECK(out.events[0].start_frame == 100);
  CHECK(apply_filters(set, {}, context_for(series)).events == set.events);
}

TEST_CASE("variable filters follow their definitions") {
  const std::size_t n = 200;
  auto s = testsupport::series_from(std::vector<double>(n, 0.5), std::vector<double>(n, -0.5), {});
  // frames [0,100): arm ratio 3, trunk mostly upright with a short spike
  // frames [100,200): balanced arms, trunk bent, weight leaning left
  for (std::size_t i = 0; i < n; ++i) {
    s.arm_use_l[i] = i < 100 ? 0.3 : 0.2;
    s.arm_use_r[i] = i < 100 ? 0.1 : 0.2;
    s.trunk_deg[i] = i < 100 ? (i < 3 ? 80.0 : 5.0) : 40.0;
    s.weight_l[i] = i < 100 ? 0.5 : 0.7;
    s.weight_r[i] = 1.0 - s.weight_l[i];
  }
  const std::vector<BodyVariableSeries> series{s};
  const auto ctx = context_for(series);
  const Event a = walking_event(0, 100), b = walking_event(100, 200);

  CHECK(matches(a, {FilterKind::ImbalancedArm, 2.0}, ctx));
  CHECK_FALSE(matches(a, {FilterKind::ImbalancedArm, 3.5}, ctx));
  CHECK_FALSE(matches(b, {FilterKind::ImbalancedArm, 2.0}, ctx));

  CHECK_FALSE(matches(a, {FilterKind::HighTrunk, 25.0}, ctx));  // spike below the 95th percentile
  CHECK(matches(b, {FilterKind::HighTrunk, 25.0}, ctx));

  CHECK_FALSE(matches(a, {FilterKind::ImbalancedWeight, 0.15}, ctx));
  CHECK(matches(b, {FilterKind::ImbalancedWeight, 0.15}, ctx));
  CHECK_FALSE(matches(b, {FilterKind::ImbalancedWeight, 0.25}, ctx));
}

TEST_CASE("filters are anti-monotone and order independent") {
  Gen g(91);
  const std::size_t n = 3000;
  std::vector<double> l(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool pinned = (i / 50) % 3 == 0;
    l[i] = pinned ? 0.01 : g.uniform(-0.5, 0.5);
    r[i] = pinned ? -0.01 : g.uniform(-0.5, 0.5);
  }
  auto s = testsupport::series_from(l, r, {});
  for (std::size_t i = 0; i < n; ++i) {
    s.trunk_deg[i] = g.uniform(0, 60);
    s.arm_use_l[i] = g.uniform(0.01, 0.5);
    s.arm_use_r[i] = g.uniform(0.01, 0.5);
    s.weight_l[i] = g.uniform(0.2, 0.8);
    s.weight_r[i] = 1.0 - s.weight_l[i];
  }
  const std::vector<BodyVariableSeries> series{s};
  const auto ctx = context_for(series);

  for (int trial = 0; trial < 100; ++trial) {
    EventSet events;
    std::int64_t at = 0;
    while (at < static_cast<std::int64_t>(n) - 2) {
      const auto end = std::min<std::int64_t>(static_cast<std::int64_t>(n), at + g.integer(1, 400));
      events.events.push_back({g.chance(0.8) ? Action::Walking : Action::Standing, 0, at, end, 30.0});
      at = end + g.integer(0, 20);
    }
    std::stable_sort(events.events.begin(), events.events.end(),
                     [](const Event& x, const Event& y) { return x.action < y.action; });
    std::vector<FilterSpec> filters;
    const auto count = g.integer(0, 4);
    for (int k = 0; k < count; ++k) {
      switch (g.integer(0, 4)) {
        case 0: filters.push_back({FilterKind::MinDuration, g.uniform(0, 12)}); break;
        case 1: filters.push_back({FilterKind::HighTrunk, g.uniform(10, 60)}); break;
        case 2: filters.push_back({FilterKind::ImbalancedArm, g.uniform(1, 2)}); break;
        case 3: filters.push_back({FilterKind::ImbalancedWeight, g.uniform(0, 0.2)}); break;
        default: filters.push_back({FilterKind::PotentialFreezes, g.uniform(0.2, 2)}); break;
      }
    }
    const auto base = apply_filters(events, filters, ctx);
    auto extended = filters;
    extended.push_back({FilterKind::MinDuration, g.uniform(0, 12)});
    const auto narrower = apply_filters(events, extended, ctx);
    CHECK(narrower.size() <= base.size());
    for (const auto& e : narrower.events) CHECK(base.contains(e.id()));

    auto shuffled = filters;
    std::shuffle(shuffled.begin(), shuffled.end(), g.engine());
    CHECK(apply_filters(events, shuffled, ctx).events == base.events);
    CHECK(std::is_sorted(base.events.begin(), base.events.end(), [](const Event& x, const Event& y) {
      return std::pair(x.action, x.start_frame) < std::pair(y.action, y.start_frame);
    }));
  }
}
