#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "motion_insight/aggregate.hpp"
#include "motion_insight/error.hpp"
#include "support.hpp"

using namespace motion_insight;
using testsupport::Gen;

namespace {

struct OwnedSlice {
  std::vector<double> values;
  std::vector<std::uint8_t> flags;

  explicit OwnedSlice(std::vector<double> v, std::vector<std::uint8_t> f = {})
      : values(std::move(v)), flags(std::move(f)) {
    if (flags.empty()) flags.assign(values.size(), frame_flags::kValid);
  }
  SeriesSlice view(std::int64_t first = 0) const { return {Variable::Trunk, first, values, flags}; }
};

ScopeMoments moments_of(const OwnedSlice& s) {
  const SeriesSlice v = s.view();
  return motion_insight::moments_of(std::span(&v, 1));
}

// Independent two-pass moments over valid values.
ScopeMoments oracle_moments(const OwnedSlice& s) {
  std::vector<double> v;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (s.flags[i] & frame_flags::kValid) v.push_back(s.values[i]);
  }
  ScopeMoments m;
  m.count = v.size();
  if (v.empty()) return m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(v.size()));
  return m;
}

OwnedSlice random_slice(Gen& g) {
  const auto n = static_cast<std::size_t>(g.integer(1, 3000));
  std::vector<double> values(n);
  std::vector<std::uint8_t> flags(n, frame_flags::kValid);
  const double base = g.uniform(-50, 50), spread = g.uniform(0.01, 20);
  double level = base;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.chance(0.02)) level = base + g.uniform(-3, 3) * spread;
    values[i] = level + g.uniform(-spread, spread);
    if (g.chance(0.02)) flags[i] = 0;
  }
  return OwnedSlice(values, flags);
}

}  // namespace

TEST_CASE("moments are population moments over valid frames") {
  const OwnedSlice s({2, 4, 4, 4, 5, 5, 7, 9, 1000}, {1, 1, 1, 1, 1, 1, 1, 1, 0});
  const auto m = moments_of(s);
  CHECK(m.count == 8);
  CHECK(m.mean == doctest::Approx(5.0));
  CHECK(m.stddev == doctest::Approx(2.0));
}

TEST_CASE("simplify examples") {
  SUBCASE("constant series") {
    const OwnedSlice s(std::vector<double>(50, 3.5));
    const auto out = simplify(s.view(10), moments_of(s));
    REQUIRE(out.bins.size() == 1);
    CHECK(out.bins[0] == Bin{10, 60, 3.5, false});
  }
  SUBCASE("plateau with a spike") {
    std::vector<double> v(100, 5.0);
    v.insert(v.end(), 10, 40.0);
    v.insert(v.end(), 100, 5.0);
    const OwnedSlice s(v);
    const auto out = simplify(s.view(), moments_of(s));
    REQUIRE(out.bins.size() == 3);
    CHECK(out.bins[0] == Bin{0, 100, 5.0, false});
    CHECK(out.bins[1] == Bin{100, 110, 40.0, true});
    CHECK(out.bins[2] == Bin{110, 210, 5.0, false});
  }
  SUBCASE("invalid frames split runs and stay uncovered") {
    const OwnedSlice s({1, 1, 1, 1, 1}, {1, 1, 0, 1, 1});
    const auto out = simplify(s.view(), moments_of(s));
    REQUIRE(out.bins.size() == 2);
    CHECK(out.bins[0].end_frame == 2);
    CHECK(out.bins[1].start_frame == 3);
  }
  SUBCASE("empty slice") {
    const OwnedSlice s({});
    CHECK_THROWS_AS(simplify(s.view(), {}), Error);
  }
  SUBCASE("all invalid gives no bins") {
    const OwnedSlice s({1, 2}, {0, 0});
    CHECK(simplify(s.view(), {}).bins.empty());
  }
}

TEST_CASE("simplify equals the run-segmentation oracle and conserves the mean") {
  Gen g(101);
  for (int trial = 0; trial < 500; ++trial) {
    const OwnedSlice s = random_slice(g);
    const auto first = g.integer(0, 100000);
    const ScopeMoments m = g.chance(0.5) ? oracle_moments(s) : ScopeMoments{g.uniform(-50, 50), g.uniform(0, 30), 1};
    const auto out = simplify(s.view(first), m);
    const auto expected = testsupport::oracle_bins(s.values, s.flags, first, m.mean, m.stddev);
    REQUIRE(out.bins.size() == expected.size());
    for (std::size_t b = 0; b < expected.size(); ++b) {
      CHECK(out.bins[b].start_frame == expected[b].start_frame);
      CHECK(out.bins[b].end_frame == expected[b].end_frame);
      CHECK(out.bins[b].is_outlier == expected[b].is_outlier);
      CHECK(testsupport::relative_error(out.bins[b].mean, expected[b].mean) < 1e-12);
    }

    double weighted = 0.0;
    std::size_t covered = 0;
    for (const auto& b : out.bins) {
      weighted += b.mean * static_cast<double>(b.end_frame - b.start_frame);
      covered += static_cast<std::size_t>(b.end_frame - b.start_frame);
    }
    const auto om = oracle_moments(s);
    CHECK(covered == om.count);
    if (om.count > 0) CHECK(testsupport::relative_error(weighted / static_cast<double>(covered), om.mean) < 1e-9);

    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (!(s.flags[i] & frame_flags::kValid)) continue;
      const auto f = first + static_cast<std::int64_t>(i);
      const auto it = std::find_if(out.bins.begin(), out.bins.end(),
                                   [&](const Bin& b) { return b.start_frame <= f && f < b.end_frame; });
      REQUIRE(it != out.bins.end());
      CHECK(it->is_outlier == (std::fabs(s.values[i] - m.mean) > m.stddev));
    }
  }
}

TEST_CASE("downsample") {
  SUBCASE("short slices come back unchanged") {
    const OwnedSlice s({1, 2, 3, 4});
    const auto pts = downsample(s.view(7), 10);
    REQUIRE(pts.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(pts[i].frame == 7 + static_cast<std::int64_t>(i));
      CHECK(pts[i].mean == s.values[i]);
      CHECK(pts[i].min == s.values[i]);
      CHECK(pts[i].max == s.values[i]);
      CHECK(pts[i].count == 1);
    }
  }
  SUBCASE("all invalid is empty") {
    const OwnedSlice s({1, 2, 3}, {0, 0, 0});
    CHECK(downsample(s.view(), 10).empty());
  }
  SUBCASE("max_points below two is rejected") {
    const OwnedSlice s({1, 2, 3});
    CHECK_THROWS_AS(downsample(s.view(), 1), Error);
  }
  SUBCASE("long slices keep their extremes and counts") {
    Gen g(111);
    for (int trial = 0; trial < 30; ++trial) {
      const OwnedSlice s = random_slice(g);
      const auto max_points = static_cast<std::size_t>(g.integer(2, 400));
      const auto pts = downsample(s.view(), max_points);
      CHECK(pts.size() <= max_points);
      const auto om = oracle_moments(s);
      std::size_t total = 0;
      double lo = INFINITY, hi = -INFINITY, sum = 0.0;
      for (const auto& p : pts) {
        total += p.count;
        lo = std::min(lo, p.min);
        hi = std::max(hi, p.max);
        sum += p.mean * static_cast<double>(p.count);
        CHECK(p.min <= p.mean);
        CHECK(p.mean <= p.max);
      }
      CHECK(total == om.count);
      if (om.count == 0) continue;
      double true_lo = INFINITY, true_hi = -INFINITY;
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!(s.flags[i] & frame_flags::kValid)) continue;
        true_lo = std::min(true_lo, s.values[i]);
        true_hi = std::max(true_hi, s.values[i]);
      }
      CHECK(lo == true_lo);
      CHECK(hi == true_hi);
      CHECK(testsupport::relative_error(sum / static_cast<double>(total), om.mean) < 1e-9);
    }
  }
}

TEST_CASE("distribution") {
  SUBCASE("balanced weight centred at 0.5") {
    Gen g(121);
    std::vector<double> l, r;
    for (int i = 0; i < 5000; ++i) {
      const double v = i % 4 == 0 ? 0.5 : 0.5 + g.uniform(-0.1, 0.1);
      l.push_back(v);
      r.push_back(1.0 - v);
    }
    const auto d = distribution(VariableFamily::Weight, l, r);
    REQUIRE(d.edges.size() == kDistributionBins + 1);
    const auto mode = static_cast<std::size_t>(std::max_element(d.left.begin(), d.left.end()) - d.left.begin());
    CHECK(d.edges[mode] <= 0.5);
    CHECK(d.edges[mode + 1] >= 0.5);
    CHECK(d.right.size() == kDistributionBins);
  }
  SUBCASE("single value puts all mass in one bin") {
    const std::vector<double> v(100, 12.0);
    const auto d = distribution(VariableFamily::Trunk, v);
    CHECK(d.right.empty());
    CHECK(std::count_if(d.left.begin(), d.left.end(), [](auto c) { return c > 0; }) == 1);
    CHECK(std::accumulate(d.left.begin(), d.left.end(), std::uint64_t{0}) == 100);
  }
  SUBCASE("paired families share one range") {
    const std::vector<double> l{0.0, 0.1, 0.2}, r{0.5, 0.6, 0.7};
    const auto d = distribution(VariableFamily::Arm, l, r);
    CHECK(d.edges.front() < 0.01);
    CHECK(d.edges.back() > 0.69);
    CHECK(std::accumulate(d.right.begin(), d.right.end(), std::uint64_t{0}) >= 2);
  }
  SUBCASE("edges increase") {
    Gen g(131);
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) v.push_back(g.uniform(-3, 7));
    const auto d = distribution(VariableFamily::Foot, v, v);
    for (std::size_t i = 1; i < d.edges.size(); ++i) CHECK(d.edges[i] > d.edges[i - 1]);
  }
  SUBCASE("empty scope") {
    const std::vector<double> v{NAN};
    CHECK_THROWS_AS(distribution(VariableFamily::Trunk, v), Error);
  }
}

TEST_CASE("weight text bands") {
  CHECK(describe_weight(0.5) == WeightText::Balanced);
  CHECK(describe_weight(0.54) == WeightText::Balanced);
  CHECK(describe_weight(0.6) == WeightText::SlightLeft);
  CHECK(describe_weight(0.4) == WeightText::SlightRight);
  CHECK(describe_weight(0.7) == WeightText::StrongLeft);
  CHECK(describe_weight(0.2) == WeightText::StrongRight);
  CHECK(to_string(WeightText::StrongLeft) == "strong_left");
}

TEST_CASE("event stats") {
  auto s = testsupport::series_from(std::vector<double>(700, 0.1), std::vector<double>(700, -0.1), {});
  for (std::size_t i = 0; i < 700; ++i) {
    s.trunk_deg[i] = static_cast<double>(i % 10);
    s.weight_l[i] = 0.7;
    s.weight_r[i] = 0.3;
  }
  const Event e{Action::Standing, 0, 50, 650, 30.0};
  const auto st = event_stats(e, s);
  CHECK(st.duration_s == doctest::Approx(20.0));
  CHECK(st.valid_frames == 600);
  CHECK(st.weight_mean_l == doctest::Approx(0.7));
  CHECK(st.weight_text == WeightText::StrongLeft);
  const auto& trunk = st.variables[static_cast<std::size_t>(Variable::Trunk)];
  CHECK(trunk.min == 0.0);
  CHECK(trunk.max == 9.0);
  CHECK(trunk.mean == doctest::Approx(4.5));
  CHECK(trunk.count == 600);

  const auto dead = testsupport::series_from(std::vector<double>(10, 0.0), std::vector<double>(10, 0.0),
                                             std::vector<bool>(10, false));
  try {
    event_stats({Action::Standing, 0, 0, 10, 30.0}, dead);
    FAIL("expected NoValidFrames");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NoValidFrames);
  }
}

TEST_CASE("global stats") {
  std::vector<Segment> segs;
  const TimePoint t0 = parse_rfc3339("2024-03-14T09:00:00Z");
  for (int k = 0; k < 2; ++k) {
    Segment s;
    s.ref.wall_clock_start = t0 + std::chrono::hours(k);
    s.capture = Capture(30.0, testsupport::canonical_names(), std::vector<Vec3>(300 * 8, Vec3{0, 1, 0}));
    s.labels = {{Action::Sitting, 0, 150}, {Action::Walking, 150, 300}};
    segs.push_back(std::move(s));
  }
  const Dataset ds("d", std::move(segs));
  const auto g = global_stats(ds, extract_events(ds));
  CHECK(g.percent_sitting == doctest::Approx(0.5));
  CHECK(g.total_frames == 600);
  CHECK(g.captured_s == doctest::Approx(20.0));
  CHECK(g.span_s == doctest::Approx(3610.0));
  CHECK(g.action_events[static_cast<std::size_t>(Action::Walking)] == 2);
  CHECK(g.action_seconds[static_cast<std::size_t>(Action::Sitting)] == doctest::Approx(10.0));
  CHECK(g.action_seconds[static_cast<std::size_t>(Action::Reaching)] == 0.0);
}

TEST_CASE("scope names and families") {
  CHECK(simplify_scope_from_string("global") == SimplifyScope::Global);
  CHECK(simplify_scope_from_string(to_string(SimplifyScope::Selection)) == SimplifyScope::Selection);
  CHECK_FALSE(simplify_scope_from_string("local").has_value());
  CHECK(family_of(Variable::WeightR) == VariableFamily::Weight);
  CHECK(family_from_string("arm") == VariableFamily::Arm);
  CHECK_FALSE(is_paired(VariableFamily::Trunk));
}
