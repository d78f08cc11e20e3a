#include <doctest.h>

#include <algorithm>

#include "motion_insight/aggregate.hpp"
#include "motion_insight/error.hpp"
#include "motion_insight/events.hpp"
#include "motion_insight/ingest.hpp"
#include "motion_insight/synthgen.hpp"
#include "support.hpp"

using namespace motion_insight;
namespace synth = motion_insight::synth;

namespace {

struct Analyzed {
  synth::SyntheticDataset data;
  Dataset dataset;
  std::vector<BodyVariableSeries> series;
  EventSet events;

  explicit Analyzed(synth::SyntheticDataset d) : data(std::move(d)), dataset(data.to_dataset()) {
    for (const auto& seg : dataset.segments()) series.push_back(compute_series(seg.capture));
    events = extract_events(dataset);
  }
  FilterContext ctx() const { return {series, FilterThresholds{}, FreezeParams{}}; }
  std::vector<FreezeInterval> freezes() const { return detect_freezes(series, events, FreezeParams{}); }
};

synth::ScenarioSpec spec_of(synth::Scenario s, double duration = 30.0) {
  synth::ScenarioSpec spec;
  spec.scenario = s;
  spec.duration_s = duration;
  spec.joint_count = 8;
  return spec;
}

double overlap_fraction(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
  const auto inter = std::max<std::int64_t>(0, std::min(a1, b1) - std::max(a0, b0));
  return static_cast<double>(inter) / static_cast<double>(std::max(a1 - a0, b1 - b0));
}

}  // namespace

TEST_CASE("scenario spec validation") {
  auto code = [](const synth::ScenarioSpec& s) {
    try {
      synth::validate(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::NotFound;
  };
  synth::ScenarioSpec ok;
  CHECK(code(ok) == ErrorCode::NotFound);
  auto bad = ok;
  bad.duration_s = 0;
  CHECK(code(bad) == ErrorCode::Spec);
  bad = ok;
  bad.fps = -1;
  CHECK(code(bad) == ErrorCode::Spec);
  bad = ok;
  bad.joint_count = 12;
  CHECK(code(bad) == ErrorCode::Spec);
  bad = ok;
  bad.arm_ratio = 0.5;
  CHECK(code(bad) == ErrorCode::Spec);
  bad = ok;
  bad.weight_bias = 0.2;
  CHECK(code(bad) == ErrorCode::Spec);
  bad = ok;
  bad.scenario = synth::Scenario::FreezeWalk;
  bad.duration_s = 5;
  bad.freeze_count = 3;
  CHECK(code(bad) == ErrorCode::Spec);

  for (auto s : {synth::Scenario::CleanWalk, synth::Scenario::FreezeWalk, synth::Scenario::FallStand,
                 synth::Scenario::ImbalancedArmWalk, synth::Scenario::WeightBiasWalk,
                 synth::Scenario::SlowSitToStand, synth::Scenario::CompositeDay}) {
    CHECK(synth::scenario_from_string(synth::to_string(s)) == s);
  }
  CHECK_FALSE(synth::scenario_from_string("marathon").has_value());
}

TEST_CASE("clean walk has no freeze candidates") {
  const Analyzed a(synth::generate(spec_of(synth::Scenario::CleanWalk, 60)));
  CHECK(a.events.of_action(Action::Walking).size() == 1);
  CHECK(a.freezes().empty());
  CHECK(a.data.truth.deficits.empty());
  CHECK(a.series[0].gap_count() == 0);
}

TEST_CASE("an injected freeze is detected with at least 80 percent overlap") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto spec = spec_of(synth::Scenario::FreezeWalk);
    spec.seed = seed;
    const Analyzed a(synth::generate(spec));
    const auto truth = a.data.truth.of_kind(synth::DeficitKind::Freeze);
    const auto found = a.freezes();
    REQUIRE(truth.size() == 1);
    REQUIRE(found.size() == 1);
    CHECK(overlap_fraction(found[0].start_frame, found[0].end_frame, truth[0].start_frame, truth[0].end_frame) >=
          0.8);
  }
  auto multi = spec_of(synth::Scenario::FreezeWalk, 60);
  multi.freeze_count = 3;
  const Analyzed a(synth::generate(multi));
  CHECK(a.freezes().size() == 3);
}

TEST_CASE("the truth interval spans exactly the requested in-band time") {
  for (double duration : {0.9, 1.0, 1.5, 2.7}) {
    auto spec = spec_of(synth::Scenario::FreezeWalk);
    spec.freeze_duration_s = duration;
    const Analyzed a(synth::generate(spec));
    const auto truth = a.data.truth.of_kind(synth::DeficitKind::Freeze);
    REQUIRE(truth.size() == 1);
    CHECK(truth[0].end_frame - truth[0].start_frame == std::llround(duration * 30.0));
    const auto& s = a.series[0];
    auto pinned = [&](std::int64_t f) {
      const auto i = static_cast<std::size_t>(f);
      return std::fabs(s.foot_pos_l[i]) < 0.15 && std::fabs(s.foot_pos_r[i]) < 0.15;
    };
    CHECK_FALSE(pinned(truth[0].start_frame - 1));
    CHECK_FALSE(pinned(truth[0].end_frame));
    const auto found = a.freezes();
    CHECK(found.size() == (duration >= 1.0 ? 1u : 0u));
    if (!found.empty()) {
      CHECK(found[0].start_frame == truth[0].start_frame);
      CHECK(found[0].end_frame == truth[0].end_frame);
    }
  }
}

TEST_CASE("short pinned spells are not freezes") {
  auto spec = spec_of(synth::Scenario::FreezeWalk);
  spec.freeze_duration_s = 0.6;
  const Analyzed a(synth::generate(spec));
  CHECK(a.freezes().empty());
}

TEST_CASE("generation is deterministic per seed") {
  auto spec = spec_of(synth::Scenario::WeightBiasWalk, 10);
  const auto a = synth::generate(spec);
  const auto b = synth::generate(spec);
  CHECK(serialize_capture(a.segments[0].capture) == serialize_capture(b.segments[0].capture));
  CHECK(synth::serialize_truth(a.truth) == synth::serialize_truth(b.truth));
  spec.seed = 2;
  CHECK(serialize_capture(synth::generate(spec).segments[0].capture) != serialize_capture(a.segments[0].capture));
}

TEST_CASE("weight-biased walking reads as a strong left lean") {
  const Analyzed a(synth::generate(spec_of(synth::Scenario::WeightBiasWalk, 60)));
  const Event& walk = a.events.of_action(Action::Walking)[0];
  const auto st = event_stats(walk, a.series[0]);
  CHECK(st.weight_text == WeightText::StrongLeft);
  CHECK(matches(walk, {FilterKind::ImbalancedWeight, 0.15}, a.ctx()));

  const auto d = distribution(VariableFamily::Weight, a.series[0].weight_l, a.series[0].weight_r);
  const auto mode = static_cast<std::size_t>(std::max_element(d.left.begin(), d.left.end()) - d.left.begin());
  CHECK((d.edges[mode] + d.edges[mode + 1]) / 2 > 0.55);

  auto right = spec_of(synth::Scenario::WeightBiasWalk, 20);
  right.weight_bias = -0.05;
  const Analyzed r(synth::generate(right));
  CHECK(event_stats(r.events.events[0], r.series[0]).weight_text == WeightText::StrongRight);
}

TEST_CASE("imbalanced arm swing exceeds the ratio filter") {
  const Analyzed a(synth::generate(spec_of(synth::Scenario::ImbalancedArmWalk, 40)));
  const Event& walk = a.events.of_action(Action::Walking)[0];
  CHECK(matches(walk, {FilterKind::ImbalancedArm, 2.0}, a.ctx()));
  const Analyzed clean(synth::generate(spec_of(synth::Scenario::CleanWalk, 40)));
  CHECK_FALSE(matches(clean.events.of_action(Action::Walking)[0], {FilterKind::ImbalancedArm, 2.0}, clean.ctx()));
}

TEST_CASE("slow sit-to-stand lasts longer than ten seconds") {
  const Analyzed a(synth::generate(spec_of(synth::Scenario::SlowSitToStand)));
  const auto transfers = a.events.of_action(Action::SitToStand);
  REQUIRE(transfers.size() == 1);
  CHECK(transfers[0].duration_s() > 10.0);
  CHECK(matches(transfers[0], {FilterKind::MinDuration, 5.0}, a.ctx()));
}

TEST_CASE("a fall drives the trunk past sixty degrees") {
  const Analyzed a(synth::generate(spec_of(synth::Scenario::FallStand)));
  const auto falls = a.data.truth.of_kind(synth::DeficitKind::Fall);
  REQUIRE(falls.size() == 1);
  const auto& s = a.series[0];
  double peak = 0.0;
  for (auto f = falls[0].start_frame; f < falls[0].end_frame; ++f) {
    const auto i = static_cast<std::size_t>(f);
    if (s.valid(i)) peak = std::max(peak, s.trunk_deg[i]);
  }
  CHECK(peak > 60.0);
  CHECK(matches(a.events.of_action(Action::Standing)[0], {FilterKind::HighTrunk, 25.0}, a.ctx()));
}

TEST_CASE("composite day") {
  const Analyzed a(synth::composite_day(7, 8));
  CHECK(a.dataset.segment_count() == 4);
  CHECK(a.dataset.total_duration_s() == doctest::Approx(3000.0));
  for (auto act : kAllActions) CHECK_FALSE(a.events.of_action(act).empty());

  const auto g = global_stats(a.dataset, a.events);
  CHECK(g.percent_sitting >= 0.25);
  CHECK(g.percent_sitting <= 0.5);

  SUBCASE("every deficit sits inside a scheduled action") {
    for (const auto& d : a.data.truth.deficits) {
      const bool inside = std::any_of(a.data.truth.schedule.begin(), a.data.truth.schedule.end(),
                                      [&](const synth::ScheduledAction& s) {
                                        return s.segment == d.segment && s.start_frame <= d.start_frame &&
                                               d.end_frame <= s.end_frame;
                                      });
      CHECK(inside);
    }
    CHECK(a.data.truth.of_kind(synth::DeficitKind::Freeze).size() == 3);
    CHECK(a.data.truth.of_kind(synth::DeficitKind::Fall).size() == 1);
    CHECK(a.data.truth.of_kind(synth::DeficitKind::ImbalancedArm).size() == 2);
    CHECK(a.data.truth.of_kind(synth::DeficitKind::SlowSitToStand).size() == 1);
  }
  SUBCASE("the freeze predicate holds on every injected freeze") {
    for (const auto& d : a.data.truth.of_kind(synth::DeficitKind::Freeze)) {
      const auto& s = a.series[d.segment];
      for (auto f = d.start_frame; f < d.end_frame; ++f) {
        const auto i = static_cast<std::size_t>(f);
        CHECK(std::fabs(s.foot_pos_l[i]) < 0.15);
        CHECK(std::fabs(s.foot_pos_r[i]) < 0.15);
      }
    }
  }
  SUBCASE("files load under strict parsing") {
    testsupport::TempDir dir("composite");
    const auto path = synth::write_files(a.data, dir.path);
    const Dataset loaded = load_dataset(path);
    REQUIRE(loaded.segment_count() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(loaded.segment(k).capture == a.dataset.segment(k).capture);
      CHECK(loaded.segment(k).labels == a.dataset.segment(k).labels);
    }
    CHECK(std::filesystem::exists(dir.path / "truth.json"));
  }
}

TEST_CASE("skeletons") {
  CHECK(synth::skeleton_joints(8).size() == 8);
  const auto full = synth::skeleton_joints(22);
  CHECK(full.size() == 22);
  for (auto name : kCanonicalJoints) CHECK(std::find(full.begin(), full.end(), name) != full.end());
  auto spec = spec_of(synth::Scenario::CleanWalk, 2);
  spec.joint_count = 22;
  CHECK(synth::generate(spec).segments[0].capture.joint_count() == 22);
}
