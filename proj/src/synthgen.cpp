#include "motion_insight/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "motion_insight/error.hpp"
#include "motion_insight/events.hpp"
#include "motion_insight/ingest.hpp"

namespace motion_insight::synth {

using nlohmann::json;

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::CleanWalk: return "clean_walk";
    case Scenario::FreezeWalk: return "freeze_walk";
    case Scenario::FallStand: return "fall_stand";
    case Scenario::ImbalancedArmWalk: return "imbalanced_arm_walk";
    case Scenario::WeightBiasWalk: return "weight_bias_walk";
    case Scenario::SlowSitToStand: return "slow_sit_to_stand";
    case Scenario::CompositeDay: return "composite_day";
  }
  return "unknown";
}

std::optional<Scenario> scenario_from_string(std::string_view name) {
  for (auto s : {Scenario::CleanWalk, Scenario::FreezeWalk, Scenario::FallStand,
                 Scenario::ImbalancedArmWalk, Scenario::WeightBiasWalk, Scenario::SlowSitToStand,
                 Scenario::CompositeDay}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(DeficitKind kind) {
  switch (kind) {
    case DeficitKind::Freeze: return "freeze";
    case DeficitKind::Fall: return "fall";
    case DeficitKind::ImbalancedArm: return "imbalanced_arm";
    case DeficitKind::WeightBias: return "weight_bias";
    case DeficitKind::SlowSitToStand: return "slow_sit_to_stand";
  }
  return "unknown";
}

std::vector<Deficit> DeficitTruth::of_kind(DeficitKind kind) const {
  std::vector<Deficit> out;
  for (const auto& d : deficits) {
    if (d.kind == kind) out.push_back(d);
  }
  return out;
}

void validate(const ScenarioSpec& spec) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::Spec, what); };
  if (!(spec.duration_s > 0.0) || spec.duration_s > 86400.0) bad("duration_s must be in (0, 86400]");
  if (!(spec.fps > 0.0) || spec.fps > 1000.0) bad("fps must be in (0, 1000]");
  if (spec.freeze_count < 0 || spec.freeze_count > 20) bad("freeze_count must be in [0, 20]");
  if (!(spec.freeze_duration_s > 0.0) || spec.freeze_duration_s > 30.0) {
    bad("freeze_duration_s must be in (0, 30]");
  }
  if (!(spec.arm_ratio >= 1.0) || spec.arm_ratio > 10.0) bad("arm_ratio must be in [1, 10]");
  if (!(std::abs(spec.weight_bias) < 0.1)) bad("weight_bias must be in (-0.1, 0.1)");
  if (!(spec.sit_to_stand_s >= 1.0) || spec.sit_to_stand_s > 60.0) {
    bad("sit_to_stand_s must be in [1, 60]");
  }
  if (spec.joint_count != 8 && spec.joint_count != 22) bad("joint_count must be 8 or 22");
  if (spec.scenario == Scenario::FreezeWalk &&
      spec.freeze_count * (spec.freeze_duration_s + 2.0) > spec.duration_s) {
    bad("freeze_walk needs at least freeze_count * (freeze_duration_s + 2) seconds");
  }
}

std::vector<std::string> skeleton_joints(int joint_count) {
  if (joint_count == 8) {
    return {kCanonicalJoints.begin(), kCanonicalJoints.end()};
  }
  return {"pelvis",      "left_hip",     "right_hip",      "spine1",        "left_knee",
          "right_knee",  "spine2",       "left_ankle",     "right_ankle",   "spine3",
          "left_foot",   "right_foot",   "neck",           "left_collar",   "right_collar",
          "head",        "left_shoulder", "right_shoulder", "left_elbow",   "right_elbow",
          "left_hand",   "right_hand"};
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGaitHz = 0.9;
constexpr double kStrideAmplitude = 0.30;  // foot excursion from the pelvis, m
constexpr double kArmAmplitude = 0.25;
constexpr double kTurnRadius = 4.0;
constexpr double kNoiseSigma = 0.002;
constexpr double kQuantumInv = 1e4;  // positions are stored at 0.1 mm

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

double bump(double x) {  // sin^2 hump on [0, 1]
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double s = std::sin(kPi * x);
  return s * s;
}

// Body-local offset from the pelvis: lateral (+ = subject's right), up, forward.
struct Local {
  double lat = 0.0;
  double up = 0.0;
  double fwd = 0.0;
};

Local mix(const Local& a, const Local& b, double s) {
  return {a.lat + (b.lat - a.lat) * s, a.up + (b.up - a.up) * s, a.fwd + (b.fwd - a.fwd) * s};
}

struct Posture {
  double pelvis_h = 0.95;
  double lean_deg = 3.0;  // sagittal, + forward
  double stance_w = 0.12;
  double shift = 0.0;     // pelvis offset toward the left foot
  double foot_fwd_l = 0.0;
  double foot_fwd_r = 0.0;
  double foot_lift_l = 0.0;
  double foot_lift_r = 0.0;
  double knee_fwd = 0.03;
  Local hand_l{-0.22, -0.05, 0.02};
  Local hand_r{0.22, -0.05, 0.02};
};

Posture mix(const Posture& a, const Posture& b, double s) {
  auto m = [s](double x, double y) { return x + (y - x) * s; };
  Posture p;
  p.pelvis_h = m(a.pelvis_h, b.pelvis_h);
  p.lean_deg = m(a.lean_deg, b.lean_deg);
  p.stance_w = m(a.stance_w, b.stance_w);
  p.shift = m(a.shift, b.shift);
  p.foot_fwd_l = m(a.foot_fwd_l, b.foot_fwd_l);
  p.foot_fwd_r = m(a.foot_fwd_r, b.foot_fwd_r);
  p.foot_lift_l = m(a.foot_lift_l, b.foot_lift_l);
  p.foot_lift_r = m(a.foot_lift_r, b.foot_lift_r);
  p.knee_fwd = m(a.knee_fwd, b.knee_fwd);
  p.hand_l = mix(a.hand_l, b.hand_l, s);
  p.hand_r = mix(a.hand_r, b.hand_r, s);
  return p;
}

Posture standing_posture(double t) {
  Posture p;
  p.lean_deg = 3.0 + std::sin(2.0 * kPi * 0.2 * t);
  p.shift = 0.008 * std::sin(2.0 * kPi * 0.13 * t);
  p.foot_fwd_l = 0.02;
  return p;
}

Posture sitting_posture(double t) {
  Posture p;
  p.pelvis_h = 0.50;
  p.lean_deg = -8.0 + std::sin(2.0 * kPi * 0.1 * t);
  p.stance_w = 0.15;
  p.foot_fwd_l = 0.45;
  p.foot_fwd_r = 0.45;
  p.knee_fwd = 0.25;
  p.hand_l = {-0.18, 0.12, 0.30};
  p.hand_r = {0.18, 0.12, 0.30};
  return p;
}

// Per-block schedule resolved to frames.
struct ResolvedFreeze {
  std::int64_t start = 0;  // held frames, absolute within the segment
  std::int64_t end = 0;
  std::int64_t band_start = 0;  // every frame with both feet inside the band
  std::int64_t band_end = 0;
};

struct ResolvedBlock {
  const Block* block = nullptr;
  std::int64_t start = 0;
  std::int64_t end = 0;
  double gait_hz = kGaitHz;
  std::vector<ResolvedFreeze> freezes;
  std::vector<std::pair<std::int64_t, std::int64_t>> overlays;  // parallel to block->overlays
  std::int64_t fall_frame = -1;
};

std::int64_t to_frame(double seconds, double fps) {
  return static_cast<std::int64_t>(std::llround(seconds * fps));
}

ResolvedBlock resolve(const Block& block, double start_s, double fps) {
  ResolvedBlock r;
  r.block = &block;
  r.start = to_frame(start_s, fps);
  r.end = to_frame(start_s + block.duration_s, fps);
  for (const auto& ov : block.overlays) {
    const auto s = std::clamp(r.start + to_frame(ov.offset_s, fps), r.start, r.end);
    const auto e = std::clamp(s + to_frame(ov.duration_s, fps), s, r.end);
    r.overlays.emplace_back(s, e);
  }
  if (block.action == Action::Walking) {
    double frozen = 0.0;
    for (const auto& f : block.freezes) frozen += f.duration_s;
    const double active = std::max(block.duration_s - frozen, 0.5);
    const double half_cycles = std::max(1.0, std::round(2.0 * kGaitHz * active));
    r.gait_hz = half_cycles / (2.0 * active);
    // Seconds spent frozen before the current freeze; the gait phase skips them.
    double prior = 0.0;
    const double band = FreezeParams{}.delta_feet_m;
    for (const auto& f : block.freezes) {
      // Freeze onsets sit on a zero crossing of the gait phase, where both
      // feet pass under the pelvis.
      const double active_at = std::max(f.offset_s - prior, 0.0);
      const double snapped = std::round(2.0 * r.gait_hz * active_at) / (2.0 * r.gait_hz);
      const auto s = r.start + to_frame(snapped + prior, fps);
      auto in_band = [&](std::int64_t frame) {
        const double t = static_cast<double>(frame - r.start) / fps - prior;
        return std::fabs(kStrideAmplitude * std::sin(2.0 * kPi * r.gait_hz * t)) < band;
      };
      // The approach and the restart cross the band too, so the hold is
      // shortened to keep the in-band span at the requested duration.
      const std::int64_t floor = r.freezes.empty() ? r.start : r.freezes.back().band_end;
      std::int64_t before = 0;
      while (s - before - 1 >= floor && in_band(s - before - 1)) ++before;
      std::int64_t after = 0;
      while (after < to_frame(1.0, fps) && in_band(s + after)) ++after;
      const auto hold = std::max<std::int64_t>(1, to_frame(f.duration_s, fps) - before - after);
      r.freezes.push_back({s, s + hold, s - before, std::min(s + hold + after, r.end)});
      prior += static_cast<double>(hold) / fps;
    }
  }
  if (block.fall_at_s) r.fall_frame = r.start + to_frame(*block.fall_at_s, fps);
  return r;
}

struct BodyState {
  double x = 0.0;
  double z = 0.0;
  double heading = 0.0;  // forward = (sin h, 0, cos h)
  double turn_sign = 1.0;
};

void apply_overlays(const ResolvedBlock& rb, std::int64_t frame, Posture& p) {
  for (std::size_t k = 0; k < rb.overlays.size(); ++k) {
    const auto [s, e] = rb.overlays[k];
    if (frame < s || frame >= e) continue;
    const double u = bump(static_cast<double>(frame - s) / static_cast<double>(e - s));
    if (rb.block->overlays[k].action == Action::Reaching) {
      p.hand_r.fwd += 0.50 * u;
      p.hand_r.up += 0.55 * u;
      p.hand_r.lat -= 0.08 * u;
      p.lean_deg += 12.0 * u;
    } else {
      const Local mouth_l{-0.05, 0.55, 0.20};
      const Local mouth_r{0.05, 0.55, 0.20};
      p.hand_l = mix(p.hand_l, mouth_l, u);
      p.hand_r = mix(p.hand_r, mouth_r, u);
    }
  }
}

Posture walking_posture(const ResolvedBlock& rb, std::int64_t frame, double fps, bool& moving) {
  const Block& b = *rb.block;
  double frozen_before = 0.0;
  for (const auto& f : rb.freezes) {
    if (frame >= f.start && frame < f.end) {
      moving = false;
      const double t = static_cast<double>(frame - f.start) / fps;
      Posture p;
      p.lean_deg = 8.0;
      p.shift = b.weight_bias;
      p.foot_fwd_l = 0.02 * std::sin(2.0 * kPi * 5.0 * t);
      p.foot_fwd_r = -p.foot_fwd_l;
      p.hand_l.fwd = 0.01;
      p.hand_r.fwd = 0.01;
      return p;
    }
    if (frame >= f.end) frozen_before += static_cast<double>(f.end - f.start) / fps;
  }
  moving = true;
  const double t = static_cast<double>(frame - rb.start) / fps - frozen_before;
  const double phase = 2.0 * kPi * rb.gait_hz * t;
  const double s = std::sin(phase);
  const double c = std::cos(phase);

  Posture p;
  p.lean_deg = 5.0 + std::sin(2.0 * phase);
  p.pelvis_h = 0.95 + 0.01 * std::cos(2.0 * phase);
  p.shift = 0.02 * s + b.weight_bias;
  p.foot_fwd_l = kStrideAmplitude * s;
  p.foot_fwd_r = -kStrideAmplitude * s;
  p.foot_lift_l = 0.06 * std::max(0.0, c);
  p.foot_lift_r = 0.06 * std::max(0.0, -c);
  p.hand_l.fwd = -kArmAmplitude * s;
  p.hand_r.fwd = (kArmAmplitude / b.arm_ratio) * s;
  return p;
}

Posture posture_at(const ResolvedBlock& rb, std::int64_t frame, double fps, bool& moving) {
  const Block& b = *rb.block;
  const double t = static_cast<double>(frame - rb.start) / fps;
  const double u = b.duration_s > 0.0 ? t / b.duration_s : 0.0;
  moving = false;
  Posture p;
  switch (b.action) {
    case Action::Walking:
      p = walking_posture(rb, frame, fps, moving);
      break;
    case Action::Standing:
    case Action::Reaching:
      p = standing_posture(t);
      p.shift += b.weight_bias;
      if (rb.fall_frame >= 0 && frame >= rb.fall_frame) {
        const double k = smoothstep(static_cast<double>(frame - rb.fall_frame) / (1.2 * fps));
        Posture down = p;
        down.lean_deg = 80.0;
        down.pelvis_h = 0.20;
        down.foot_fwd_l = -0.55;
        down.foot_fwd_r = -0.55;
        down.hand_l = {-0.30, -0.10, 0.35};
        down.hand_r = {0.30, -0.10, 0.35};
        p = mix(p, down, k);
      }
      break;
    case Action::Sitting:
    case Action::TakingMedicine:
      p = sitting_posture(t);
      break;
    case Action::StandToSit:
      p = mix(standing_posture(t), sitting_posture(t), smoothstep(u));
      p.lean_deg += 30.0 * std::sin(kPi * std::clamp(u, 0.0, 1.0));
      break;
    case Action::SitToStand:
      if (b.slow) {
        // Repeated forward rocking before the rise completes.
        p = mix(sitting_posture(t), standing_posture(t), smoothstep((u - 0.6) / 0.4));
        p.lean_deg += 25.0 * bump(std::fmod(3.0 * u, 1.0));
      } else {
        p = mix(sitting_posture(t), standing_posture(t), smoothstep(u));
        p.lean_deg += 32.0 * std::sin(kPi * std::clamp(u, 0.0, 1.0));
      }
      break;
  }
  apply_overlays(rb, frame, p);
  return p;
}

// Writes one frame of joints in skeleton order.
void emit_joints(const Posture& p, const BodyState& st, int joint_count, Rng& rng,
                 std::vector<Vec3>& out) {
  const Vec3 forward{std::sin(st.heading), 0.0, std::cos(st.heading)};
  const Vec3 right{-std::cos(st.heading), 0.0, std::sin(st.heading)};
  const Vec3 up{0.0, 1.0, 0.0};
  const Vec3 pelvis{st.x, p.pelvis_h, st.z};
  auto world = [&](Local l) { return pelvis + l.lat * right + l.up * up + l.fwd * forward; };

  const double lean = p.lean_deg * kPi / 180.0;
  const Local trunk{0.0, std::cos(lean), std::sin(lean)};
  auto along = [&](double len, double lat = 0.0) {
    return Local{lat, trunk.up * len, trunk.fwd * len};
  };
  const Local hip_l{-0.10, -0.05, 0.0};
  const Local hip_r{0.10, -0.05, 0.0};
  const Local foot_l{-(p.stance_w - p.shift), 0.05 + p.foot_lift_l - p.pelvis_h, p.foot_fwd_l};
  const Local foot_r{p.stance_w + p.shift, 0.05 + p.foot_lift_r - p.pelvis_h, p.foot_fwd_r};
  const Local neck = along(0.50);

  std::vector<Local> joints;
  if (joint_count == 8) {
    joints = {Local{}, hip_l, hip_r, neck, p.hand_l, p.hand_r, foot_l, foot_r};
  } else {
    const Local ankle_l{foot_l.lat, foot_l.up + 0.05, foot_l.fwd - 0.08};
    const Local ankle_r{foot_r.lat, foot_r.up + 0.05, foot_r.fwd - 0.08};
    auto knee = [&](const Local& hip, const Local& ankle) {
      Local k = mix(hip, ankle, 0.5);
      k.fwd += p.knee_fwd;
      return k;
    };
    const Local shoulder_l = along(0.45, -0.18);
    const Local shoulder_r = along(0.45, 0.18);
    auto elbow = [&](const Local& shoulder, const Local& hand) {
      Local e = mix(shoulder, hand, 0.5);
      e.fwd -= 0.03;
      return e;
    };
    joints = {Local{},         hip_l,       hip_r,
              along(0.10),     knee(hip_l, ankle_l), knee(hip_r, ankle_r),
              along(0.22),     ankle_l,     ankle_r,
              along(0.36),     foot_l,      foot_r,
              neck,            along(0.40, -0.07), along(0.40, 0.07),
              along(0.62),     shoulder_l,  shoulder_r,
              elbow(shoulder_l, p.hand_l), elbow(shoulder_r, p.hand_r),
              p.hand_l,        p.hand_r};
  }
  auto q = [](double v) { return std::round(v * kQuantumInv) / kQuantumInv; };
  for (const Local& l : joints) {
    const Vec3 w = world(l);
    out.push_back({q(w.x + kNoiseSigma * rng.normal()), q(w.y + kNoiseSigma * rng.normal()),
                   q(w.z + kNoiseSigma * rng.normal())});
  }
}

void add_block_truth(const ResolvedBlock& rb, std::size_t segment, double fps, DeficitTruth& truth) {
  const Block& b = *rb.block;
  truth.schedule.push_back({b.action, segment, rb.start, rb.end});
  for (std::size_t k = 0; k < rb.overlays.size(); ++k) {
    truth.schedule.push_back(
        {b.overlays[k].action, segment, rb.overlays[k].first, rb.overlays[k].second});
  }
  for (std::size_t k = 0; k < rb.freezes.size(); ++k) {
    truth.deficits.push_back({DeficitKind::Freeze, segment, rb.freezes[k].band_start, rb.freezes[k].band_end,
                              {{"duration_s", b.freezes[k].duration_s}}});
  }
  if (rb.fall_frame >= 0) {
    truth.deficits.push_back({DeficitKind::Fall, segment, rb.fall_frame, rb.end,
                              {{"trunk_peak_deg", 80.0}, {"pelvis_drop_m", 0.75}}});
  }
  if (b.action == Action::Walking && b.arm_ratio > 1.0) {
    truth.deficits.push_back(
        {DeficitKind::ImbalancedArm, segment, rb.start, rb.end, {{"arm_ratio", b.arm_ratio}}});
  }
  if (b.weight_bias != 0.0) {
    truth.deficits.push_back(
        {DeficitKind::WeightBias, segment, rb.start, rb.end, {{"weight_bias", b.weight_bias}}});
  }
  if (b.action == Action::SitToStand && b.slow) {
    truth.deficits.push_back({DeficitKind::SlowSitToStand, segment, rb.start, rb.end,
                              {{"duration_s", static_cast<double>(rb.end - rb.start) / fps}}});
  }
}

}  // namespace

// ---------------------------------------------------------------------------

SyntheticDataset synthesize(const Plan& plan) {
  if (!(plan.fps > 0.0)) throw Error(ErrorCode::Spec, "plan fps must be positive");
  if (plan.joint_count != 8 && plan.joint_count != 22) {
    throw Error(ErrorCode::Spec, "joint_count must be 8 or 22");
  }
  SyntheticDataset out;
  out.dataset_id = plan.dataset_id;
  Rng rng(plan.seed);
  const double dt = 1.0 / plan.fps;

  for (std::size_t seg = 0; seg < plan.segments.size(); ++seg) {
    const SegmentPlan& sp = plan.segments[seg];
    std::vector<ResolvedBlock> blocks;
    double t = 0.0;
    for (const Block& b : sp.blocks) {
      if (!(b.duration_s > 0.0)) throw Error(ErrorCode::Spec, "block duration must be positive");
      blocks.push_back(resolve(b, t, plan.fps));
      t += b.duration_s;
    }
    const std::int64_t frames = blocks.empty() ? 0 : blocks.back().end;

    std::vector<Vec3> positions;
    positions.reserve(static_cast<std::size_t>(frames) * static_cast<std::size_t>(plan.joint_count));
    BodyState state;
    state.heading = 2.0 * kPi * rng.uniform();
    std::vector<ActionLabel> labels;

    for (const ResolvedBlock& rb : blocks) {
      if (rb.block->action == Action::Walking) state.turn_sign = -state.turn_sign;
      for (std::int64_t f = rb.start; f < rb.end; ++f) {
        bool moving = false;
        const Posture p = posture_at(rb, f, plan.fps, moving);
        emit_joints(p, state, plan.joint_count, rng, positions);
        if (moving) {
          const double speed = 2.0 * kStrideAmplitude * 2.0 * rb.gait_hz;
          state.x += speed * dt * std::sin(state.heading);
          state.z += speed * dt * std::cos(state.heading);
          state.heading += state.turn_sign * speed / kTurnRadius * dt;
        }
      }
      if (rb.end > rb.start) labels.push_back({rb.block->action, rb.start, rb.end});
      for (std::size_t k = 0; k < rb.overlays.size(); ++k) {
        const auto [s, e] = rb.overlays[k];
        if (e > s) labels.push_back({rb.block->overlays[k].action, s, e});
      }
      add_block_truth(rb, seg, plan.fps, out.truth);
    }

    SyntheticSegment segment;
    segment.wall_clock_start = sp.start;
    segment.capture =
        Capture(plan.fps, skeleton_joints(plan.joint_count), std::move(positions), sp.start);
    segment.labels = merge_labels(std::move(labels));
    out.segments.push_back(std::move(segment));
  }
  return out;
}

Dataset SyntheticDataset::to_dataset() const {
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    Segment s;
    s.ref = {"capture_" + std::to_string(i) + ".json", "labels_" + std::to_string(i) + ".json",
             segments[i].wall_clock_start};
    s.capture = segments[i].capture;
    s.labels = segments[i].labels;
    segs.push_back(std::move(s));
  }
  return Dataset(dataset_id, std::move(segs));
}

// ---------------------------------------------------------------------------

namespace {

TimePoint default_start() { return parse_rfc3339("2024-03-14T09:00:00Z"); }

Block block(Action a, double d) {
  Block b;
  b.action = a;
  b.duration_s = d;
  return b;
}

Block walk(double d) { return block(Action::Walking, d); }
Block stand(double d) { return block(Action::Standing, d); }
Block sit(double d) { return block(Action::Sitting, d); }
Block to_sit() { return block(Action::StandToSit, 3.0); }
Block to_stand() { return block(Action::SitToStand, 3.0); }

Block with_overlay(Block b, Action a, double offset, double duration) {
  b.overlays.push_back({a, offset, duration});
  return b;
}

Block with_freeze(Block b, double offset, double duration) {
  b.freezes.push_back({offset, duration});
  return b;
}

Block with_arm_ratio(Block b, double ratio) {
  b.arm_ratio = ratio;
  return b;
}

Plan composite_plan(std::uint64_t seed, int joint_count) {
  using namespace std::chrono_literals;
  Plan plan;
  plan.dataset_id = "composite-day-" + std::to_string(seed);
  plan.seed = seed;
  plan.joint_count = joint_count;
  const TimePoint day = default_start();

  SegmentPlan s0{day,
                 {with_overlay(stand(20), Action::Reaching, 5, 5), walk(60), stand(15), to_sit(),
                  with_overlay(sit(300), Action::TakingMedicine, 60, 20), to_stand(),
                  with_freeze(walk(45), 20, 1.5), with_overlay(stand(30), Action::Reaching, 10, 6),
                  with_arm_ratio(walk(60), 3.0), stand(40), walk(50), stand(124)}};

  SegmentPlan s1{day + 90min,
                 {stand(10), with_freeze(walk(40), 15, 1.5), stand(20), to_sit(),
                  with_overlay(sit(330), Action::TakingMedicine, 100, 25), to_stand(),
                  with_overlay(stand(15), Action::Reaching, 5, 6), walk(70), stand(25),
                  with_arm_ratio(walk(55), 3.0), stand(30), with_freeze(walk(40), 25, 2.0),
                  stand(109)}};

  Block slow = block(Action::SitToStand, 12.0);
  slow.slow = true;
  SegmentPlan s2{day + 4h,
                 {stand(15), to_sit(), sit(260), slow,
                  with_overlay(stand(20), Action::Reaching, 4, 6), walk(80), stand(30), walk(60),
                  stand(25), to_sit(), with_overlay(sit(150), Action::TakingMedicine, 30, 20),
                  to_stand(), stand(89)}};

  Block fall = stand(129);
  fall.fall_at_s = 109.0;
  SegmentPlan s3{day + 7h,
                 {stand(20), walk(90), with_overlay(stand(30), Action::Reaching, 10, 5), walk(60),
                  stand(40), to_sit(), sit(250), to_stand(), walk(50), stand(30), walk(45), fall}};

  plan.segments = {s0, s1, s2, s3};
  return plan;
}

}  // namespace

Plan plan_for(const ScenarioSpec& spec) {
  validate(spec);
  if (spec.scenario == Scenario::CompositeDay) {
    Plan p = composite_plan(spec.seed, spec.joint_count);
    p.fps = spec.fps;
    return p;
  }
  Plan plan;
  plan.dataset_id = std::string(to_string(spec.scenario)) + "-" + std::to_string(spec.seed);
  plan.fps = spec.fps;
  plan.seed = spec.seed;
  plan.joint_count = spec.joint_count;
  SegmentPlan seg{default_start(), {}};
  const double d = spec.duration_s;
  switch (spec.scenario) {
    case Scenario::CleanWalk:
      seg.blocks = {walk(d)};
      break;
    case Scenario::FreezeWalk: {
      Block b = walk(d);
      for (int i = 0; i < spec.freeze_count; ++i) {
        const double centre = d * (i + 1) / (spec.freeze_count + 1);
        b.freezes.push_back({centre - spec.freeze_duration_s / 2.0, spec.freeze_duration_s});
      }
      seg.blocks = {b};
      break;
    }
    case Scenario::FallStand: {
      Block b = stand(d);
      b.fall_at_s = 0.7 * d;
      seg.blocks = {b};
      break;
    }
    case Scenario::ImbalancedArmWalk:
      seg.blocks = {with_arm_ratio(walk(d), spec.arm_ratio)};
      break;
    case Scenario::WeightBiasWalk: {
      Block b = walk(d);
      b.weight_bias = spec.weight_bias;
      seg.blocks = {b};
      break;
    }
    case Scenario::SlowSitToStand: {
      Block b = block(Action::SitToStand, spec.sit_to_stand_s);
      b.slow = true;
      seg.blocks = {sit(5.0), b, stand(5.0)};
      break;
    }
    case Scenario::CompositeDay:
      break;
  }
  plan.segments = {seg};
  return plan;
}

SyntheticDataset generate(const ScenarioSpec& spec) { return synthesize(plan_for(spec)); }

SyntheticDataset composite_day(std::uint64_t seed, int joint_count) {
  ScenarioSpec spec;
  spec.scenario = Scenario::CompositeDay;
  spec.seed = seed;
  spec.joint_count = joint_count;
  return generate(spec);
}

std::string serialize_truth(const DeficitTruth& truth) {
  json deficits = json::array();
  for (const auto& d : truth.deficits) {
    json params = json::object();
    for (const auto& [k, v] : d.params) params[k] = v;
    deficits.push_back({{"kind", to_string(d.kind)},
                        {"segment", d.segment},
                        {"start_frame", d.start_frame},
                        {"end_frame", d.end_frame},
                        {"params", std::move(params)}});
  }
  json schedule = json::array();
  for (const auto& s : truth.schedule) {
    schedule.push_back({{"action", to_string(s.action)},
                        {"segment", s.segment},
                        {"start_frame", s.start_frame},
                        {"end_frame", s.end_frame}});
  }
  return json{{"deficits", std::move(deficits)}, {"schedule", std::move(schedule)}}.dump(2);
}

std::filesystem::path write_files(const SyntheticDataset& data, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  SegmentManifest manifest;
  manifest.dataset_id = data.dataset_id;
  for (std::size_t i = 0; i < data.segments.size(); ++i) {
    const auto& seg = data.segments[i];
    SegmentRef ref{"capture_" + std::to_string(i) + ".json", "labels_" + std::to_string(i) + ".json",
                   seg.wall_clock_start};
    write_text_file(out_dir / ref.capture_path, serialize_capture(seg.capture));
    write_text_file(out_dir / ref.labels_path, serialize_labels(seg.labels));
    manifest.segments.push_back(std::move(ref));
  }
  write_text_file(out_dir / "truth.json", serialize_truth(data.truth));
  const auto manifest_path = out_dir / "manifest.json";
  write_text_file(manifest_path, serialize_manifest(manifest));
  return manifest_path;
}

}  // namespace motion_insight::synth
