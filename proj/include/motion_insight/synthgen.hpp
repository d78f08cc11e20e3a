#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "motion_insight/model.hpp"

namespace motion_insight::synth {

enum class Scenario : std::uint8_t {
  CleanWalk,
  FreezeWalk,
  FallStand,
  ImbalancedArmWalk,
  WeightBiasWalk,
  SlowSitToStand,
  CompositeDay,
};

std::string_view to_string(Scenario s);
std::optional<Scenario> scenario_from_string(std::string_view name);

struct ScenarioSpec {
  Scenario scenario = Scenario::CleanWalk;
  double duration_s = 60.0;  // ignored by composite_day
  double fps = 30.0;
  std::uint64_t seed = 1;
  int freeze_count = 1;
  double freeze_duration_s = 1.5;
  double arm_ratio = 3.0;      // left/right arm-swing amplitude ratio
  double weight_bias = 0.05;   // pelvis offset toward the left foot, meters; negative = right
  double sit_to_stand_s = 12.0;
  int joint_count = 22;        // 8 (canonical only) or 22
};

/// Throws Error(Spec) when a field is outside its documented range.
void validate(const ScenarioSpec& spec);

// ---------------------------------------------------------------------------
// Plans: the schedule a capture is synthesized from.

struct Overlay {
  Action action = Action::Reaching;  // reaching or taking_medicine
  double offset_s = 0.0;
  double duration_s = 0.0;
};

struct FreezeInjection {
  double offset_s = 0.0;  // snapped to the nearest gait zero crossing
  double duration_s = 1.5;
};

struct Block {
  Action action = Action::Standing;
  double duration_s = 10.0;
  std::vector<Overlay> overlays;
  std::vector<FreezeInjection> freezes;  // walking only
  double arm_ratio = 1.0;                // walking only; 1 = symmetric swing
  double weight_bias = 0.0;              // walking or standing
  std::optional<double> fall_at_s;       // standing only
  bool slow = false;                     // sit_to_stand only; marks a deficit
};

struct SegmentPlan {
  TimePoint start;
  std::vector<Block> blocks;
};

struct Plan {
  std::string dataset_id = "synthetic";
  double fps = 30.0;
  std::uint64_t seed = 1;
  int joint_count = 22;
  std::vector<SegmentPlan> segments;
};

// ---------------------------------------------------------------------------
// Ground truth

enum class DeficitKind : std::uint8_t { Freeze, Fall, ImbalancedArm, WeightBias, SlowSitToStand };
std::string_view to_string(DeficitKind kind);

struct Deficit {
  DeficitKind kind = DeficitKind::Freeze;
  std::size_t segment = 0;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  std::map<std::string, double> params;
};

struct ScheduledAction {
  Action action = Action::Standing;
  std::size_t segment = 0;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
};

struct DeficitTruth {
  std::vector<Deficit> deficits;
  std::vector<ScheduledAction> schedule;

  std::vector<Deficit> of_kind(DeficitKind kind) const;
};

std::string serialize_truth(const DeficitTruth& truth);

struct SyntheticSegment {
  TimePoint wall_clock_start;
  Capture capture;
  std::vector<ActionLabel> labels;
};

struct SyntheticDataset {
  std::string dataset_id;
  std::vector<SyntheticSegment> segments;
  DeficitTruth truth;

  Dataset to_dataset() const;
};

/// Deterministic for a fixed plan (seed included).
SyntheticDataset synthesize(const Plan& plan);

/// Builds the plan for a scenario and synthesizes it.
Plan plan_for(const ScenarioSpec& spec);
SyntheticDataset generate(const ScenarioSpec& spec);

/// Four ~12.5 minute segments with all seven actions, three freezes, one
/// fall, two imbalanced-arm walks and one slow sit-to-stand.
SyntheticDataset composite_day(std::uint64_t seed, int joint_count = 22);

/// Writes manifest.json, capture_<k>.json, labels_<k>.json and truth.json.
/// Returns the manifest path.
std::filesystem::path write_files(const SyntheticDataset& data, const std::filesystem::path& out_dir);

/// Joint names of the synthetic skeleton (8 canonical or 22 joints).
std::vector<std::string> skeleton_joints(int joint_count);

}  // namespace motion_insight::synth
