#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "motion_insight/model.hpp"

namespace motion_insight {

// Pelvis-local orthonormal frame: x to the subject's right (horizontal),
// y vertical, z anatomical forward.
struct LocalFrame {
  Vec3 x_hat;
  Vec3 y_hat{0.0, 1.0, 0.0};
  Vec3 z_hat;
  bool valid = false;
};

struct KinematicsOptions {
  bool forward_flip = false;    // negate z_hat for opposite-chirality input
  bool weight_literal = false;  // same-side numerator in the weight ratio
  double sanity_bound_m = 2.0;  // arm use / |foot position| above this flags a frame suspect
  int fallback_frames = 5;      // frames a degenerate pelvis frame may borrow the last valid one
};

inline constexpr double kDegenerateEpsilon = 1e-6;

/// Horizontal projection of (pelvis - left_hip), normalized, as x; z = y cross x.
/// Returns an invalid frame when the hips are horizontally coincident with the
/// pelvis or an input is non-finite.
LocalFrame pelvis_frame(Vec3 pelvis, Vec3 left_hip, bool forward_flip = false);

/// Angle in degrees between (neck - pelvis) and the frame's vertical; 0 is upright.
std::optional<double> trunk_angle(Vec3 pelvis, Vec3 neck, const LocalFrame& frame);

/// |(pelvis - hand) . z_hat|, meters.
double arm_use(Vec3 pelvis, Vec3 hand, const LocalFrame& frame);

/// (foot - pelvis) . z_hat, meters; positive when the foot is in front.
double foot_position(Vec3 pelvis, Vec3 foot, const LocalFrame& frame);

struct WeightShift {
  double left = 0.5;
  double right = 0.5;
};

/// Coronal distances rho_s = |(pelvis - foot_s) . x_hat|. By default the
/// opposite side's distance is the numerator, so weight_l > 0.5 means the
/// pelvis sits over the left foot. Empty when rho_l + rho_r <= epsilon.
std::optional<WeightShift> weight_shift(Vec3 pelvis, Vec3 left_foot, Vec3 right_foot,
                                        const LocalFrame& frame, bool literal = false);

enum class Variable : std::uint8_t { Trunk, ArmL, ArmR, FootL, FootR, WeightL, WeightR };

inline constexpr std::array<Variable, 7> kAllVariables = {
    Variable::Trunk, Variable::ArmL,    Variable::ArmR,    Variable::FootL,
    Variable::FootR, Variable::WeightL, Variable::WeightR,
};

std::string_view to_string(Variable v);
std::optional<Variable> variable_from_string(std::string_view name);

namespace frame_flags {
inline constexpr std::uint8_t kValid = 1u << 0;
inline constexpr std::uint8_t kSuspect = 1u << 1;   // exceeds the anatomical sanity bound
inline constexpr std::uint8_t kBorrowed = 1u << 2;  // used a previous frame's axes
}  // namespace frame_flags

/// Per-frame body variables in structure-of-arrays layout. Invalid frames hold
/// NaN in every variable.
struct BodyVariableSeries {
  double fps = 30.0;
  std::vector<double> trunk_deg;
  std::vector<double> arm_use_l;
  std::vector<double> arm_use_r;
  std::vector<double> foot_pos_l;
  std::vector<double> foot_pos_r;
  std::vector<double> weight_l;
  std::vector<double> weight_r;
  std::vector<std::uint8_t> flags;
  // Frame whose pelvis/left-hip positions define the axes used at each frame,
  // or -1 for gaps.
  std::vector<std::int64_t> axes_source;

  std::size_t size() const noexcept { return flags.size(); }
  bool valid(std::size_t i) const { return (flags[i] & frame_flags::kValid) != 0; }
  std::span<const double> values(Variable v) const;
  std::size_t gap_count() const;
};

/// Body variables for every frame. A degenerate pelvis frame reuses the last
/// valid axes for up to `fallback_frames` consecutive frames; beyond that, or
/// for frames with missing joints, a degenerate trunk or coincident feet, the
/// frame is a gap. Linear in the frame count.
BodyVariableSeries compute_series(const Capture& capture, const KinematicsOptions& options = {});

}  // namespace motion_insight
