#include "motion_insight/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace motion_insight {

LocalFrame pelvis_frame(Vec3 pelvis, Vec3 left_hip, bool forward_flip) {
  LocalFrame frame;
  if (!is_finite(pelvis) || !is_finite(left_hip)) return frame;
  const Vec3 lateral{pelvis.x - left_hip.x, 0.0, pelvis.z - left_hip.z};
  const double len = norm(lateral);
  if (len <= kDegenerateEpsilon) return frame;
  frame.x_hat = (1.0 / len) * lateral;
  frame.y_hat = {0.0, 1.0, 0.0};
  frame.z_hat = cross(frame.y_hat, frame.x_hat);
  if (forward_flip) frame.z_hat = -1.0 * frame.z_hat;
  frame.valid = true;
  return frame;
}

std::optional<double> trunk_angle(Vec3 pelvis, Vec3 neck, const LocalFrame& frame) {
  const Vec3 trunk = neck - pelvis;
  const double len = norm(trunk);
  if (!(len > kDegenerateEpsilon)) return std::nullopt;
  const double c = std::clamp(dot(trunk, frame.y_hat) / len, -1.0, 1.0);
  return std::acos(c) * (180.0 / std::numbers::pi);
}

double arm_use(Vec3 pelvis, Vec3 hand, const LocalFrame& frame) {
  return std::abs(dot(pelvis - hand, frame.z_hat));
}

double foot_position(Vec3 pelvis, Vec3 foot, const LocalFrame& frame) {
  return dot(foot - pelvis, frame.z_hat);
}

std::optional<WeightShift> weight_shift(Vec3 pelvis, Vec3 left_foot, Vec3 right_foot,
                                        const LocalFrame& frame, bool literal) {
  const double rho_l = std::abs(dot(pelvis - left_foot, frame.x_hat));
  const double rho_r = std::abs(dot(pelvis - right_foot, frame.x_hat));
  const double total = rho_l + rho_r;
  if (!(total > kDegenerateEpsilon)) return std::nullopt;
  WeightShift w;
  if (literal) {
    w.left = rho_l / total;
    w.right = rho_r / total;
  } else {
    w.left = rho_r / total;
    w.right = rho_l / total;
  }
  return w;
}

std::string_view to_string(Variable v) {
  switch (v) {
    case Variable::Trunk: return "trunk";
    case Variable::ArmL: return "arm_l";
    case Variable::ArmR: return "arm_r";
    case Variable::FootL: return "foot_l";
    case Variable::FootR: return "foot_r";
    case Variable::WeightL: return "weight_l";
    case Variable::WeightR: return "weight_r";
  }
  return "unknown";
}

std::optional<Variable> variable_from_string(std::string_view name) {
  for (Variable v : kAllVariables) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::span<const double> BodyVariableSeries::values(Variable v) const {
  switch (v) {
    case Variable::Trunk: return trunk_deg;
    case Variable::ArmL: return arm_use_l;
    case Variable::ArmR: return arm_use_r;
    case Variable::FootL: return foot_pos_l;
    case Variable::FootR: return foot_pos_r;
    case Variable::WeightL: return weight_l;
    case Variable::WeightR: return weight_r;
  }
  return {};
}

std::size_t BodyVariableSeries::gap_count() const {
  return static_cast<std::size_t>(std::count_if(
      flags.begin(), flags.end(), [](std::uint8_t f) { return (f & frame_flags::kValid) == 0; }));
}

BodyVariableSeries compute_series(const Capture& capture, const KinematicsOptions& options) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = capture.frame_count();
  const CanonicalJoints& cj = capture.canonical();

  BodyVariableSeries s;
  s.fps = capture.fps();
  for (auto* v : {&s.trunk_deg, &s.arm_use_l, &s.arm_use_r, &s.foot_pos_l, &s.foot_pos_r,
                  &s.weight_l, &s.weight_r}) {
    v->assign(n, kNaN);
  }
  s.flags.assign(n, 0);
  s.axes_source.assign(n, -1);

  LocalFrame last_axes;
  std::int64_t last_axes_frame = -1;

  for (std::size_t i = 0; i < n; ++i) {
    const auto fi = static_cast<std::int64_t>(i);
    const auto joints = capture.frame(i);
    const Vec3 pelvis = joints[cj.pelvis];

    LocalFrame axes = pelvis_frame(pelvis, joints[cj.left_hip], options.forward_flip);
    std::int64_t source = fi;
    if (axes.valid) {
      last_axes = axes;
      last_axes_frame = fi;
    } else if (last_axes_frame >= 0 && fi - last_axes_frame <= options.fallback_frames) {
      axes = last_axes;
      source = last_axes_frame;
    } else {
      continue;
    }
    if (!capture.frame_valid(i)) continue;

    const auto trunk = trunk_angle(pelvis, joints[cj.neck], axes);
    const auto weight =
        weight_shift(pelvis, joints[cj.left_foot], joints[cj.right_foot], axes, options.weight_literal);
    if (!trunk || !weight) continue;

    s.axes_source[i] = source;
    s.trunk_deg[i] = *trunk;
    s.arm_use_l[i] = arm_use(pelvis, joints[cj.left_hand], axes);
    s.arm_use_r[i] = arm_use(pelvis, joints[cj.right_hand], axes);
    s.foot_pos_l[i] = foot_position(pelvis, joints[cj.left_foot], axes);
    s.foot_pos_r[i] = foot_position(pelvis, joints[cj.right_foot], axes);
    s.weight_l[i] = weight->left;
    s.weight_r[i] = weight->right;

    std::uint8_t flags = frame_flags::kValid;
    if (source != fi) flags |= frame_flags::kBorrowed;
    const double bound = options.sanity_bound_m;
    if (s.arm_use_l[i] > bound || s.arm_use_r[i] > bound || std::abs(s.foot_pos_l[i]) > bound ||
        std::abs(s.foot_pos_r[i]) > bound) {
      flags |= frame_flags::kSuspect;
    }
    s.flags[i] = flags;
  }
  return s;
}

}  // namespace motion_insight
