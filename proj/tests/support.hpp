#pragma once

// Generators and independent oracles shared by the unit and acceptance tests.
// The oracles deliberately avoid the library's own helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "motion_insight/aggregate.hpp"
#include "motion_insight/events.hpp"
#include "motion_insight/kinematics.hpp"
#include "motion_insight/model.hpp"

namespace testsupport {

using namespace motion_insight;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {  // inclusive
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<std::string> canonical_names() {
  return {kCanonicalJoints.begin(), kCanonicalJoints.end()};
}

// Joint order: pelvis, left_hip, right_hip, neck, left_hand, right_hand,
// left_foot, right_foot.
using Pose = std::array<Vec3, 8>;

inline Pose upright_pose() {
  return {Vec3{0.0, 1.0, 0.0},    Vec3{-0.1, 0.95, 0.0}, Vec3{0.1, 0.95, 0.0},
          Vec3{0.0, 1.5, 0.0},    Vec3{-0.2, 0.9, 0.0},  Vec3{0.2, 0.9, 0.0},
          Vec3{-0.12, 0.05, 0.0}, Vec3{0.12, 0.05, 0.0}};
}

// A random but anatomically loose pose with the hips clearly off the pelvis.
inline Pose random_pose(Gen& g) {
  const double heading = g.uniform(0.0, 2.0 * std::numbers::pi);
  const Vec3 right{std::cos(heading), 0.0, -std::sin(heading)};
  const Vec3 fwd{std::sin(heading), 0.0, std::cos(heading)};
  const Vec3 up{0.0, 1.0, 0.0};
  const Vec3 p{g.uniform(-5, 5), g.uniform(0.4, 1.1), g.uniform(-5, 5)};
  auto at = [&](double lat, double u, double f) { return p + lat * right + u * up + f * fwd; };
  return {p,
          at(-g.uniform(0.05, 0.15), -g.uniform(0.0, 0.1), g.uniform(-0.05, 0.05)),
          at(g.uniform(0.05, 0.15), -g.uniform(0.0, 0.1), g.uniform(-0.05, 0.05)),
          at(g.uniform(-0.2, 0.2), g.uniform(0.2, 0.6), g.uniform(-0.3, 0.4)),
          at(-g.uniform(0.1, 0.4), g.uniform(-0.4, 0.6), g.uniform(-0.6, 0.6)),
          at(g.uniform(0.1, 0.4), g.uniform(-0.4, 0.6), g.uniform(-0.6, 0.6)),
          at(-g.uniform(0.03, 0.3), -g.uniform(0.4, 1.0), g.uniform(-0.5, 0.5)),
          at(g.uniform(0.03, 0.3), -g.uniform(0.4, 1.0), g.uniform(-0.5, 0.5))};
}

inline Capture capture_of(const std::vector<Pose>& poses, double fps = 30.0) {
  std::vector<Vec3> positions;
  positions.reserve(poses.size() * 8);
  for (const auto& pose : poses) positions.insert(positions.end(), pose.begin(), pose.end());
  return Capture(fps, canonical_names(), std::move(positions));
}

// ---------------------------------------------------------------------------
// Kinematics oracle: angles and projections computed from components with
// atan2 and explicit algebra instead of the library's vector helpers.

struct Axes {
  double xx, xz;  // horizontal right axis (y component is zero)
  double zx, zz;  // horizontal forward axis
};

inline Axes oracle_axes(const Vec3& pelvis, const Vec3& left_hip) {
  const double dx = pelvis.x - left_hip.x;
  const double dz = pelvis.z - left_hip.z;
  const double len = std::hypot(dx, dz);
  const double xx = dx / len, xz = dz / len;
  // (0,1,0) x (xx,0,xz) = (xz, 0, -xx)
  return {xx, xz, xz, -xx};
}

inline double oracle_trunk_deg(const Vec3& pelvis, const Vec3& neck) {
  const double h = std::hypot(neck.x - pelvis.x, neck.z - pelvis.z);
  return std::atan2(h, neck.y - pelvis.y) * 180.0 / std::numbers::pi;
}

inline double oracle_forward(const Axes& a, const Vec3& from, const Vec3& to) {
  return (to.x - from.x) * a.zx + (to.z - from.z) * a.zz;
}

inline double oracle_lateral(const Axes& a, const Vec3& from, const Vec3& to) {
  return (to.x - from.x) * a.xx + (to.z - from.z) * a.xz;
}

// ---------------------------------------------------------------------------
// Freeze oracle: for every valid pinned frame, scan forward while frames stay
// pinned or form short invalid runs; the interval ends after the last pinned
// frame. Keeps maximal intervals only.

inline std::vector<FreezeInterval> oracle_freezes(const BodyVariableSeries& s, const Event& e,
                                                  const FreezeParams& p) {
  const auto end = std::min<std::int64_t>(e.end_frame, static_cast<std::int64_t>(s.size()));
  auto valid = [&](std::int64_t f) { return s.valid(static_cast<std::size_t>(f)); };
  auto pinned = [&](std::int64_t f) {
    const auto i = static_cast<std::size_t>(f);
    return valid(f) && std::fabs(s.foot_pos_l[i]) < p.delta_feet_m &&
           std::fabs(s.foot_pos_r[i]) < p.delta_feet_m;
  };
  std::vector<std::pair<std::int64_t, std::int64_t>> candidates;
  for (std::int64_t a = e.start_frame; a < end; ++a) {
    if (!pinned(a)) continue;
    // Maximal start: the previous frames cannot extend the run backwards.
    std::int64_t back = a - 1;
    int gap = 0;
    bool extendable = false;
    while (back >= e.start_frame) {
      if (pinned(back)) {
        extendable = true;
        break;
      }
      if (valid(back)) break;
      if (++gap > p.max_gap_frames) break;
      --back;
    }
    if (extendable) continue;
    std::int64_t last = a;
    gap = 0;
    for (std::int64_t f = a + 1; f < end; ++f) {
      if (pinned(f)) {
        last = f;
        gap = 0;
      } else if (!valid(f)) {
        if (++gap > p.max_gap_frames) break;
      } else {
        break;
      }
    }
    candidates.emplace_back(a, last + 1);
  }
  std::vector<FreezeInterval> out;
  for (auto [a, b] : candidates) {
    const double d = static_cast<double>(b - a) / s.fps;
    if (d >= p.min_freeze_s) out.push_back({e.id(), a, b, d});
  }
  return out;
}

// ---------------------------------------------------------------------------
// σ-binning oracle: classify every frame first, then cut wherever the class
// changes or a frame is invalid.

inline std::vector<Bin> oracle_bins(std::span<const double> values, std::span<const std::uint8_t> flags,
                                    std::int64_t first_frame, double mean, double sd) {
  const std::size_t n = values.size();
  std::vector<int> cls(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if ((flags[i] & frame_flags::kValid) && std::isfinite(values[i])) {
      cls[i] = std::fabs(values[i] - mean) > sd ? 1 : 0;
    }
  }
  std::vector<Bin> out;
  std::size_t i = 0;
  while (i < n) {
    if (cls[i] < 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double sum = 0.0;
    while (j < n && cls[j] == cls[i]) sum += values[j++];
    out.push_back({first_frame + static_cast<std::int64_t>(i), first_frame + static_cast<std::int64_t>(j),
                   sum / static_cast<double>(j - i), cls[i] == 1});
    i = j;
  }
  return out;
}

// A body-variable series built directly from arrays, for detector and binning
// tests that do not need a capture.
inline BodyVariableSeries series_from(const std::vector<double>& foot_l, const std::vector<double>& foot_r,
                                      const std::vector<bool>& valid, double fps = 30.0) {
  BodyVariableSeries s;
  s.fps = fps;
  const std::size_t n = foot_l.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok = valid.empty() || valid[i];
    s.trunk_deg.push_back(ok ? 5.0 : nan);
    s.arm_use_l.push_back(ok ? 0.1 : nan);
    s.arm_use_r.push_back(ok ? 0.1 : nan);
    s.foot_pos_l.push_back(ok ? foot_l[i] : nan);
    s.foot_pos_r.push_back(ok ? foot_r[i] : nan);
    s.weight_l.push_back(ok ? 0.5 : nan);
    s.weight_r.push_back(ok ? 0.5 : nan);
    s.flags.push_back(ok ? frame_flags::kValid : 0);
    s.axes_source.push_back(ok ? static_cast<std::int64_t>(i) : -1);
  }
  return s;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("motion_insight_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline double relative_error(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-12});
  return std::fabs(a - b) / scale;
}

}  // namespace testsupport
