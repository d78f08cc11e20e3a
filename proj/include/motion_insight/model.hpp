#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace motion_insight {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend Vec3 operator*(Vec3 v, double s) { return s * v; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline bool is_finite(Vec3 v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Wall-clock instants are kept at microsecond resolution, UTC.
using TimePoint = std::chrono::sys_time<std::chrono::microseconds>;

TimePoint parse_rfc3339(std::string_view text);
std::string format_rfc3339(TimePoint t);

// ---------------------------------------------------------------------------
// Actions

enum class Action : std::uint8_t {
  SitToStand,
  Sitting,
  StandToSit,
  Reaching,
  Walking,
  Standing,
  TakingMedicine,
};

inline constexpr std::array<Action, 7> kAllActions = {
    Action::SitToStand, Action::Sitting,  Action::StandToSit,
    Action::Reaching,   Action::Walking,  Action::Standing,
    Action::TakingMedicine,
};

std::string_view to_string(Action action);
std::optional<Action> action_from_string(std::string_view name);

// Half-open frame interval [start_frame, end_frame) within one capture.
struct ActionLabel {
  Action action = Action::Standing;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;

  friend bool operator==(const ActionLabel&, const ActionLabel&) = default;
};

// Sorts by (action, start_frame) and merges same-action labels that overlap
// or touch. Idempotent and independent of input order.
std::vector<ActionLabel> merge_labels(std::vector<ActionLabel> labels);

// ---------------------------------------------------------------------------
// Capture

inline constexpr std::array<std::string_view, 8> kCanonicalJoints = {
    "pelvis",    "left_hip",   "right_hip", "neck",
    "left_hand", "right_hand", "left_foot", "right_foot",
};

struct CanonicalJoints {
  std::size_t pelvis = 0;
  std::size_t left_hip = 0;
  std::size_t right_hip = 0;
  std::size_t neck = 0;
  std::size_t left_hand = 0;
  std::size_t right_hand = 0;
  std::size_t left_foot = 0;
  std::size_t right_foot = 0;
};

/// A uniformly sampled sequence of named joint positions, in meters with y up.
///
/// Positions are stored frame-major. Missing or non-finite coordinates are kept
/// as NaN; a frame is valid only when all eight canonical joints are finite.
class Capture {
 public:
  Capture() = default;

  /// Validates the invariants (fps, arity, canonical joints) and computes
  /// per-frame validity. Throws Error on violation.
  Capture(double fps, std::vector<std::string> joints, std::vector<Vec3> positions,
          std::optional<TimePoint> start_time = std::nullopt);

  double fps() const noexcept { return fps_; }
  const std::vector<std::string>& joints() const noexcept { return joints_; }
  std::size_t joint_count() const noexcept { return joints_.size(); }
  std::size_t frame_count() const noexcept { return frame_count_; }
  const std::optional<TimePoint>& start_time() const noexcept { return start_time_; }
  const CanonicalJoints& canonical() const noexcept { return canonical_; }

  std::span<const Vec3> frame(std::size_t i) const {
    return {positions_.data() + i * joints_.size(), joints_.size()};
  }
  const Vec3& at(std::size_t frame, std::size_t joint) const {
    return positions_[frame * joints_.size() + joint];
  }
  bool frame_valid(std::size_t i) const { return valid_[i] != 0; }
  std::size_t invalid_frame_count() const;
  std::span<const Vec3> positions() const noexcept { return positions_; }

  double duration_s() const { return static_cast<double>(frame_count_) / fps_; }

  /// NaN coordinates compare equal to each other.
  friend bool operator==(const Capture& a, const Capture& b);

 private:
  double fps_ = 30.0;
  std::vector<std::string> joints_;
  std::vector<Vec3> positions_;
  std::vector<std::uint8_t> valid_;
  std::size_t frame_count_ = 0;
  std::optional<TimePoint> start_time_;
  CanonicalJoints canonical_;
};

// ---------------------------------------------------------------------------
// Datasets

struct SegmentRef {
  std::string capture_path;
  std::string labels_path;
  TimePoint wall_clock_start;
};

struct SegmentManifest {
  std::string dataset_id;
  std::vector<SegmentRef> segments;
};

struct Segment {
  SegmentRef ref;
  Capture capture;
  std::vector<ActionLabel> labels;
};

/// Immutable after construction; safe to share between readers.
class Dataset {
 public:
  Dataset() = default;
  /// Throws Error(Overlap) if segment wall-clock ranges overlap or are not
  /// ascending.
  Dataset(std::string dataset_id, std::vector<Segment> segments);

  const std::string& id() const noexcept { return id_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const Segment& segment(std::size_t i) const { return segments_.at(i); }
  std::size_t segment_count() const noexcept { return segments_.size(); }

  std::size_t total_frames() const noexcept { return total_frames_; }
  /// Sum of segment durations (gaps excluded).
  double total_duration_s() const;
  /// First segment start to last segment end (gaps included).
  double span_s() const;

  std::size_t global_offset(std::size_t segment) const { return offsets_.at(segment); }
  std::size_t to_global(std::size_t segment, std::int64_t frame) const;
  /// Maps a global frame index back to (segment, local frame).
  std::pair<std::size_t, std::int64_t> locate(std::size_t global_frame) const;
  TimePoint wall_time(std::size_t segment, double frame) const;

 private:
  std::string id_;
  std::vector<Segment> segments_;
  std::vector<std::size_t> offsets_;
  std::size_t total_frames_ = 0;
};

}  // namespace motion_insight
