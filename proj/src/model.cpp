#include "motion_insight/model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "motion_insight/error.hpp"

namespace motion_insight {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::Unit: return "UnitError";
    case ErrorCode::Joint: return "JointError";
    case ErrorCode::Range: return "RangeError";
    case ErrorCode::Vocabulary: return "VocabularyError";
    case ErrorCode::Overlap: return "OverlapError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::UnknownFilter: return "UnknownFilter";
    case ErrorCode::BadQuery: return "BadQuery";
    case ErrorCode::EmptySlice: return "EmptySlice";
    case ErrorCode::EmptyScope: return "EmptyScope";
    case ErrorCode::NoValidFrames: return "NoValidFrames";
    case ErrorCode::Spec: return "SpecError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Bind: return "BindError";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Error";
}

// ---------------------------------------------------------------------------
// RFC 3339

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) {
    throw Error(ErrorCode::Schema, "timestamp too short: '" + std::string(text) + "'");
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + count, value);
  if (ec != std::errc{} || ptr != text.data() + pos + count) {
    throw Error(ErrorCode::Schema, "malformed timestamp: '" + std::string(text) + "'");
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, std::string_view allowed) {
  if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
    throw Error(ErrorCode::Schema, "malformed timestamp: '" + std::string(text) + "'");
  }
}

}  // namespace

TimePoint parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  const int year = parse_digits(text, 0, 4);
  expect_char(text, 4, "-");
  const int month = parse_digits(text, 5, 2);
  expect_char(text, 7, "-");
  const int day = parse_digits(text, 8, 2);
  expect_char(text, 10, "Tt ");
  const int hour = parse_digits(text, 11, 2);
  expect_char(text, 13, ":");
  const int minute = parse_digits(text, 14, 2);
  expect_char(text, 16, ":");
  const int second = parse_digits(text, 17, 2);

  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) {
    throw Error(ErrorCode::Schema, "timestamp out of range: '" + std::string(text) + "'");
  }

  std::size_t pos = 19;
  std::int64_t micros = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 6) {
        micros = micros * 10 + (text[pos] - '0');
      }
      ++digits;
      ++pos;
    }
    if (digits == 0) {
      throw Error(ErrorCode::Schema, "malformed timestamp fraction: '" + std::string(text) + "'");
    }
    for (int d = digits; d < 6; ++d) micros *= 10;
  }

  minutes offset{0};
  expect_char(text, pos, "Zz+-");
  if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '-' ? -1 : 1;
    const int oh = parse_digits(text, pos + 1, 2);
    expect_char(text, pos + 3, ":");
    const int om = parse_digits(text, pos + 4, 2);
    offset = minutes{sign * (oh * 60 + om)};
    pos += 6;
  } else {
    pos += 1;
  }
  if (pos != text.size()) {
    throw Error(ErrorCode::Schema, "trailing characters in timestamp: '" + std::string(text) + "'");
  }

  const auto local = sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second} +
                     microseconds{micros};
  return time_point_cast<microseconds>(local - offset);
}

std::string format_rfc3339(TimePoint t) {
  using namespace std::chrono;
  const auto days_part = floor<days>(t);
  const year_month_day ymd{days_part};
  auto rem = t - days_part;
  const auto h = duration_cast<hours>(rem);
  rem -= h;
  const auto m = duration_cast<minutes>(rem);
  rem -= m;
  const auto s = duration_cast<seconds>(rem);
  rem -= s;
  const auto us = rem.count();

  char buf[48];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d",
                        static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                        static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                        static_cast<int>(m.count()), static_cast<int>(s.count()));
  if (us != 0) {
    if (us % 1000 == 0) {
      n += std::snprintf(buf + n, sizeof buf - n, ".%03lld", static_cast<long long>(us / 1000));
    } else {
      n += std::snprintf(buf + n, sizeof buf - n, ".%06lld", static_cast<long long>(us));
    }
  }
  std::snprintf(buf + n, sizeof buf - n, "Z");
  return buf;
}

// ---------------------------------------------------------------------------
// Actions

std::string_view to_string(Action action) {
  switch (action) {
    case Action::SitToStand: return "sit_to_stand";
    case Action::Sitting: return "sitting";
    case Action::StandToSit: return "stand_to_sit";
    case Action::Reaching: return "reaching";
    case Action::Walking: return "walking";
    case Action::Standing: return "standing";
    case Action::TakingMedicine: return "taking_medicine";
  }
  return "unknown";
}

std::optional<Action> action_from_string(std::string_view name) {
  for (Action a : kAllActions) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

std::vector<ActionLabel> merge_labels(std::vector<ActionLabel> labels) {
  std::sort(labels.begin(), labels.end(), [](const ActionLabel& a, const ActionLabel& b) {
    if (a.action != b.action) return a.action < b.action;
    if (a.start_frame != b.start_frame) return a.start_frame < b.start_frame;
    return a.end_frame < b.end_frame;
  });
  std::vector<ActionLabel> merged;
  merged.reserve(labels.size());
  for (const auto& label : labels) {
    if (!merged.empty() && merged.back().action == label.action &&
        label.start_frame <= merged.back().end_frame) {
      merged.back().end_frame = std::max(merged.back().end_frame, label.end_frame);
    } else {
      merged.push_back(label);
    }
  }
  return merged;
}

// ---------------------------------------------------------------------------
// Capture

Capture::Capture(double fps, std::vector<std::string> joints, std::vector<Vec3> positions,
                 std::optional<TimePoint> start_time)
    : fps_(fps),
      joints_(std::move(joints)),
      positions_(std::move(positions)),
      start_time_(start_time) {
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
    throw Error(ErrorCode::Schema, "fps must be positive and finite");
  }
  if (joints_.empty()) {
    throw Error(ErrorCode::Joint, "capture has no joints");
  }
  if (positions_.size() % joints_.size() != 0) {
    throw Error(ErrorCode::Schema, "position count is not a multiple of the joint count");
  }
  frame_count_ = positions_.size() / joints_.size();

  std::array<std::size_t, kCanonicalJoints.size()> index{};
  std::vector<std::string> missing;
  for (std::size_t c = 0; c < kCanonicalJoints.size(); ++c) {
    auto it = std::find(joints_.begin(), joints_.end(), kCanonicalJoints[c]);
    if (it == joints_.end()) {
      missing.emplace_back(kCanonicalJoints[c]);
    } else {
      index[c] = static_cast<std::size_t>(it - joints_.begin());
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing canonical joint(s):";
    for (const auto& m : missing) msg += " " + m;
    throw Error(ErrorCode::Joint, msg, missing);
  }
  canonical_ = {index[0], index[1], index[2], index[3], index[4], index[5], index[6], index[7]};

  valid_.resize(frame_count_);
  for (std::size_t f = 0; f < frame_count_; ++f) {
    bool ok = true;
    for (std::size_t j : index) {
      ok = ok && is_finite(at(f, j));
    }
    valid_[f] = ok ? 1 : 0;
  }
}

std::size_t Capture::invalid_frame_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{0}));
}

namespace {
bool same_coord(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}
}  // namespace

bool operator==(const Capture& a, const Capture& b) {
  if (a.fps_ != b.fps_ || a.joints_ != b.joints_ || a.start_time_ != b.start_time_ ||
      a.positions_.size() != b.positions_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.positions_.size(); ++i) {
    const Vec3& p = a.positions_[i];
    const Vec3& q = b.positions_[i];
    if (!same_coord(p.x, q.x) || !same_coord(p.y, q.y) || !same_coord(p.z, q.z)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::string dataset_id, std::vector<Segment> segments)
    : id_(std::move(dataset_id)), segments_(std::move(segments)) {
  offsets_.reserve(segments_.size());
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i > 0) {
      const auto& prev = segments_[i - 1];
      const TimePoint prev_end = wall_time(i - 1, static_cast<double>(prev.capture.frame_count()));
      if (segments_[i].ref.wall_clock_start < prev_end) {
        throw Error(ErrorCode::Overlap,
                    "segment " + std::to_string(i) + " starts at " +
                        format_rfc3339(segments_[i].ref.wall_clock_start) +
                        " before segment " + std::to_string(i - 1) + " ends at " +
                        format_rfc3339(prev_end));
      }
    }
    offsets_.push_back(total_frames_);
    total_frames_ += segments_[i].capture.frame_count();
  }
}

double Dataset::total_duration_s() const {
  double total = 0.0;
  for (const auto& s : segments_) total += s.capture.duration_s();
  return total;
}

double Dataset::span_s() const {
  if (segments_.empty()) return 0.0;
  const TimePoint end =
      wall_time(segments_.size() - 1, static_cast<double>(segments_.back().capture.frame_count()));
  return std::chrono::duration<double>(end - segments_.front().ref.wall_clock_start).count();
}

std::size_t Dataset::to_global(std::size_t segment, std::int64_t frame) const {
  return offsets_.at(segment) + static_cast<std::size_t>(frame);
}

std::pair<std::size_t, std::int64_t> Dataset::locate(std::size_t global_frame) const {
  if (global_frame >= total_frames_) {
    throw Error(ErrorCode::Range, "global frame " + std::to_string(global_frame) + " out of range");
  }
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global_frame);
  // upper_bound lands past any empty segments sharing this offset.
  const auto seg = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  return {seg, static_cast<std::int64_t>(global_frame - offsets_[seg])};
}

TimePoint Dataset::wall_time(std::size_t segment, double frame) const {
  const auto& s = segments_.at(segment);
  const auto offset = std::chrono::duration<double>(frame / s.capture.fps());
  return s.ref.wall_clock_start + std::chrono::round<std::chrono::microseconds>(offset);
}

}  // namespace motion_insight
