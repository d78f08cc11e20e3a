#include "motion_insight/ingest.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "motion_insight/error.hpp"

namespace motion_insight {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// SAX consumer for the capture schema. Only the frame array is large, and it
// is written directly into a flat position buffer.
class CaptureSax : public nlohmann::json_sax<json> {
 public:
  std::optional<double> version;
  std::optional<double> fps;
  std::optional<std::string> units;
  std::optional<std::string> up_axis;
  std::optional<std::string> start_time;
  std::optional<std::vector<std::string>> joints;
  bool saw_frames = false;
  std::vector<Vec3> positions;
  std::vector<std::size_t> frame_sizes;

  bool null() override {
    if (section_ == Section::Frames && depth_ == 4) return component(kNaN);
    if (section_ == Section::Frames && depth_ == 3) {
      // A whole joint may be null.
      positions.push_back({kNaN, kNaN, kNaN});
      ++frame_size_;
      return true;
    }
    return scalar_at_top("null", std::nullopt, nullptr);
  }
  bool boolean(bool) override { return scalar_at_top("boolean", std::nullopt, nullptr); }
  bool number_integer(number_integer_t v) override { return number(static_cast<double>(v)); }
  bool number_unsigned(number_unsigned_t v) override { return number(static_cast<double>(v)); }
  bool number_float(number_float_t v, const string_t&) override { return number(v); }
  bool string(string_t& v) override {
    if (section_ == Section::Joints && depth_ == 2) {
      joints->push_back(v);
      return true;
    }
    return scalar_at_top("string", std::nullopt, &v);
  }
  bool binary(binary_t&) override { return scalar_at_top("binary", std::nullopt, nullptr); }

  bool start_object(std::size_t) override {
    ++depth_;
    if (depth_ == 1) return true;
    if (section_ == Section::None && depth_ == 2) {
      section_ = Section::Skip;
      return true;
    }
    if (section_ == Section::Skip) return true;
    fail("unexpected object inside '" + key_ + "'");
  }
  bool end_object() override {
    --depth_;
    if (section_ == Section::Skip && depth_ == 1) section_ = Section::None;
    return true;
  }

  bool start_array(std::size_t) override {
    ++depth_;
    if (depth_ == 1) fail("capture document must be an object");
    if (section_ == Section::None && depth_ == 2) {
      if (key_ == "joints") {
        section_ = Section::Joints;
        joints.emplace();
      } else if (key_ == "frames") {
        section_ = Section::Frames;
        saw_frames = true;
      } else {
        section_ = Section::Skip;
      }
      return true;
    }
    if (section_ == Section::Skip) return true;
    if (section_ == Section::Frames && depth_ == 3) {
      frame_size_ = 0;
      return true;
    }
    if (section_ == Section::Frames && depth_ == 4) {
      component_count_ = 0;
      return true;
    }
    fail("unexpected array nesting inside '" + key_ + "'");
  }
  bool end_array() override {
    if (section_ == Section::Frames && depth_ == 4) {
      if (component_count_ != 3) {
        fail("frame " + std::to_string(frame_sizes.size()) + " joint " +
             std::to_string(frame_size_) + " has " + std::to_string(component_count_) +
             " coordinates, expected 3");
      }
      positions.push_back({pending_[0], pending_[1], pending_[2]});
      ++frame_size_;
    } else if (section_ == Section::Frames && depth_ == 3) {
      frame_sizes.push_back(frame_size_);
    }
    --depth_;
    if (depth_ == 1 && section_ != Section::None) section_ = Section::None;
    return true;
  }

  bool key(string_t& k) override {
    if (depth_ == 1) key_ = k;
    return true;
  }

  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    throw Error(ErrorCode::Schema,
                "malformed JSON at byte " + std::to_string(position) + ": " + ex.what());
  }

 private:
  enum class Section { None, Joints, Frames, Skip };

  [[noreturn]] static void fail(const std::string& msg) { throw Error(ErrorCode::Schema, msg); }

  bool number(double v) {
    if (section_ == Section::Frames && depth_ == 4) return component(v);
    return scalar_at_top("number", v, nullptr);
  }

  bool component(double v) {
    if (component_count_ < 3) pending_[component_count_] = v;
    ++component_count_;
    return true;
  }

  bool scalar_at_top(const char* kind, std::optional<double> num, const std::string* str) {
    if (section_ == Section::Skip) return true;
    if (depth_ != 1) fail(std::string("unexpected ") + kind + " inside '" + key_ + "'");
    auto need_number = [&](std::optional<double>& slot) {
      if (!num) fail("field '" + key_ + "' must be a number");
      slot = *num;
    };
    auto need_string = [&](std::optional<std::string>& slot) {
      if (!str) fail("field '" + key_ + "' must be a string");
      slot = *str;
    };
    if (key_ == "version") {
      need_number(version);
    } else if (key_ == "fps") {
      need_number(fps);
    } else if (key_ == "units") {
      need_string(units);
    } else if (key_ == "up_axis") {
      need_string(up_axis);
    } else if (key_ == "start_time") {
      if (str) start_time = *str;
      else if (std::string_view(kind) != "null") fail("field 'start_time' must be a string");
    } else if (key_ == "joints" || key_ == "frames") {
      fail("field '" + key_ + "' must be an array");
    }
    return true;
  }

  int depth_ = 0;
  Section section_ = Section::None;
  std::string key_;
  std::array<double, 3> pending_{};
  std::size_t component_count_ = 0;
  std::size_t frame_size_ = 0;
};

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void append_json_string(std::string& out, std::string_view s) { out += json(s).dump(); }

json parse_json_document(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("malformed ") + what + " JSON: " + e.what());
  }
}

template <typename T>
T required(const json& obj, const char* key, const char* what) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::Schema, std::string(what) + " is missing field '" + key + "'");
  }
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) {
      throw Error(ErrorCode::Schema, std::string(what) + " field '" + key + "' must be an integer");
    }
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::Schema, std::string(what) + " field '" + key + "' has the wrong type");
  }
}

void check_version(const json& doc, const char* what) {
  if (!doc.is_object()) throw Error(ErrorCode::Schema, std::string(what) + " must be an object");
  auto v = required<double>(doc, "version", what);
  if (v != 1.0) {
    throw Error(ErrorCode::Schema, std::string(what) + " has unsupported version " + std::to_string(v));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Capture parse_capture(std::string_view text) {
  CaptureSax sax;
  json::sax_parse(text.begin(), text.end(), &sax);

  auto missing = [](const char* key) {
    return Error(ErrorCode::Schema, std::string("capture is missing field '") + key + "'");
  };
  if (!sax.version) throw missing("version");
  if (*sax.version != 1.0) {
    throw Error(ErrorCode::Schema, "capture has unsupported version " + std::to_string(*sax.version));
  }
  if (!sax.fps) throw missing("fps");
  if (!sax.units) throw missing("units");
  if (!sax.up_axis) throw missing("up_axis");
  if (!sax.joints) throw missing("joints");
  if (!sax.saw_frames) throw missing("frames");
  if (*sax.units != "meters") {
    throw Error(ErrorCode::Unit, "units must be \"meters\", got \"" + *sax.units + "\"");
  }
  if (*sax.up_axis != "y") {
    throw Error(ErrorCode::Unit, "up_axis must be \"y\", got \"" + *sax.up_axis + "\"");
  }
  const std::size_t arity = sax.joints->size();
  for (std::size_t f = 0; f < sax.frame_sizes.size(); ++f) {
    if (sax.frame_sizes[f] != arity) {
      throw Error(ErrorCode::Schema, "frame " + std::to_string(f) + " has " +
                                         std::to_string(sax.frame_sizes[f]) +
                                         " positions, expected " + std::to_string(arity));
    }
  }
  std::optional<TimePoint> start;
  if (sax.start_time) start = parse_rfc3339(*sax.start_time);
  return Capture(*sax.fps, std::move(*sax.joints), std::move(sax.positions), start);
}

std::string serialize_capture(const Capture& capture) {
  std::string out;
  const std::size_t joints = capture.joint_count();
  out.reserve(128 + capture.frame_count() * joints * 3 * 9);
  out += "{\"version\":1,\"fps\":";
  append_number(out, capture.fps());
  out += ",\"units\":\"meters\",\"up_axis\":\"y\"";
  if (capture.start_time()) {
    out += ",\"start_time\":";
    append_json_string(out, format_rfc3339(*capture.start_time()));
  }
  out += ",\"joints\":[";
  for (std::size_t j = 0; j < joints; ++j) {
    if (j) out += ',';
    append_json_string(out, capture.joints()[j]);
  }
  out += "],\"frames\":[";
  for (std::size_t f = 0; f < capture.frame_count(); ++f) {
    if (f) out += ',';
    out += '[';
    const auto frame = capture.frame(f);
    for (std::size_t j = 0; j < joints; ++j) {
      if (j) out += ',';
      out += '[';
      append_number(out, frame[j].x);
      out += ',';
      append_number(out, frame[j].y);
      out += ',';
      append_number(out, frame[j].z);
      out += ']';
    }
    out += ']';
  }
  out += "]}";
  return out;
}

// ---------------------------------------------------------------------------

LabelFile parse_labels(std::string_view text, std::size_t frame_count, ParseMode mode) {
  const json doc = parse_json_document(text, "labels");
  check_version(doc, "labels file");
  const auto actions = doc.find("actions");
  if (actions == doc.end()) throw Error(ErrorCode::Schema, "labels file is missing field 'actions'");
  if (!actions->is_array()) throw Error(ErrorCode::Schema, "labels field 'actions' must be an array");

  LabelFile result;
  std::vector<std::string> range_errors;
  std::vector<std::string> vocab_errors;
  std::vector<ActionLabel> labels;
  labels.reserve(actions->size());
  std::size_t index = 0;
  for (const auto& entry : *actions) {
    const std::string where = "label " + std::to_string(index++);
    if (!entry.is_object()) throw Error(ErrorCode::Schema, where + " must be an object");
    const auto name = required<std::string>(entry, "action", where.c_str());
    const auto start = required<std::int64_t>(entry, "start_frame", where.c_str());
    const auto end = required<std::int64_t>(entry, "end_frame", where.c_str());

    const auto action = action_from_string(name);
    if (!action) {
      const std::string msg = where + ": unknown action \"" + name + "\"";
      if (mode == ParseMode::Strict) {
        vocab_errors.push_back(msg);
      } else {
        result.warnings.push_back(msg + " (dropped)");
      }
      continue;
    }
    if (end <= start || start < 0 || end > static_cast<std::int64_t>(frame_count)) {
      range_errors.push_back(where + ": " + name + " [" + std::to_string(start) + ", " +
                             std::to_string(end) + ") outside [0, " +
                             std::to_string(frame_count) + ") or empty");
      continue;
    }
    labels.push_back({*action, start, end});
  }

  if (!range_errors.empty() || !vocab_errors.empty()) {
    std::vector<std::string> details = range_errors;
    details.insert(details.end(), vocab_errors.begin(), vocab_errors.end());
    const ErrorCode code = range_errors.empty() ? ErrorCode::Vocabulary : ErrorCode::Range;
    std::string message = details.front() + (details.size() > 1 ? " (and more)" : "");
    throw Error(code, std::move(message), std::move(details));
  }
  result.labels = merge_labels(std::move(labels));
  return result;
}

std::string serialize_labels(const std::vector<ActionLabel>& labels) {
  json actions = json::array();
  for (const auto& l : labels) {
    json entry;
    entry["action"] = to_string(l.action);
    entry["start_frame"] = l.start_frame;
    entry["end_frame"] = l.end_frame;
    actions.push_back(std::move(entry));
  }
  json doc;
  doc["version"] = 1;
  doc["actions"] = std::move(actions);
  return doc.dump();
}

// ---------------------------------------------------------------------------

SegmentManifest parse_manifest(std::string_view text) {
  const json doc = parse_json_document(text, "manifest");
  check_version(doc, "manifest");
  SegmentManifest manifest;
  manifest.dataset_id = required<std::string>(doc, "dataset_id", "manifest");
  const auto segments = doc.find("segments");
  if (segments == doc.end() || !segments->is_array()) {
    throw Error(ErrorCode::Schema, "manifest field 'segments' must be an array");
  }
  std::size_t i = 0;
  for (const auto& entry : *segments) {
    const std::string where = "manifest segment " + std::to_string(i++);
    if (!entry.is_object()) throw Error(ErrorCode::Schema, where + " must be an object");
    SegmentRef ref;
    ref.capture_path = required<std::string>(entry, "capture", where.c_str());
    ref.labels_path = required<std::string>(entry, "labels", where.c_str());
    ref.wall_clock_start =
        parse_rfc3339(required<std::string>(entry, "wall_clock_start", where.c_str()));
    manifest.segments.push_back(std::move(ref));
  }
  return manifest;
}

std::string serialize_manifest(const SegmentManifest& manifest) {
  json segments = json::array();
  for (const auto& s : manifest.segments) {
    json entry;
    entry["capture"] = s.capture_path;
    entry["labels"] = s.labels_path;
    entry["wall_clock_start"] = format_rfc3339(s.wall_clock_start);
    segments.push_back(std::move(entry));
  }
  json doc;
  doc["version"] = 1;
  doc["dataset_id"] = manifest.dataset_id;
  doc["segments"] = std::move(segments);
  return doc.dump(2);
}

// ---------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "failed reading " + path.string());
  return std::move(ss).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

Dataset load_dataset(const SegmentManifest& manifest, const std::filesystem::path& base_dir,
                     ParseMode mode) {
  std::vector<Segment> segments;
  segments.reserve(manifest.segments.size());
  for (std::size_t i = 0; i < manifest.segments.size(); ++i) {
    const auto& ref = manifest.segments[i];
    auto resolve = [&](const std::string& p) {
      std::filesystem::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };
    try {
      Segment seg;
      seg.ref = ref;
      seg.capture = parse_capture(read_text_file(resolve(ref.capture_path)));
      seg.labels =
          parse_labels(read_text_file(resolve(ref.labels_path)), seg.capture.frame_count(), mode)
              .labels;
      segments.push_back(std::move(seg));
    } catch (const Error& e) {
      throw Error(e.code(), "segment " + std::to_string(i) + " (" + ref.capture_path + "): " + e.what(),
                  e.details());
    }
  }
  return Dataset(manifest.dataset_id, std::move(segments));
}

Dataset load_dataset(const std::filesystem::path& manifest_path, ParseMode mode) {
  const auto manifest = parse_manifest(read_text_file(manifest_path));
  return load_dataset(manifest, manifest_path.parent_path(), mode);
}

}  // namespace motion_insight
