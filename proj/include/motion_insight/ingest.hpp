#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "motion_insight/model.hpp"

namespace motion_insight {

// Strict rejects unknown action names; lenient drops them with a warning.
enum class ParseMode { Strict, Lenient };

/// Parses a capture document. Streams the frame array straight into the
/// position buffer, so multi-hour captures never materialize a JSON tree.
Capture parse_capture(std::string_view text);

/// Canonical serialization: fixed key order, shortest round-trip numbers,
/// non-finite coordinates written as null.
std::string serialize_capture(const Capture& capture);

struct LabelFile {
  std::vector<ActionLabel> labels;  // merged, sorted by (action, start_frame)
  std::vector<std::string> warnings;
};

/// Throws Error(Range) for inverted or out-of-bounds intervals (all offending
/// labels are listed in details()) and Error(Vocabulary) for unknown actions
/// in strict mode.
LabelFile parse_labels(std::string_view text, std::size_t frame_count,
                       ParseMode mode = ParseMode::Strict);
std::string serialize_labels(const std::vector<ActionLabel>& labels);

SegmentManifest parse_manifest(std::string_view text);
std::string serialize_manifest(const SegmentManifest& manifest);

/// Loads every segment of a manifest. Relative paths resolve against
/// `base_dir`. Parse errors are rethrown with the segment index prepended.
Dataset load_dataset(const SegmentManifest& manifest, const std::filesystem::path& base_dir,
                     ParseMode mode = ParseMode::Strict);
Dataset load_dataset(const std::filesystem::path& manifest_path,
                     ParseMode mode = ParseMode::Strict);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace motion_insight
