#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace motion_insight {

enum class ErrorCode {
  Schema,
  Unit,
  Joint,
  Range,
  Vocabulary,
  Overlap,
  Io,
  UnknownFilter,
  BadQuery,
  EmptySlice,
  EmptyScope,
  NoValidFrames,
  Spec,
  Config,
  Bind,
  NotFound,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; `code()` carries the error class and
// `details()` any itemized diagnostics collected before the throw.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> details = {})
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

}  // namespace motion_insight
