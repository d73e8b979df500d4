#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace odd {

enum class ErrorCode {
  kNonPositiveSpacing,
  kSpacingOutOfRange,
  kSingularGeometry,
  kInvalidGeometry,
  kInvalidArgument,
  kNonPositiveDt,
  kSetpointOutOfRange,
  kUnsupportedSegment,
  kEmptyLog,
  kNoResults,
  kParseError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every module of the library. `code()` identifies the
/// failure class; `what()` carries a human-readable description.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Description without the error-class prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace odd
