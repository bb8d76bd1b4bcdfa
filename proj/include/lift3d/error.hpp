#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lift3d {

// Every failure surfaced by the library carries one of these codes. The CLI
// maps them onto distinct exit statuses.
enum class ErrorCode {
  kDegenerateShape,
  kLengthMismatch,
  kHeterogeneousLandmarkCount,
  kEmptyDataset,
  kMissingWithoutImputer,
  kLandmarkCountMismatch,
  kFormatVersionMismatch,
  kCorruptFile,
  kParseError,
  kInvariantViolation,
  kInvalidSpec,
  kInvalidConfig,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// Process exit status used by the CLI for each error class.
int error_exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace lift3d
