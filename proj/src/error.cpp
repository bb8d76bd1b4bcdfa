#include "lift3d/error.hpp"

namespace lift3d {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateShape: return "DEGENERATE_SHAPE";
    case ErrorCode::kLengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::kHeterogeneousLandmarkCount: return "HETEROGENEOUS_LANDMARK_COUNT";
    case ErrorCode::kEmptyDataset: return "EMPTY_DATASET";
    case ErrorCode::kMissingWithoutImputer: return "MISSING_WITHOUT_IMPUTER";
    case ErrorCode::kLandmarkCountMismatch: return "LANDMARK_COUNT_MISMATCH";
    case ErrorCode::kFormatVersionMismatch: return "FORMAT_VERSION_MISMATCH";
    case ErrorCode::kCorruptFile: return "CORRUPT_FILE";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kInvariantViolation: return "INVARIANT_VIOLATION";
    case ErrorCode::kInvalidSpec: return "INVALID_SPEC";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kIoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

int error_exit_status(ErrorCode code) {
  // 1 is left for unclassified failures, 2 for usage errors.
  return 10 + static_cast<int>(code);
}

}  // namespace lift3d
