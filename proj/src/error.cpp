#include "distkern/error.hpp"

namespace distkern {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::SampleTooSmall: return "sample-too-small";
    case ErrorCode::DegenerateBandwidth: return "degenerate-bandwidth";
    case ErrorCode::DegenerateInput: return "degenerate-input";
    case ErrorCode::SizeMismatch: return "size-mismatch";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::Parse: return "parse-error";
  }
  return "unknown";
}

}  // namespace distkern
