#pragma once

#include <stdexcept>
#include <string>

namespace distkern {

enum class ErrorCode {
  InvalidInput,
  SampleTooSmall,
  DegenerateBandwidth,
  DegenerateInput,
  SizeMismatch,
  OutOfRange,
  Parse,
};

const char* to_string(ErrorCode code);

/// All library failures are reported through this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace distkern
