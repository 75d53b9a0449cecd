#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

// Mirrors nls_status in the public C header; keep the numbering in sync.
enum class ErrorCode : int {
  InvalidArgument = 1,
  DegenerateInput = 2,
  StepTooLarge = 3,
  InvalidOverride = 4,
  InvalidGrid = 5,
  InvalidSpec = 6,
  EmptyRegion = 7,
  NonIntegrableTail = 8,
  HalfBoundViolated = 9,
  OutOfWindow = 10,
  Diverged = 11,
  InsufficientData = 12,
  NonPositiveValue = 13,
  Io = 14,
  Internal = 15,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace nlslab
