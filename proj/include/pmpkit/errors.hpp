#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace pmpkit {

enum class ErrorCode {
  SyntaxError,
  UnknownIdentifier,
  IndexOutOfRange,
  DomainError,
  NonFiniteValue,
  MissingField,
  DimensionMismatch,
  ConstraintUsesControl,
  RangeError,
  InvalidArgument,
  BlowUp,
  SingularTransition,
  NoConvergence,
  BoundNotAchieved,
  UnsupportedOmega,
  DegenerateState,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

/// Single exception type carrying a code plus optional context
/// (byte offset for parse errors, time for solver failures).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  std::ptrdiff_t offset() const noexcept { return offset_; }
  double time() const noexcept { return time_; }

  Error& with_offset(std::ptrdiff_t byte_offset) {
    offset_ = byte_offset;
    return *this;
  }
  Error& with_time(double t) {
    time_ = t;
    return *this;
  }

 private:
  ErrorCode code_;
  std::ptrdiff_t offset_ = -1;
  double time_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace pmpkit
