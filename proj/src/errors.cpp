#include "pmpkit/errors.hpp"

namespace pmpkit {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConstraintUsesControl: return "ConstraintUsesControl";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::SingularTransition: return "SingularTransition";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BoundNotAchieved: return "BoundNotAchieved";
    case ErrorCode::UnsupportedOmega: return "UnsupportedOmega";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace pmpkit
