#include "gsd/error.hpp"

namespace gsd {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnknownElement: return "UnknownElement";
    case ErrorKind::DanglingR2Pair: return "DanglingR2Pair";
    case ErrorKind::NotPreorder: return "NotPreorder";
    case ErrorKind::NotPartialOrder: return "NotPartialOrder";
    case ErrorKind::MissingBounds: return "MissingBounds";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownOrdinalLevel: return "UnknownOrdinalLevel";
    case ErrorKind::StateMismatch: return "StateMismatch";
    case ErrorKind::TooManyStates: return "TooManyStates";
    case ErrorKind::DesignMismatch: return "DesignMismatch";
    case ErrorKind::UnknownSubject: return "UnknownSubject";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::UndeclaredMetric: return "UndeclaredMetric";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyCredalSet: return "EmptyCredalSet";
    case ErrorKind::InconsistentAtDelta: return "InconsistentAtDelta";
    case ErrorKind::NumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyCredalSet:
    case ErrorKind::InconsistentAtDelta:
      return 3;
    case ErrorKind::NumericFailure:
      return 4;
    default:
      return 2;
  }
}

}  // namespace gsd
