#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsd {

// Failure categories. The CLI maps them onto exit codes (see exit_code()).
enum class ErrorKind {
  // input errors
  InvalidArgument,
  UnknownElement,
  DanglingR2Pair,
  NotPreorder,
  NotPartialOrder,
  MissingBounds,
  DimensionMismatch,
  UnknownOrdinalLevel,
  StateMismatch,
  TooManyStates,
  DesignMismatch,
  UnknownSubject,
  MissingCell,
  UndeclaredMetric,
  ParseError,
  // model errors
  EmptyCredalSet,
  InconsistentAtDelta,
  // solver errors
  NumericFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// 2 input error, 3 infeasible/inconsistent model, 4 numeric failure.
int exit_code(ErrorKind kind) noexcept;

}  // namespace gsd
