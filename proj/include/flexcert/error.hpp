#pragma once

#include <stdexcept>
#include <string>

namespace flexcert {

enum class ErrorKind {
  NotSymmetric,
  NoConvergence,
  NotPSD,
  DimensionMismatch,
  NumericalBreakdown,
  ShapeMismatch,
  TooFewSamples,
  IndexOutOfRange,
  Empty,
  DegenerateComponent,
  TooManyComponents,
  Disconnected,
  SingularSusceptance,
  BadDimension,
  InvalidCase,
  InvalidCommitment,
  InfeasibleInput,
  RowExplosion,
  EmptyBox,
  SubproblemInfeasible,
  NotMinimal,
  InvalidArgument,
  Config,
  Io,
  Internal,
};

const char* to_string(ErrorKind kind);

// True for errors caused by user input (files, configuration, shapes) as
// opposed to numerical trouble inside a solver.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace flexcert
