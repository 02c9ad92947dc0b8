#pragma once

#include <stdexcept>
#include <string>

namespace nlsf {

enum class ErrorKind {
  StepUnderflow,
  NonFinite,
  DegenerateLeadingCoefficient,
  ZeroOnContour,
  PhaseJump,
  QuadratureFailure,
  BranchPointProximity,
  PathBlocked,
  ContinuationAmbiguous,
  DepthExceeded,
  Undecidable,
  DivisionNearZero,
  InvalidOmega,
  PoleProximity,
  CutProximity,
  TailTooLarge,
  SlowDecay,
  SeriesStall,
  FamilySolveFailure,
};

const char* to_string(ErrorKind kind);

/// Failure of a numerical kernel. Maps to exit code 3 in the command line tool.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed or invalid user input. Maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  enum class Kind { Parse, Validation };
  InputError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace nlsf
