#pragma once

#include <stdexcept>
#include <string>

namespace hamp {

/// Failure categories surfaced by the library. The CLI maps these onto exit codes.
enum class ErrorCode {
  InvalidArgument,
  JointLimitViolation,
  DegenerateSampling,
  EmptyOccupancy,
  DegenerateRegion,
  FlatField,
  IncompatibleGrids,
  InfeasibleEndpoint,
  PlanningTimeout,
  PlanningFailed,
  ResampleRequired,
  EmptyGroup,
  ParseError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hamp
