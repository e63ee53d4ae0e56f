#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecborrow {

enum class ErrorCode {
  NonFiniteValue,
  NonBinaryTreatment,
  NonBinaryOutcome,
  ArmMissing,
  ShapeMismatch,
  TooFewRows,
  SingularDesign,
  Nonconvergence,
  PerfectSeparation,
  DegenerateKernel,
  SingularHessian,
  KOutOfRange,
  SelectionFailed,
  SourceMissing,
  TooFewEcs,
  UnknownMechanism,
  InvalidArgument,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI, the Monte Carlo harness) can account for them by kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ecborrow
