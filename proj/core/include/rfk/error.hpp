#pragma once

#include <stdexcept>
#include <string>

namespace rfk {

enum class ErrorCode {
  InvalidDomain,
  UnsupportedRegime,
  InfeasibleMatch,
  IncompatibleDomain,
  NoEigenvalueFound,
  Overflow,
  StructureViolation,
  MeshingFailure,
  FactorizationFailure,
  NotConverged,
  InvalidTestFunction,
  DegenerateProfile,
  InconsistentInput,
  InvalidSeed,
  DecompositionFailure,
  EmptyBasin,
  GenerationFailure,
  Parse,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rfk
