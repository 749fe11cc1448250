#pragma once

#include <stdexcept>
#include <string>

namespace downlink {

// Error buckets map onto the CLI exit codes: validation -> 2, regime -> 3,
// numerical -> 4.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : Error {
  using Error::Error;
};
struct RegimeError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};

// -- validation -------------------------------------------------------------
struct StructuralInvalid : ValidationError {
  using ValidationError::ValidationError;
};
struct OutOfStateSpace : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptyWindow : ValidationError {
  using ValidationError::ValidationError;
};
struct TraceDisabled : ValidationError {
  using ValidationError::ValidationError;
};

// -- regime -----------------------------------------------------------------
struct DegenerateModel : RegimeError {
  using RegimeError::RegimeError;
};
struct NotErgodic : RegimeError {
  using RegimeError::RegimeError;
};
struct NotFixedPoint : RegimeError {
  using RegimeError::RegimeError;
};
struct Infeasible : RegimeError {
  using RegimeError::RegimeError;
};
struct RegionUnsupported : RegimeError {
  using RegimeError::RegimeError;
};

// -- numerical --------------------------------------------------------------
struct RootCountMismatch : NumericalError {
  using NumericalError::NumericalError;
};
struct RepeatedRootDetected : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularB : NumericalError {
  using NumericalError::NumericalError;
};
struct PoleProximity : NumericalError {
  using NumericalError::NumericalError;
};
struct StepTooLarge : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace downlink
