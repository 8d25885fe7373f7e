#pragma once

#include <stdexcept>
#include <string>

namespace rca {

// Error taxonomy. The CLI maps each class to a distinct process exit code,
// so new failure modes should reuse one of these rather than invent a class.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed scenario/config input: bad JSON, unknown key, invalid field value.
struct ConfigError : Error {
  using Error::Error;
};

// Invalid numeric argument to an operation (non-finite input, index out of
// range, empty path set, ...).
struct DomainError : Error {
  using Error::Error;
};

// Geometry below the impedance-model floor or a feasibility spacing limit.
struct SpacingError : Error {
  using Error::Error;
};

// Singular or near-singular linear system (condition estimate too large),
// or a rank-deficient estimation dictionary.
struct ConditioningError : Error {
  using Error::Error;
};

// Feasibility projection did not converge within its iteration cap.
struct ProjectionError : Error {
  using Error::Error;
};

// Position quantization produced a layout that could not be re-projected.
struct QuantizationError : ProjectionError {
  using ProjectionError::ProjectionError;
};

// Trajectory deconfliction exhausted its delay budget.
struct PlanningError : Error {
  using Error::Error;
};

}  // namespace rca
