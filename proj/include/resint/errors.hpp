#pragma once

#include <stdexcept>
#include <string>

namespace resint {

/// Numerical failure inside a solver: stability guard, degenerate roots,
/// Hermiticity drift, quadrature tolerance, bad time ordering.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateRootsError : public SolverError {
 public:
  using SolverError::SolverError;
};

class StabilityError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Invalid model or grid parameters passed to a library call.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace resint
