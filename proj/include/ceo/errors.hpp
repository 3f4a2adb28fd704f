#pragma once

#include <stdexcept>
#include <string>

namespace ceo {

/// A matrix that must be invertible (or positive definite) is not, at
/// working precision.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// |Sigma_i^{-1} - B_i| underflowed: the point sits on the boundary where
/// the rate objective diverges.
struct BoundaryDivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A Gaussian conditioning block is singular beyond tolerance.
struct SingularConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A projected covariance lost rank beyond tolerance.
struct DegenerateProjectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Brute-force grid budget exceeded (or the instance shape is not supported
/// by the grid oracle).
struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No feasible point could be constructed.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ceo
