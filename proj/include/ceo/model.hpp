#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ceo/linalg.hpp"

namespace ceo {

/// Scale-free positive definiteness tolerance: smallest eigenvalue must
/// exceed this fraction of the largest.
inline constexpr double kPdRelTol = 1e-10;

/// Inputs whose relative asymmetry is below this are symmetrized on
/// ingestion; anything larger is rejected by validation.
inline constexpr double kSymRelTol = 1e-9;

/// The vector Gaussian CEO instance: source covariance K (m x m), per-agent
/// noise covariances Sigma_i, non-increasing positive weights mu_i and trace
/// distortion budget d.
struct ProblemInstance {
  int m = 0;
  int L = 0;
  Matrix K;
  std::vector<Matrix> Sigma;
  Vector mu;
  double d = 0.0;
};

struct Violation {
  std::string rule;
  std::string message;
};

struct ValidationReport {
  bool ok = false;
  std::vector<Violation> violations;
  /// Open distortion window (d_min, d_max); NaN when it could not be
  /// computed (e.g. singular inputs).
  std::pair<double, double> d_window{std::nan(""), std::nan("")};
};

/// Feasible distortion window: d_min = tr((K^{-1} + sum_i Sigma_i^{-1})^{-1}),
/// d_max = tr(K). Rates are finite exactly for d in the open interval.
std::pair<double, double> d_bounds(const ProblemInstance& instance);

/// Checks every structural rule and returns all violations; never throws on
/// a well-formed record.
ValidationReport validate(const ProblemInstance& instance);

/// Symmetrizes K and Sigma_i in place when their relative asymmetry is below
/// kSymRelTol. Larger asymmetries are left untouched for validate() to flag.
void symmetrize_inputs(ProblemInstance& instance);

}  // namespace ceo
