#pragma once

#include <vector>

#include "ceo/solver.hpp"

namespace ceo {

/// A borderline eigenvalue: lambda d_n^2 - (mu_i/2) d_n sits within the split
/// tolerance of zero at level i, so the U/V assignment is ambiguous. Zeros
/// are assigned to the V side and the case is flagged, never resolved
/// silently.
struct DegenerateSplit {
  int level = 0;       // 1-based agent level i
  int eigen_index = 0; // 0-based index into eigvals
  double value = 0.0;  // lambda d_n^2 - (mu_i/2) d_n
};

/// Recursive eigen-subspace decomposition of the MSE matrix C_1. U_i spans
/// the eigenvectors with lambda d_n^2 - (mu_i/2) d_n > 0, V_i the rest;
/// W_i holds the eigenvectors that switch sides between levels i and i+1.
struct SpectralDecomposition {
  Vector eigvals;  // eigenvalues of C_1, descending
  Matrix eigvecs;  // orthonormal columns aligned with eigvals
  std::vector<Matrix> Delta;  // Delta_i = (mu_i/2)(Sigma_i^{-1}-B_i*)^{-1} - Psi_i
  std::vector<Matrix> U;      // m x n_i
  std::vector<Matrix> V;      // m x (m - n_i)
  std::vector<Matrix> W;      // m x (n_{i+1} - n_i), i = 1..L-1
  std::vector<int> dims;      // n_1 <= ... <= n_L
  std::vector<DegenerateSplit> degenerate;
  double lambda = 0.0;
};

struct PropertyCheck {
  double residual = 0.0;
  bool pass = false;
};

struct SpectralReport {
  PropertyCheck spectrum_c;       // C_i two-block expansion
  PropertyCheck spectrum_delta;   // Delta_1 two-block and Delta_{i+1} splits
  PropertyCheck definiteness;     // U'DU > 0, W'Draise W > 0, V'DV <= 0
  PropertyCheck orthogonality;    // B_i* V_i = 0
  PropertyCheck chain_pass;       // V_i' C_i V_i = V_i' C_{i+1} V_i
  PropertyCheck cross_block;      // U_i' C_{i+1} V_i = 0
  bool all_pass = false;
};

SpectralDecomposition decompose(const ProblemInstance& instance,
                                const BtSolution& solution,
                                const KktCertificate& certificate);

SpectralReport verify_theorem2(const ProblemInstance& instance,
                               const BtSolution& solution,
                               const KktCertificate& certificate,
                               const SpectralDecomposition& decomp, double tol);

}  // namespace ceo
