#pragma once

#include <Eigen/Dense>

#include "ceo/errors.hpp"

namespace ceo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric part (A + A^T)/2.
inline Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// max |A - A^T| / max(1, max |A|); 0 for empty matrices.
double relative_asymmetry(const Matrix& a);

double min_eigenvalue(const Matrix& sym_a);
double max_eigenvalue(const Matrix& sym_a);

/// Spectral norm of a (not necessarily symmetric) matrix; 0 if empty.
double spectral_norm(const Matrix& a);

/// log det of a symmetric positive definite matrix; throws SingularMatrixError
/// when the matrix is not PD at working precision.
double logdet_spd(const Matrix& a, const char* what);

/// Inverse of a symmetric positive definite matrix via Cholesky.
Matrix spd_inverse(const Matrix& a, const char* what);

/// Symmetric PSD square root.
Matrix spd_sqrt(const Matrix& a, const char* what);

/// Eigenvalue clip to the PSD cone (negative eigenvalues set to zero).
Matrix psd_clip(const Matrix& sym_a);

/// True iff smallest eigenvalue > rel_tol * largest eigenvalue (and the
/// largest is positive). Scale-free positive definiteness test.
bool is_spd(const Matrix& sym_a, double rel_tol);

}  // namespace ceo
