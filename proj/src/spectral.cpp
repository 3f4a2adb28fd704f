#include "ceo/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace ceo {

namespace {

/// Check of the "definite" claims with empty-block conventions: a 0-column
/// block passes vacuously.
double negative_part(const Matrix& block) {
  if (block.cols() == 0) return 0.0;
  return std::max(0.0, -min_eigenvalue(sym(block)));
}

double positive_part(const Matrix& block) {
  if (block.cols() == 0) return 0.0;
  return std::max(0.0, max_eigenvalue(sym(block)));
}

}  // namespace

SpectralDecomposition decompose(const ProblemInstance& instance,
                                const BtSolution& solution,
                                const KktCertificate& certificate) {
  const int m = instance.m;
  const int L = instance.L;
  const Matrix& c1 = solution.chain.C[0];
  const double lambda = certificate.lambda;

  Eigen::SelfAdjointEigenSolver<Matrix> es(c1);

  SpectralDecomposition out;
  out.lambda = lambda;
  out.eigvals.resize(m);
  out.eigvecs.resize(m, m);
  // Descending order: larger d_n sit on the U side first.
  for (int n = 0; n < m; ++n) {
    out.eigvals[n] = es.eigenvalues()[m - 1 - n];
    out.eigvecs.col(n) = es.eigenvectors().col(m - 1 - n);
  }

  // Within a repeated eigenvalue block of C_1 the basis is canonicalized by
  // re-diagonalizing the projection of Delta_1 into the block.
  const Matrix delta1 = sym(lambda * c1 * c1 - 0.5 * instance.mu[0] * c1);
  int blk = 0;
  while (blk < m) {
    int end = blk + 1;
    while (end < m && std::abs(out.eigvals[end] - out.eigvals[blk]) <=
                          1e-10 * std::max(1.0, std::abs(out.eigvals[blk])))
      ++end;
    if (end - blk > 1) {
      const Matrix basis = out.eigvecs.middleCols(blk, end - blk);
      Eigen::SelfAdjointEigenSolver<Matrix> inner(
          sym(basis.transpose() * delta1 * basis));
      out.eigvecs.middleCols(blk, end - blk) = basis * inner.eigenvectors();
    }
    blk = end;
  }
  // Deterministic sign: largest-magnitude entry of each eigenvector positive.
  for (int n = 0; n < m; ++n) {
    int arg = 0;
    out.eigvecs.col(n).cwiseAbs().maxCoeff(&arg);
    if (out.eigvecs(arg, n) < 0.0) out.eigvecs.col(n) *= -1.0;
  }

  const double split_tol =
      1e-9 * std::max(lambda * out.eigvals.cwiseAbs2().maxCoeff(), 1e-300);

  out.dims.resize(L);
  for (int i = 0; i < L; ++i) {
    int n_i = 0;
    for (int n = 0; n < m; ++n) {
      const double s =
          lambda * out.eigvals[n] * out.eigvals[n] -
          0.5 * instance.mu[i] * out.eigvals[n];
      if (std::abs(s) <= split_tol) {
        out.degenerate.push_back({i + 1, n, s});
      }
      if (s > split_tol) ++n_i;
    }
    out.dims[i] = n_i;
  }
  // Thresholds mu_i/(2 lambda) are non-increasing, so the cuts are nested;
  // enforce it exactly against round-off.
  for (int i = 1; i < L; ++i) out.dims[i] = std::max(out.dims[i], out.dims[i - 1]);

  out.U.resize(L);
  out.V.resize(L);
  out.W.resize(L - 1);
  for (int i = 0; i < L; ++i) {
    out.U[i] = out.eigvecs.leftCols(out.dims[i]);
    out.V[i] = out.eigvecs.rightCols(m - out.dims[i]);
  }
  for (int i = 0; i + 1 < L; ++i)
    out.W[i] = out.eigvecs.middleCols(out.dims[i], out.dims[i + 1] - out.dims[i]);

  out.Delta.resize(L);
  for (int k = 0; k < L; ++k) {
    const Matrix slack =
        sym(spd_inverse(instance.Sigma[k], "decompose: Sigma") -
            solution.point.B[k]);
    out.Delta[k] = sym(0.5 * instance.mu[k] *
                           spd_inverse(slack, "decompose: slack") -
                       certificate.Psi[k]);
  }
  return out;
}

SpectralReport verify_theorem2(const ProblemInstance& instance,
                               const BtSolution& solution,
                               const KktCertificate& certificate,
                               const SpectralDecomposition& decomp,
                               double tol) {
  (void)certificate;
  const int L = instance.L;
  SpectralReport rep;

  auto two_block = [](const Matrix& a, const Matrix& u, const Matrix& v) {
    Matrix rebuilt = Matrix::Zero(a.rows(), a.cols());
    if (u.cols() > 0) rebuilt += u * (u.transpose() * a * u) * u.transpose();
    if (v.cols() > 0) rebuilt += v * (v.transpose() * a * v) * v.transpose();
    return spectral_norm(a - rebuilt);
  };

  // Property 1: spectrum of C_i splits over [U_i | V_i].
  double r1 = 0.0;
  for (int i = 0; i < L; ++i)
    r1 = std::max(r1, two_block(solution.chain.C[i], decomp.U[i], decomp.V[i]));
  rep.spectrum_c = {r1, r1 <= tol};

  // Property 2: spectrum of Delta_1 and both expansions of Delta_{i+1}.
  double r2 = two_block(decomp.Delta[0], decomp.U[0], decomp.V[0]);
  for (int i = 0; i + 1 < L; ++i) {
    r2 = std::max(r2, two_block(decomp.Delta[i + 1], decomp.U[i], decomp.V[i]));
    Matrix rebuilt = Matrix::Zero(instance.m, instance.m);
    const Matrix& a = decomp.Delta[i + 1];
    for (const Matrix* p : {&decomp.U[i], &decomp.W[i], &decomp.V[i + 1]}) {
      if (p->cols() > 0) rebuilt += (*p) * (p->transpose() * a * (*p)) * p->transpose();
    }
    r2 = std::max(r2, spectral_norm(a - rebuilt));
  }
  rep.spectrum_delta = {r2, r2 <= tol};

  // Property 3: U_i' Delta_i U_i > 0, W_i' Delta_{i+1} W_i > 0,
  //             V_i' Delta_i V_i <= 0.
  double r3 = 0.0;
  for (int i = 0; i < L; ++i) {
    if (decomp.U[i].cols() > 0)
      r3 = std::max(r3, negative_part(decomp.U[i].transpose() *
                                      decomp.Delta[i] * decomp.U[i]));
    if (decomp.V[i].cols() > 0)
      r3 = std::max(r3, positive_part(decomp.V[i].transpose() *
                                      decomp.Delta[i] * decomp.V[i]));
  }
  for (int i = 0; i + 1 < L; ++i) {
    if (decomp.W[i].cols() > 0)
      r3 = std::max(r3, negative_part(decomp.W[i].transpose() *
                                      decomp.Delta[i + 1] * decomp.W[i]));
  }
  rep.definiteness = {r3, r3 <= tol};

  // Property 4: B_i* V_i = 0.
  double r4 = 0.0;
  for (int i = 0; i < L; ++i)
    r4 = std::max(r4, spectral_norm(solution.point.B[i] * decomp.V[i]));
  rep.orthogonality = {r4, r4 <= tol};

  // Pass-through: V_i' C_i V_i = V_i' C_{i+1} V_i.
  double r5 = 0.0;
  for (int i = 0; i + 1 < L; ++i) {
    if (decomp.V[i].cols() == 0) continue;
    r5 = std::max(
        r5, spectral_norm(decomp.V[i].transpose() *
                          (solution.chain.C[i] - solution.chain.C[i + 1]) *
                          decomp.V[i]));
  }
  rep.chain_pass = {r5, r5 <= tol};

  // Cross-block: U_i' C_{i+1} V_i = 0.
  double r6 = 0.0;
  for (int i = 0; i + 1 < L; ++i) {
    if (decomp.U[i].cols() == 0 || decomp.V[i].cols() == 0) continue;
    r6 = std::max(r6, spectral_norm(decomp.U[i].transpose() *
                                    solution.chain.C[i + 1] * decomp.V[i]));
  }
  rep.cross_block = {r6, r6 <= tol};

  rep.all_pass = rep.spectrum_c.pass && rep.spectrum_delta.pass &&
                 rep.definiteness.pass && rep.orthogonality.pass &&
                 rep.chain_pass.pass && rep.cross_block.pass;
  return rep;
}

}  // namespace ceo
