#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ceo/solver.hpp"

namespace ceo {

namespace {

/// Orthonormal basis of range(B) with eigenvalues above a relative cutoff.
Matrix range_basis(const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(b));
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  const double cut = std::max(1e-12, 1e-8 * top);
  std::vector<int> keep;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > cut) keep.push_back(i);
  Matrix basis(b.rows(), static_cast<int>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    basis.col(static_cast<int>(j)) = es.eigenvectors().col(keep[j]);
  return basis;
}

/// Left-hand sides G_k of the stationarity equations: G_k - Psi_k - lambda
/// C_1^2 = 0, with G_k = (mu_1/2) C_1 + (mu_k/2)(Sigma_k^{-1}-B_k)^{-1}
///                 - sum_{i<k} ((mu_i-mu_{i+1})/2) C_{i+1}.
std::vector<Matrix> stationarity_lhs(const ProblemInstance& instance,
                                     const BtSolution& solution) {
  const int L = instance.L;
  const Vector& mu = instance.mu;
  const auto& c = solution.chain.C;
  std::vector<Matrix> g(L);
  Matrix prefix = 0.5 * mu[0] * c[0];
  for (int k = 0; k < L; ++k) {
    if (k > 0) prefix -= 0.5 * (mu[k - 1] - mu[k]) * c[k];
    const Matrix slack =
        sym(spd_inverse(instance.Sigma[k], "recover_multipliers: Sigma") -
            solution.point.B[k]);
    g[k] = sym(prefix + 0.5 * mu[k] * spd_inverse(
                                          slack, "recover_multipliers: slack"));
  }
  return g;
}

}  // namespace

KktCertificate recover_multipliers(const ProblemInstance& instance,
                                   const BtSolution& solution) {
  const int L = instance.L;
  const Matrix& c1 = solution.chain.C[0];
  const Matrix c1_sq = sym(c1 * c1);
  const std::vector<Matrix> g = stationarity_lhs(instance, solution);

  // lambda: least squares over the stationarity equations projected onto
  // range(B_k*), the directions where the cone multiplier must vanish.
  double num = 0.0, den = 0.0;
  std::vector<Matrix> bases(L);
  for (int k = 0; k < L; ++k) {
    bases[k] = range_basis(solution.point.B[k]);
    if (bases[k].cols() == 0) continue;
    const Matrix gp = bases[k].transpose() * g[k] * bases[k];
    const Matrix cp = bases[k].transpose() * c1_sq * bases[k];
    num += (gp.array() * cp.array()).sum();
    den += (cp.array() * cp.array()).sum();
  }
  double lambda;
  if (den > 0.0) {
    lambda = num / den;
  } else {
    // No agent is active; fall back to a full-space fit of KKT1.
    lambda = (g[0].array() * c1_sq.array()).sum() /
             (c1_sq.array() * c1_sq.array()).sum();
  }
  lambda = std::max(0.0, lambda);

  KktCertificate cert;
  cert.lambda = lambda;
  cert.Psi.resize(L);
  cert.residuals.stationarity.resize(L);
  cert.residuals.slackness.resize(L);
  cert.residuals.psi_min_eig.resize(L);
  for (int k = 0; k < L; ++k) {
    cert.Psi[k] = sym(g[k] - lambda * c1_sq);
    const Matrix proj = bases[k].cols() > 0
                            ? Matrix(bases[k].transpose() * cert.Psi[k] * bases[k])
                            : Matrix(0, 0);
    cert.residuals.stationarity[k] = proj.size() > 0 ? proj.norm() : 0.0;
    cert.residuals.slackness[k] = (solution.point.B[k] * cert.Psi[k]).norm();
    cert.residuals.psi_min_eig[k] = min_eigenvalue(cert.Psi[k]);
  }
  cert.residuals.trace_gap = c1.trace() - instance.d;
  return cert;
}

KktReport check_kkt(const ProblemInstance& instance, const BtSolution& solution,
                    const KktCertificate& certificate, double tol) {
  const int L = instance.L;
  const Matrix& c1 = solution.chain.C[0];
  const Matrix c1_sq = sym(c1 * c1);
  const std::vector<Matrix> g = stationarity_lhs(instance, solution);

  KktReport rep;
  rep.lambda = certificate.lambda;
  rep.trace_gap = c1.trace() - instance.d;

  rep.max_stationarity = 0.0;
  rep.max_slackness = 0.0;
  rep.min_psi_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < L; ++k) {
    // Residual of the full KKT1/KKT2 equation with the supplied multipliers,
    // plus the part of it no PSD cone multiplier could absorb.
    const Matrix eq = g[k] - certificate.Psi[k] - certificate.lambda * c1_sq;
    const Matrix basis = range_basis(solution.point.B[k]);
    double stat = eq.norm();
    if (basis.cols() > 0) {
      const Matrix pinned =
          basis.transpose() * (g[k] - certificate.lambda * c1_sq) * basis;
      stat = std::max(stat, pinned.norm());
    }
    rep.max_stationarity = std::max(rep.max_stationarity, stat);
    rep.max_slackness = std::max(
        rep.max_slackness, (solution.point.B[k] * certificate.Psi[k]).norm());
    rep.min_psi_eig =
        std::min(rep.min_psi_eig, min_eigenvalue(certificate.Psi[k]));
  }

  rep.stationarity_ok = rep.max_stationarity <= tol;
  rep.slackness_ok = rep.max_slackness <= tol;
  rep.trace_ok = std::abs(certificate.lambda * rep.trace_gap) <= tol;
  rep.dual_ok = rep.min_psi_eig >= -tol && certificate.lambda >= -tol;

  const auto [d_min, d_max] = d_bounds(instance);
  const bool inside = instance.d > d_min && instance.d < d_max;
  rep.activity_ok =
      !inside || (std::abs(rep.trace_gap) <= tol && certificate.lambda > 1e-12);

  rep.ok = rep.stationarity_ok && rep.slackness_ok && rep.trace_ok &&
           rep.dual_ok && rep.activity_ok;
  return rep;
}

}  // namespace ceo
