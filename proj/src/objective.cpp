#include "ceo/objective.hpp"

#include <Eigen/Cholesky>
#include <sstream>

namespace ceo {

namespace {

double logdet_or_diverge(const Matrix& a, int agent) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Sigma^{-1} - B is not positive definite for agent " << agent;
    throw BoundaryDivergenceError(os.str());
  }
  return 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
}

}  // namespace

BtEvaluation bt_evaluate(const ProblemInstance& instance, const BtPoint& point,
                         bool with_gradient) {
  const int L = instance.L;
  const Matrix k_inv = spd_inverse(instance.K, "bt_evaluate: K");

  // Suffix precision sums S_i = K^{-1} + sum_{j>=i} B_j (1-based index).
  std::vector<Matrix> s(L + 1);
  s[L] = k_inv + sym(point.B[L - 1]);
  for (int i = L - 1; i >= 1; --i) s[i] = s[i + 1] + sym(point.B[i - 1]);

  BtEvaluation out;
  out.C.resize(L);
  for (int i = 1; i <= L; ++i) {
    out.C[i - 1] = spd_inverse(s[i], "bt_evaluate: MSE chain");
  }
  out.trace_c1 = out.C[0].trace();

  const Vector& mu = instance.mu;
  const double logdet_k = logdet_spd(instance.K, "bt_evaluate: K");

  // Collected log-determinant form of the rate: the |K^{-1}+sum B| factors
  // telescope to a single (mu_1/2) log|S_1| term.
  double value = 0.5 * mu[0] * logdet_spd(s[1], "bt_evaluate: S_1");
  for (int i = 1; i <= L - 1; ++i) {
    value -= 0.5 * (mu[i - 1] - mu[i]) *
             logdet_spd(s[i + 1], "bt_evaluate: suffix sum");
  }
  value += 0.5 * mu[L - 1] * logdet_k;

  std::vector<Matrix> slack_inv;
  if (with_gradient) slack_inv.resize(L);
  for (int k = 0; k < L; ++k) {
    const Matrix sigma_inv =
        spd_inverse(instance.Sigma[k], "bt_evaluate: Sigma");
    const Matrix slack = sym(sigma_inv - point.B[k]);
    value -= 0.5 * mu[k] * logdet_or_diverge(slack, k);
    value -= 0.5 * mu[k] * logdet_spd(instance.Sigma[k], "bt_evaluate: Sigma");
    if (with_gradient) slack_inv[k] = spd_inverse(slack, "bt_evaluate: slack");
  }
  out.value = value;

  if (with_gradient) {
    out.grad.resize(L);
    Matrix prefix = 0.5 * mu[0] * out.C[0];
    for (int k = 0; k < L; ++k) {
      if (k > 0) prefix -= 0.5 * (mu[k - 1] - mu[k]) * out.C[k];
      out.grad[k] = sym(prefix + 0.5 * mu[k] * slack_inv[k]);
    }
  }
  return out;
}

double bt_objective(const ProblemInstance& instance, const BtPoint& point) {
  return bt_evaluate(instance, point, false).value;
}

std::vector<Matrix> bt_gradient(const ProblemInstance& instance,
                                const BtPoint& point) {
  return bt_evaluate(instance, point, true).grad;
}

MseChain mse_chain(const ProblemInstance& instance, const BtPoint& point) {
  const Matrix k_inv = spd_inverse(instance.K, "mse_chain: K");
  const int L = instance.L;
  MseChain chain;
  chain.C.resize(L);
  Matrix s = k_inv;
  for (int i = L; i >= 1; --i) {
    s += sym(point.B[i - 1]);
    chain.C[i - 1] = spd_inverse(s, "mse_chain: suffix sum");
  }
  return chain;
}

double trace_mse(const ProblemInstance& instance, const BtPoint& point) {
  Matrix s = spd_inverse(instance.K, "trace_mse: K");
  for (const auto& b : point.B) s += sym(b);
  return spd_inverse(s, "trace_mse: total precision").trace();
}

}  // namespace ceo
