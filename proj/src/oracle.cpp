#include <algorithm>
#include <cmath>
#include <limits>

#include "ceo/solver.hpp"

namespace ceo {

namespace {

bool is_diagonal(const Matrix& a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j && a(i, j) != 0.0) return false;
  return true;
}

/// Rate of one scalar coordinate: k (source variance), per-agent noise
/// variances sig, weights mu, precision increments b.
double scalar_rate(double k, const std::vector<double>& sig, const Vector& mu,
                   const std::vector<double>& b) {
  const int L = static_cast<int>(b.size());
  double s = 1.0 / k;
  std::vector<double> s_of(L + 1);
  for (int i = L; i >= 1; --i) {
    s += b[i - 1];
    s_of[i] = s;
  }
  double rate = 0.5 * mu[0] * std::log(s_of[1]) - 0.5 * mu[L - 1] * std::log(1.0 / k);
  for (int i = 1; i <= L - 1; ++i)
    rate -= 0.5 * (mu[i - 1] - mu[i]) * std::log(s_of[i + 1]);
  for (int i = 0; i < L; ++i)
    rate += 0.5 * mu[i] * (std::log(1.0 / sig[i]) - std::log(1.0 / sig[i] - b[i]));
  return rate;
}

}  // namespace

BtSolution oracle_grid(const ProblemInstance& instance, double resolution) {
  const int m = instance.m;
  const int L = instance.L;
  if (!(resolution > 0.0)) throw TooLargeError("oracle_grid: resolution <= 0");

  if (m > 1) {
    if (!is_diagonal(instance.K)) {
      throw TooLargeError("oracle_grid: m > 1 requires a diagonal instance");
    }
    for (const auto& s : instance.Sigma) {
      if (!is_diagonal(s)) {
        throw TooLargeError("oracle_grid: m > 1 requires a diagonal instance");
      }
    }
  }

  // One grid dimension per (agent, coordinate) pair; the trace constraint
  // couples coordinates through the shared budget.
  const int dims = m * L;
  std::vector<double> k_diag(m);
  for (int j = 0; j < m; ++j) k_diag[j] = instance.K(j, j);
  std::vector<std::vector<double>> sig(m, std::vector<double>(L));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < L; ++i) sig[j][i] = instance.Sigma[i](j, j);

  std::vector<long> sizes(dims);
  double total = 1.0;
  for (int t = 0; t < dims; ++t) {
    const int j = t / L, i = t % L;
    const double upper = 1.0 / sig[j][i];  // open bound; objective diverges
    sizes[t] = static_cast<long>(std::floor(upper / resolution - 1e-12)) + 1;
    total *= static_cast<double>(sizes[t]);
    if (total > 1e8) {
      throw TooLargeError("oracle_grid: grid exceeds the 1e8 point budget");
    }
  }

  std::vector<long> idx(dims, 0);
  std::vector<std::vector<double>> b(m, std::vector<double>(L, 0.0));
  double best_rate = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_b;

  bool done = false;
  while (!done) {
    for (int t = 0; t < dims; ++t) b[t / L][t % L] = idx[t] * resolution;

    double trace = 0.0;
    for (int j = 0; j < m; ++j) {
      double s = 1.0 / k_diag[j];
      for (int i = 0; i < L; ++i) s += b[j][i];
      trace += 1.0 / s;
    }
    if (trace <= instance.d) {
      double rate = 0.0;
      for (int j = 0; j < m; ++j)
        rate += scalar_rate(k_diag[j], sig[j], instance.mu, b[j]);
      if (rate < best_rate) {
        best_rate = rate;
        best_b = b;
      }
    }

    // Odometer increment.
    int t = 0;
    for (; t < dims; ++t) {
      if (++idx[t] < sizes[t]) break;
      idx[t] = 0;
    }
    done = (t == dims);
  }

  if (best_b.empty()) {
    throw InfeasibleError("oracle_grid: no feasible grid point at this resolution");
  }

  BtSolution sol;
  sol.point.B.resize(L);
  for (int i = 0; i < L; ++i) {
    sol.point.B[i] = Matrix::Zero(m, m);
    for (int j = 0; j < m; ++j) sol.point.B[i](j, j) = best_b[j][i];
  }
  sol.chain = mse_chain(instance, sol.point);
  sol.rate = bt_objective(instance, sol.point);
  sol.trace_gap = sol.chain.C[0].trace() - instance.d;
  sol.status = SolveStatus::OracleExact;
  sol.starts_used = 0;
  sol.seed = 0;
  return sol;
}

}  // namespace ceo
