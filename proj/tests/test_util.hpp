#pragma once

#include <random>

#include "ceo/model.hpp"
#include "ceo/objective.hpp"

namespace ceo::testutil {

inline ProblemInstance scalar_instance(double k, double sigma, double mu,
                                       double d) {
  ProblemInstance inst;
  inst.m = 1;
  inst.L = 1;
  inst.K = Matrix::Constant(1, 1, k);
  inst.Sigma = {Matrix::Constant(1, 1, sigma)};
  inst.mu = Vector::Constant(1, mu);
  inst.d = d;
  return inst;
}

/// m=1, L=2, K=1, Sigma=(1,1), mu=(1,1): the symmetric two-agent case.
inline ProblemInstance symmetric_two_agent(double d) {
  ProblemInstance inst;
  inst.m = 1;
  inst.L = 2;
  inst.K = Matrix::Identity(1, 1);
  inst.Sigma = {Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
  inst.mu = Vector::Constant(2, 1.0);
  inst.d = d;
  return inst;
}

inline Matrix random_spd(std::mt19937_64& rng, int m, double eps = 1e-2) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = normal(rng);
  return sym(g * g.transpose()) + eps * Matrix::Identity(m, m);
}

/// Random instance with d at the given fraction of the feasible window.
inline ProblemInstance random_instance(std::mt19937_64& rng, int m, int L,
                                       double d_fraction) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ProblemInstance inst;
  inst.m = m;
  inst.L = L;
  inst.K = random_spd(rng, m, 0.1);
  for (int i = 0; i < L; ++i) inst.Sigma.push_back(random_spd(rng, m, 0.1));
  inst.mu.resize(L);
  double w = 1.0 + unif(rng);
  for (int i = 0; i < L; ++i) {
    inst.mu[i] = w;
    w *= 0.3 + 0.7 * unif(rng);  // non-increasing, occasionally near-tied
  }
  const auto [d_min, d_max] = d_bounds(inst);
  inst.d = d_min + d_fraction * (d_max - d_min);
  return inst;
}

inline BtPoint zero_point(const ProblemInstance& inst) {
  BtPoint p;
  for (int i = 0; i < inst.L; ++i)
    p.B.push_back(Matrix::Zero(inst.m, inst.m));
  return p;
}

/// Random interior point: B_k <= t * Sigma_k^{-1} with t < 1.
inline BtPoint random_interior_point(std::mt19937_64& rng,
                                     const ProblemInstance& inst, double t) {
  BtPoint p;
  for (int k = 0; k < inst.L; ++k) {
    const Matrix sigma_inv = spd_inverse(inst.Sigma[k], "test");
    const Matrix half = spd_sqrt(sigma_inv, "test");
    Matrix w = random_spd(rng, inst.m, 1e-6);
    w /= max_eigenvalue(w);
    p.B.push_back(sym(half * (t * w) * half));
  }
  return p;
}

}  // namespace ceo::testutil
