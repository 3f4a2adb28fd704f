#include <doctest.h>

#include <cmath>
#include <random>

#include "ceo/objective.hpp"
#include "test_util.hpp"

using namespace ceo;
using namespace ceo::testutil;

namespace {

/// Independent scalar evaluator for diagonal/scalar instances: per-coordinate
/// hand expansion of the weighted-sum rate.
double scalar_objective(double k, const std::vector<double>& sigma,
                        const Vector& mu, const std::vector<double>& b) {
  const int L = static_cast<int>(b.size());
  auto suffix = [&](int i) {
    double s = 1.0 / k;
    for (int j = i; j < L; ++j) s += b[j];
    return s;
  };
  double v = 0.0;
  for (int i = 0; i + 1 < L; ++i)
    v += 0.5 * (mu[i] - mu[i + 1]) * std::log(suffix(0) / suffix(i + 1));
  for (int i = 0; i < L; ++i)
    v += 0.5 * mu[i] *
         std::log((1.0 / sigma[i]) / (1.0 / sigma[i] - b[i]));
  v += 0.5 * mu[L - 1] * std::log(suffix(0) * k);
  return v;
}

BtPoint scalar_point(const std::vector<double>& b) {
  BtPoint p;
  for (double v : b) p.B.push_back(Matrix::Constant(1, 1, v));
  return p;
}

}  // namespace

TEST_CASE("bt_objective matches hand values") {
  auto inst = scalar_instance(1.0, 1.0, 1.0, 0.6);
  CHECK(bt_objective(inst, zero_point(inst)) == doctest::Approx(0.0));
  CHECK(bt_objective(inst, scalar_point({0.5})) ==
        doctest::Approx(0.5 * std::log(1.5) + 0.5 * std::log(2.0))
            .epsilon(1e-12));

  auto two = symmetric_two_agent(0.5);
  CHECK(bt_objective(two, scalar_point({0.5, 0.5})) ==
        doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(bt_objective(two, scalar_point({0.5, 0.5})) ==
        doctest::Approx(scalar_objective(1.0, {1.0, 1.0}, two.mu, {0.5, 0.5}))
            .epsilon(1e-12));
}

TEST_CASE("bt_objective diverges at the slack boundary") {
  auto inst = scalar_instance(1.0, 1.0, 1.0, 0.6);
  CHECK_THROWS_AS(bt_objective(inst, scalar_point({1.0})),
                  BoundaryDivergenceError);
}

TEST_CASE("mse_chain and trace_mse scalar cases") {
  auto two = symmetric_two_agent(0.5);
  auto chain = mse_chain(two, scalar_point({0.5, 0.5}));
  CHECK(chain.C[0](0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(chain.C[1](0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(trace_mse(two, scalar_point({0.5, 0.5})) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(trace_mse(two, zero_point(two)) == doctest::Approx(1.0));
}

TEST_CASE("mse_chain is PSD ordered on random instances") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    auto inst = random_instance(rng, 3, 3, 0.5);
    BtPoint p = random_interior_point(rng, inst, 0.6);
    auto chain = mse_chain(inst, p);
    for (int i = 0; i + 1 < inst.L; ++i)
      CHECK(min_eigenvalue(sym(chain.C[i + 1] - chain.C[i])) >= -1e-12);
    CHECK(min_eigenvalue(sym(inst.K - chain.C[inst.L - 1])) >= -1e-12);
  }
}

TEST_CASE("bt_gradient scalar closed forms") {
  auto inst = scalar_instance(1.0, 1.0, 1.0, 0.6);
  auto g = bt_gradient(inst, scalar_point({0.5}));
  CHECK(g[0](0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  // At B = 0 the gradient is (mu/2) K + (mu/2) Sigma.
  auto g0 = bt_gradient(inst, zero_point(inst));
  CHECK(g0[0](0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bt_gradient matches central finite differences") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 1 + trial % 3;
    auto inst = random_instance(rng, m, 2, 0.5);
    BtPoint p = random_interior_point(rng, inst, 0.5);
    auto grad = bt_gradient(inst, p);

    const double h = 1e-6;
    for (int k = 0; k < inst.L; ++k) {
      for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
          Matrix e = Matrix::Zero(m, m);
          e(a, b) = e(b, a) = 1.0;  // symmetric perturbation direction
          BtPoint plus = p, minus = p;
          plus.B[k] += h * e;
          minus.B[k] -= h * e;
          const double fd =
              (bt_objective(inst, plus) - bt_objective(inst, minus)) /
              (2.0 * h);
          const double an = (grad[k].array() * e.array()).sum();
          CHECK(fd == doctest::Approx(an).epsilon(1e-5));
        }
      }
    }
  }
}

TEST_CASE("objective is invariant under joint orthogonal conjugation") {
  std::mt19937_64 rng(5);
  auto inst = random_instance(rng, 3, 2, 0.5);
  BtPoint p = random_interior_point(rng, inst, 0.5);

  Matrix g = random_spd(rng, 3);
  Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  ProblemInstance rot = inst;
  rot.K = sym(q * inst.K * q.transpose());
  for (auto& s : rot.Sigma) s = sym(q * s * q.transpose());
  BtPoint rp;
  for (const auto& b : p.B) rp.B.push_back(sym(q * b * q.transpose()));

  CHECK(bt_objective(rot, rp) ==
        doctest::Approx(bt_objective(inst, p)).epsilon(1e-10));
  CHECK(trace_mse(rot, rp) ==
        doctest::Approx(trace_mse(inst, p)).epsilon(1e-10));
}

TEST_CASE("monotonicity: PSD increments reduce MSE and raise the rate") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, 2, 2, 0.5);
    BtPoint p = random_interior_point(rng, inst, 0.3);
    BtPoint bigger = p;
    bigger.B[trial % inst.L] =
        sym(bigger.B[trial % inst.L] + 0.2 * p.B[trial % inst.L]);
    CHECK(trace_mse(inst, bigger) <= trace_mse(inst, p) + 1e-12);
    CHECK(bt_objective(inst, bigger) >= bt_objective(inst, p) - 1e-12);
  }
}

TEST_CASE("bt_objective is nonnegative, zero only at B = 0") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(rng, 2, 2, 0.5);
    BtPoint p = random_interior_point(rng, inst, 0.4);
    CHECK(bt_objective(inst, p) > 0.0);
    CHECK(bt_objective(inst, zero_point(inst)) ==
          doctest::Approx(0.0).epsilon(1e-13));
  }
}
