#include <doctest.h>

#include <random>

#include "ceo/model.hpp"
#include "ceo/serialize.hpp"
#include "test_util.hpp"

using namespace ceo;
using namespace ceo::testutil;

TEST_CASE("d_bounds scalar cases") {
  auto inst = scalar_instance(1.0, 1.0, 1.0, 0.6);
  auto [lo, hi] = d_bounds(inst);
  CHECK(lo == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));

  auto two = symmetric_two_agent(0.5);
  auto [lo2, hi2] = d_bounds(two);
  CHECK(lo2 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(hi2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("d_bounds diagonal m=2 matches the per-coordinate formula") {
  ProblemInstance inst;
  inst.m = 2;
  inst.L = 1;
  inst.K = Matrix::Identity(2, 2);
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = 4.0;
  inst.Sigma = {s};
  inst.mu = Vector::Constant(1, 1.0);
  inst.d = 1.5;
  auto [lo, hi] = d_bounds(inst);
  CHECK(lo == doctest::Approx(0.5 + 0.8).epsilon(1e-12));
  CHECK(hi == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lo < hi);
}

TEST_CASE("d_bounds is invariant under joint orthogonal conjugation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(rng, 3, 2, 0.5);
    // Random orthogonal Q from the QR of a Gaussian matrix.
    Matrix g = random_spd(rng, 3);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    ProblemInstance rotated = inst;
    rotated.K = sym(q * inst.K * q.transpose());
    for (auto& s : rotated.Sigma) s = sym(q * s * q.transpose());
    auto [lo, hi] = d_bounds(inst);
    auto [lo_r, hi_r] = d_bounds(rotated);
    CHECK(lo == doctest::Approx(lo_r).epsilon(1e-10));
    CHECK(hi == doctest::Approx(hi_r).epsilon(1e-10));
  }
}

TEST_CASE("validate accepts the scalar example and flags bad records") {
  auto inst = scalar_instance(1.0, 1.0, 1.0, 0.6);
  CHECK(validate(inst).ok);

  SUBCASE("d above tr(K)") {
    inst.d = 1.5;
    auto rep = validate(inst);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].rule == "d-window");
  }

  SUBCASE("d below the lower edge") {
    inst.d = 0.4;
    CHECK_FALSE(validate(inst).ok);
  }

  SUBCASE("increasing weights") {
    auto two = symmetric_two_agent(0.5);
    two.mu[0] = 1.0;
    two.mu[1] = 2.0;
    auto rep = validate(two);
    CHECK_FALSE(rep.ok);
    bool found = false;
    for (const auto& v : rep.violations) found = found || v.rule == "weights";
    CHECK(found);
  }

  SUBCASE("non positive definite K") {
    inst.K(0, 0) = -1.0;
    CHECK_FALSE(validate(inst).ok);
  }

  SUBCASE("asymmetric Sigma") {
    ProblemInstance vec;
    vec.m = 2;
    vec.L = 1;
    vec.K = Matrix::Identity(2, 2);
    Matrix s = Matrix::Identity(2, 2);
    s(0, 1) = 0.5;  // grossly asymmetric
    vec.Sigma = {s};
    vec.mu = Vector::Constant(1, 1.0);
    vec.d = 1.0;
    auto rep = validate(vec);
    CHECK_FALSE(rep.ok);
    CHECK(rep.violations[0].rule == "symmetry");
  }
}

TEST_CASE("validate ok implies downstream preconditions hold") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    auto inst = random_instance(rng, 2 + static_cast<int>(trial % 2), 2, 0.4);
    auto rep = validate(inst);
    REQUIRE(rep.ok);
    CHECK(rep.d_window.first < inst.d);
    CHECK(inst.d < rep.d_window.second);
    CHECK_NOTHROW(d_bounds(inst));
  }
}

TEST_CASE("symmetrize_inputs repairs round-off asymmetry only") {
  ProblemInstance inst;
  inst.m = 2;
  inst.L = 1;
  inst.K = Matrix::Identity(2, 2);
  inst.K(0, 1) = 1e-12;  // tiny serialization round-off
  inst.Sigma = {Matrix::Identity(2, 2)};
  inst.mu = Vector::Constant(1, 1.0);
  inst.d = 1.0;
  symmetrize_inputs(inst);
  CHECK(relative_asymmetry(inst.K) == 0.0);

  inst.K(0, 1) = 0.3;  // genuine error: left for validate to flag
  symmetrize_inputs(inst);
  CHECK(relative_asymmetry(inst.K) > 0.0);
}

TEST_CASE("instance JSON round-trips exactly") {
  std::mt19937_64 rng(3);
  auto inst = random_instance(rng, 3, 2, 0.37);
  Json j = instance_to_json(inst);
  const std::string text = j.dump();
  auto back = instance_from_json(Json::parse(text));
  CHECK((back.K - inst.K).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.d == inst.d);
  CHECK((back.mu - inst.mu).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < inst.L; ++i)
    CHECK((back.Sigma[i] - inst.Sigma[i]).cwiseAbs().maxCoeff() == 0.0);
}
