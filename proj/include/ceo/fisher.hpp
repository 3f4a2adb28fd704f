#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ceo/gaussian.hpp"

namespace ceo {

/// cov(target | given...) for named components of the joint.
Matrix conditional_cov(const GaussianJoint& joint, const std::string& target,
                       const std::vector<std::string>& given);

/// Conditional Fisher information J(target | given). On Gaussian families
/// this is exactly the conditional precision (Cramer-Rao with equality).
Matrix fisher_conditional(const GaussianJoint& joint, const std::string& target,
                          const std::vector<std::string>& given);

/// Spectral-norm residual of J(X+N|U) + S^{-1} cov(X|X+N,U) S^{-1} = S^{-1},
/// where S = cov(N). Requires N Gaussian and independent of (X, U...).
double check_complementary_identity(const GaussianJoint& joint,
                                    const std::string& x, const std::string& n,
                                    const std::vector<std::string>& given);

struct DeBruijnResult {
  double lemma3_rel = 0.0;      // d/dg h(X + sqrt(g) N | U) vs trace formula
  double corollary1_rel = 0.0;  // d/dg h(sqrt(g) X + N | U) vs trace formula
};

/// Central finite differences of the Gaussian entropies against the two
/// trace formulas; returns relative residuals.
DeBruijnResult check_de_bruijn(const GaussianJoint& joint, const std::string& x,
                               const std::string& n,
                               const std::vector<std::string>& given,
                               double gamma);

/// Fisher information inequality margin (RHS - LHS), PSD when X and Y are
/// conditionally independent given U:
///   J(sqrt(1-g)X + sqrt(g)Y | U) <= (1-g) J(X|U) + g J(Y|U).
Matrix check_fii(const GaussianJoint& joint, const std::string& x,
                 const std::string& y, const std::vector<std::string>& given,
                 double gamma);

/// MMSE bound margin (RHS - LHS):
///   cov(X | X+N, U) <= g^2 cov(X|U) + (1-g)^2 cov(N).
Matrix check_mmse_bound(const GaussianJoint& joint, const std::string& x,
                        const std::string& n,
                        const std::vector<std::string>& given, double gamma);

/// Data processing margin J(X|V) - J(X|U), PSD along a Markov chain
/// U -> V -> X (i.e. U independent of X given V).
Matrix check_data_processing(const GaussianJoint& joint, const std::string& x,
                             const std::string& u, const std::string& v);

struct LemmaResult {
  std::string name;
  double worst_residual = 0.0;       // identity residual or cone violation
  double worst_condition = 1.0;      // conditioning of the worst draw
  double tolerance = 0.0;
  int draws = 0;
  bool pass = false;
};

struct LemmaSuiteReport {
  std::vector<LemmaResult> lemmas;
  double cramer_rao_worst = 0.0;
  bool all_pass = false;
  std::uint64_t seed = 0;
};

/// Randomized verification of the whole toolbox on seeded Gaussian draws
/// with dimensions 1..4.
LemmaSuiteReport run_lemma_suite(std::uint64_t seed, int draws_per_lemma);

}  // namespace ceo
