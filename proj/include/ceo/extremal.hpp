#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ceo/spectral.hpp"

namespace ceo {

/// Jointly Gaussian test channels M_i = A_i Y_i + Z_i with Z_i ~ N(0, Q_i)
/// mutually independent and the time-sharing variable fixed to one
/// deterministic value. A_i is m x m; a singular A_i observes a subspace and
/// the pure-noise directions carry no information.
struct GaussianTestChannel {
  std::vector<Matrix> A;
  std::vector<Matrix> Q;
};

/// Conditionals of the channel that every extremal quantity is built from.
/// cov_x_suffix[i] = cov(X | M_{i+1}, ..., M_L) for i = 0..L (so index 0
/// conditions on all agents and index L on none, i.e. K).
struct ChannelConditionals {
  std::vector<Matrix> cov_x_suffix;
  std::vector<Matrix> cov_x_only;  // cov(X | M_i) per agent (for the I_6 term)
  std::vector<Matrix> cov_y;       // cov(Y_i | X, M_i)
  double trace = 0.0;              // tr cov(X | M_1..M_L)
};

ChannelConditionals conditional_covariances(const ProblemInstance& instance,
                                            const GaussianTestChannel& channel);

/// The channel implied by the optimal B*: observe Y_i along range(B_i*) with
/// noise chosen so cov(Y_i | X, M_i) = Sigma_i - Sigma_i B_i* Sigma_i.
/// Attains the extremal inequality with equality.
GaussianTestChannel matched_channel(const ProblemInstance& instance,
                                    const BtSolution& solution);

/// Random feasible channel: random gains, noise scaled by bisection until
/// tr cov(X | M_1..M_L) lands at fraction*d_min + (1-fraction)*d.
GaussianTestChannel random_feasible_channel(const ProblemInstance& instance,
                                            std::mt19937_64& rng,
                                            double fraction);

/// Feasible perturbation of a base channel: gains scaled by gain_scale, noise
/// rescaled to restore the original conditional trace.
GaussianTestChannel perturbed_feasible_channel(const ProblemInstance& instance,
                                               const GaussianTestChannel& base,
                                               double gain_scale);

/// The perturbation functional g(gamma) along the covariance-preserved path
/// between the channel's statistics (gamma = 0) and the Gaussian optimum
/// (gamma = 1). Needs the subspace split U_i / V_i.
double g_of_gamma(const ProblemInstance& instance, const BtSolution& solution,
                  const SpectralDecomposition& decomp,
                  const GaussianTestChannel& channel, double gamma);

struct PathReport {
  std::vector<double> gamma;
  std::vector<double> g_nats;
  double max_forward_increase = 0.0;  // max over steps of g(t+1) - g(t)
  double g0_minus_g1 = 0.0;
  bool nonincreasing = false;
  bool pass = false;
};

PathReport verify_monotone(const ProblemInstance& instance,
                           const BtSolution& solution,
                           const SpectralDecomposition& decomp,
                           const GaussianTestChannel& channel, int grid_size);

struct ExtremalReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // lhs - rhs, must be >= -1e-8
  double trace = 0.0;
  bool feasible = false;
  bool pass = false;
};

/// Theorem-3 inequality for one feasible channel.
ExtremalReport verify_extremal(const ProblemInstance& instance,
                               const BtSolution& solution,
                               const GaussianTestChannel& channel);

struct BoundCheck {
  double margin = 0.0;  // how far the inequality holds (>= -tol passes)
  bool pass = false;
};

struct ChainReport {
  double I1 = 0, I2 = 0, I3 = 0, I4 = 0, I5 = 0, I6 = 0, I7 = 0;
  BoundCheck i2_le_i5_plus_i6;
  BoundCheck i1_plus_i5_le_i7;
  BoundCheck i6_nonpositive;
  BoundCheck i7_plus_i3_nonpositive;
  BoundCheck i4_nonpositive;
  /// Appendix bound J(X|M_{i+1..L}) <= K^{-1} + sum_{j>i} (...) per suffix:
  /// smallest margin eigenvalue across i.
  double fisher_bound_min_eig = 0.0;
  bool fisher_bound_pass = false;
  /// Derivative identities/bounds for the three entropy families, checked
  /// against central finite differences (relative for the equality case).
  double deriv_identity_rel = 0.0;   // 2(1-g) d/dg h(X_{i,g}|M_{i..L})
  double deriv_u_margin = 0.0;       // min over i of lhs - rhs (>= -tol)
  double deriv_v_margin = 0.0;
  bool deriv_pass = false;
  bool all_pass = false;
};

ChainReport verify_proof_chain(const ProblemInstance& instance,
                               const BtSolution& solution,
                               const KktCertificate& certificate,
                               const SpectralDecomposition& decomp,
                               const GaussianTestChannel& channel,
                               double gamma);

/// Weighted-sum-rate lower bound of the converse chain for one feasible
/// channel; the infimum over channels is the Berger-Tung rate, attained by
/// the matched channel.
double weighted_sum_lower_bound(const ProblemInstance& instance,
                                const GaussianTestChannel& channel);

}  // namespace ceo
