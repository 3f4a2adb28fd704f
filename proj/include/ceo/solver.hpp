#pragma once

#include <cstdint>
#include <vector>

#include "ceo/objective.hpp"

namespace ceo {

inline constexpr std::uint64_t kDefaultSeed = 20240817ull;

enum class SolveStatus { Converged, MaxIterations, OracleExact };

struct SolverOptions {
  int starts = 16;
  double tol = 1e-8;       // projected-gradient stop: <= tol * (1 + |rate|)
  int max_iters = 5000;    // per inner solve
  std::uint64_t seed = kDefaultSeed;
  double feasibility_tol = 1e-9;
  double oracle_resolution = 1e-3;
};

struct BtSolution {
  BtPoint point;
  double rate = 0.0;  // nats
  MseChain chain;
  SolveStatus status = SolveStatus::MaxIterations;
  int starts_used = 0;
  std::uint64_t seed = 0;
  // Diagnostics at the returned point.
  double projected_gradient_norm = 0.0;
  double trace_gap = 0.0;  // tr(C_1) - d
  double lambda_estimate = 0.0;
};

struct KktResiduals {
  /// Per-agent norm of the stationarity equation projected onto range(B_k*),
  /// where the cone multiplier cannot absorb anything.
  std::vector<double> stationarity;
  /// Per-agent ||B_k* Psi_k||_F (complementary slackness).
  std::vector<double> slackness;
  double trace_gap = 0.0;  // tr(C_1) - d
  /// Smallest eigenvalue of each Psi_k (dual feasibility margin).
  std::vector<double> psi_min_eig;
};

/// Multipliers (lambda, Psi_1..Psi_L) recovered from a solution by
/// rearranging the stationarity equations, plus how far the remaining KKT
/// conditions are from holding.
struct KktCertificate {
  double lambda = 0.0;
  std::vector<Matrix> Psi;
  KktResiduals residuals;
};

struct KktReport {
  bool stationarity_ok = false;
  bool slackness_ok = false;
  bool trace_ok = false;       // lambda * (tr C_1 - d) = 0
  bool dual_ok = false;        // Psi_k >= 0, lambda >= 0
  bool activity_ok = false;    // tr C_1 = d and lambda > 0 inside the window
  bool ok = false;
  double max_stationarity = 0.0;
  double max_slackness = 0.0;
  double trace_gap = 0.0;
  double min_psi_eig = 0.0;
  double lambda = 0.0;
};

/// Minimizes the Berger-Tung rate subject to tr(C_1) <= d and the PSD cone
/// constraints, over multiple deterministic + seeded random starts.
/// Projected-gradient (Barzilai-Borwein steps, nonmonotone Armijo) inside an
/// augmented Lagrangian on the trace constraint, then a dual polish that
/// pins tr(C_1) = d.
BtSolution solve_bt(const ProblemInstance& instance,
                    const SolverOptions& options = {});

/// Brute-force reference: exhaustive grid search. Supported shapes: m = 1
/// (any L with a grid of at most ~1e8 points), and diagonal instances, which
/// decompose per coordinate under a scanned split of the trace budget.
/// Throws TooLargeError otherwise.
BtSolution oracle_grid(const ProblemInstance& instance, double resolution);

KktCertificate recover_multipliers(const ProblemInstance& instance,
                                   const BtSolution& solution);

KktReport check_kkt(const ProblemInstance& instance,
                    const BtSolution& solution,
                    const KktCertificate& certificate, double tol);

}  // namespace ceo
