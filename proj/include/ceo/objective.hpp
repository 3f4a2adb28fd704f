#pragma once

#include <vector>

#include "ceo/model.hpp"

namespace ceo {

/// Test-channel precision increments, one symmetric m x m matrix per agent.
/// Feasible region: 0 <= B_i < Sigma_i^{-1} (upper bound strict; the rate
/// diverges on that boundary).
struct BtPoint {
  std::vector<Matrix> B;
};

/// C_i = (K^{-1} + sum_{j>=i} B_j)^{-1}. C_1 is the decoder MSE matrix when
/// all agents participate; the chain is PSD-ordered C_1 <= ... <= C_L <= K.
struct MseChain {
  std::vector<Matrix> C;
};

/// One fused evaluation of the Berger-Tung objective. The gradient entries
/// are the derivatives with respect to symmetric perturbations of B_k.
struct BtEvaluation {
  double value = 0.0;            // rate, nats
  std::vector<Matrix> grad;      // empty unless requested
  std::vector<Matrix> C;         // the MSE chain
  double trace_c1 = 0.0;
};

BtEvaluation bt_evaluate(const ProblemInstance& instance, const BtPoint& point,
                         bool with_gradient);

/// Weighted-sum rate of the Berger-Tung scheme at the given point, in nats.
/// Nonnegative; zero exactly at B = 0. Throws BoundaryDivergenceError when
/// some Sigma_i^{-1} - B_i is not positive definite.
double bt_objective(const ProblemInstance& instance, const BtPoint& point);

/// Closed-form gradient of bt_objective with respect to each B_k.
std::vector<Matrix> bt_gradient(const ProblemInstance& instance,
                                const BtPoint& point);

MseChain mse_chain(const ProblemInstance& instance, const BtPoint& point);

/// tr(C_1); the point is distortion-feasible iff this is <= d.
double trace_mse(const ProblemInstance& instance, const BtPoint& point);

}  // namespace ceo
