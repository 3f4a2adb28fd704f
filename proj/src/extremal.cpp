#include "ceo/extremal.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ceo/gaussian.hpp"

namespace ceo {

namespace {

std::string agent_name(const char* prefix, int i) {
  std::ostringstream os;
  os << prefix << i;
  return os.str();
}

struct ChannelModel {
  GaussianJoint joint;
  LinearExpr x;
  std::vector<LinearExpr> y;
  std::vector<LinearExpr> m;
};

ChannelModel build_model(const ProblemInstance& inst,
                         const GaussianTestChannel& channel) {
  if (static_cast<int>(channel.A.size()) != inst.L ||
      static_cast<int>(channel.Q.size()) != inst.L)
    throw std::invalid_argument("channel must provide A_i and Q_i per agent");

  std::vector<std::pair<std::string, Matrix>> blocks;
  blocks.emplace_back("X", inst.K);
  for (int i = 0; i < inst.L; ++i)
    blocks.emplace_back(agent_name("N", i), inst.Sigma[i]);
  for (int i = 0; i < inst.L; ++i) {
    const Matrix q = sym(channel.Q[i]);
    if (min_eigenvalue(q) < -1e-10 * std::max(1.0, max_eigenvalue(q)))
      throw std::invalid_argument("channel noise Q_i must be PSD");
    blocks.emplace_back(agent_name("Z", i), psd_clip(q));
  }

  GaussianJoint joint = GaussianJoint::independent(blocks);
  ChannelModel model{std::move(joint), {}, {}, {}};
  model.x = model.joint.var("X");
  for (int i = 0; i < inst.L; ++i) {
    model.y.push_back(model.x + model.joint.var(agent_name("N", i)));
    model.m.push_back(model.y[i].premultiplied(channel.A[i]) +
                      model.joint.var(agent_name("Z", i)));
  }
  return model;
}

}  // namespace

ChannelConditionals conditional_covariances(const ProblemInstance& instance,
                                            const GaussianTestChannel& channel) {
  const ChannelModel model = build_model(instance, channel);
  const int L = instance.L;

  ChannelConditionals out;
  out.cov_x_suffix.resize(L + 1);
  out.cov_x_only.resize(L);
  out.cov_y.resize(L);
  for (int i = 0; i <= L; ++i) {
    std::vector<LinearExpr> given(model.m.begin() + i, model.m.end());
    out.cov_x_suffix[i] = model.joint.conditional_cov(model.x, given);
  }
  for (int i = 0; i < L; ++i) {
    out.cov_x_only[i] = model.joint.conditional_cov(model.x, {model.m[i]});
    out.cov_y[i] =
        model.joint.conditional_cov(model.y[i], {model.x, model.m[i]});
  }
  out.trace = out.cov_x_suffix[0].trace();
  return out;
}

GaussianTestChannel matched_channel(const ProblemInstance& instance,
                                    const BtSolution& solution) {
  const int m = instance.m;
  GaussianTestChannel ch;
  for (int i = 0; i < instance.L; ++i) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(solution.point.B[i]));
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    const double cut = std::max(1e-12, 1e-10 * top);
    std::vector<int> keep;
    for (int n = 0; n < m; ++n)
      if (es.eigenvalues()[n] > cut) keep.push_back(n);
    const int r = static_cast<int>(keep.size());
    Matrix basis(m, r);
    Vector d(r);
    for (int j = 0; j < r; ++j) {
      basis.col(j) = es.eigenvectors().col(keep[j]);
      d[j] = es.eigenvalues()[keep[j]];
    }
    if (r == 0) {
      ch.A.push_back(Matrix::Zero(m, m));
      ch.Q.push_back(Matrix::Identity(m, m));
      continue;
    }
    // Observe range(B*) with noise chosen so the conditional covariance of
    // Y given (X, M) equals Sigma - Sigma B* Sigma; the kernel directions
    // get a pure-noise placeholder that carries no information.
    const Matrix q_range =
        psd_clip(sym(Matrix(d.cwiseInverse().asDiagonal()) -
                     basis.transpose() * instance.Sigma[i] * basis));
    const Matrix proj = basis * basis.transpose();
    ch.A.push_back(proj);
    ch.Q.push_back(sym(basis * q_range * basis.transpose() +
                       (Matrix::Identity(m, m) - proj)));
  }
  return ch;
}

namespace {

double trace_of(const ProblemInstance& inst, const GaussianTestChannel& ch) {
  return conditional_covariances(inst, ch).trace;
}

/// Bisection on a common noise scale tau so that tr cov(X|M_1..L) = target.
GaussianTestChannel scale_noise_to_target(const ProblemInstance& inst,
                                          GaussianTestChannel ch,
                                          double target) {
  const std::vector<Matrix> q0 = ch.Q;
  auto with_tau = [&](double tau) {
    for (std::size_t i = 0; i < ch.Q.size(); ++i) ch.Q[i] = tau * q0[i];
    return trace_of(inst, ch);
  };
  double lo = 1e-14, hi = 1.0;
  for (int t = 0; t < 60 && with_tau(hi) < target; ++t) hi *= 4.0;
  for (int t = 0; t < 90; ++t) {
    const double mid = 0.5 * (lo + hi);
    if (with_tau(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  with_tau(0.5 * (lo + hi));
  return ch;
}

}  // namespace

GaussianTestChannel random_feasible_channel(const ProblemInstance& instance,
                                            std::mt19937_64& rng,
                                            double fraction) {
  const auto [d_min, d_max] = d_bounds(instance);
  (void)d_max;
  const double target = d_min + fraction * (instance.d - d_min);

  std::normal_distribution<double> normal(0.0, 1.0);
  GaussianTestChannel ch;
  for (int i = 0; i < instance.L; ++i) {
    Matrix a(instance.m, instance.m), g(instance.m, instance.m);
    for (int r = 0; r < instance.m; ++r)
      for (int c = 0; c < instance.m; ++c) {
        a(r, c) = normal(rng);
        g(r, c) = normal(rng);
      }
    ch.A.push_back(a);
    ch.Q.push_back(sym(g * g.transpose()) +
                   0.1 * Matrix::Identity(instance.m, instance.m));
  }
  return scale_noise_to_target(instance, std::move(ch), target);
}

GaussianTestChannel perturbed_feasible_channel(const ProblemInstance& instance,
                                               const GaussianTestChannel& base,
                                               double gain_scale) {
  const double target = trace_of(instance, base);
  GaussianTestChannel ch = base;
  for (auto& a : ch.A) a *= gain_scale;
  // Kernel placeholders may be exactly zero-information; keep the noise
  // floor positive so the conditioning Gram stays invertible.
  for (auto& q : ch.Q)
    q += 1e-8 * std::max(1.0, max_eigenvalue(q)) *
         Matrix::Identity(q.rows(), q.cols());
  return scale_noise_to_target(instance, std::move(ch), target);
}

namespace {

/// Everything gamma-independent that the path functional needs.
struct PathContext {
  const ProblemInstance* inst = nullptr;
  const SpectralDecomposition* decomp = nullptr;
  std::vector<Matrix> c;        // MSE chain
  ChannelConditionals cond;
  std::vector<Matrix> t_u;      // U_i^T Sigma_i^{-1}
  std::vector<Matrix> t_v;      // V_i^T (Sigma_i^{-1}-B_i)^{-1} Sigma_i^{-1}
  std::vector<Matrix> ng_cov;   // Sigma_i - Sigma_i B_i Sigma_i
  std::vector<Matrix> sigma_inv;
  std::vector<Matrix> slack;      // Sigma_i^{-1} - B_i
  std::vector<Matrix> slack_inv;  // (Sigma_i^{-1} - B_i)^{-1}
};

PathContext make_path_context(const ProblemInstance& inst,
                              const BtSolution& solution,
                              const SpectralDecomposition& decomp,
                              const GaussianTestChannel& channel) {
  PathContext ctx;
  ctx.inst = &inst;
  ctx.decomp = &decomp;
  ctx.c = solution.chain.C;
  ctx.cond = conditional_covariances(inst, channel);
  const int L = inst.L;
  ctx.t_u.resize(L);
  ctx.t_v.resize(L);
  ctx.ng_cov.resize(L);
  ctx.sigma_inv.resize(L);
  ctx.slack.resize(L);
  ctx.slack_inv.resize(L);
  for (int i = 0; i < L; ++i) {
    ctx.sigma_inv[i] = spd_inverse(inst.Sigma[i], "path: Sigma");
    ctx.slack[i] = sym(ctx.sigma_inv[i] - solution.point.B[i]);
    ctx.slack_inv[i] = spd_inverse(ctx.slack[i], "path: slack");
    ctx.t_u[i] = decomp.U[i].transpose() * ctx.sigma_inv[i];
    ctx.t_v[i] =
        decomp.V[i].transpose() * ctx.slack_inv[i] * ctx.sigma_inv[i];
    ctx.ng_cov[i] =
        sym(inst.Sigma[i] - inst.Sigma[i] * solution.point.B[i] * inst.Sigma[i]);
  }
  return ctx;
}

Matrix mix(const Matrix& a, const Matrix& b, double gamma) {
  return sym((1.0 - gamma) * a + gamma * b);
}

/// cov(Y_{i,gamma} | X, M_i, Q).
Matrix y_mix(const PathContext& ctx, int i, double gamma) {
  return mix(ctx.cond.cov_y[i], ctx.ng_cov[i], gamma);
}

double g_value(const PathContext& ctx, double gamma) {
  const ProblemInstance& inst = *ctx.inst;
  const int L = inst.L;
  double g = 0.0;
  for (int i = 1; i <= L - 1; ++i) {
    g += (inst.mu[i - 1] - inst.mu[i]) *
         gaussian_entropy(mix(ctx.cond.cov_x_suffix[i], ctx.c[i], gamma));
  }
  g -= inst.mu[0] *
       gaussian_entropy(mix(ctx.cond.cov_x_suffix[0], ctx.c[0], gamma));
  for (int i = 0; i < L; ++i) {
    const Matrix omega = y_mix(ctx, i, gamma);
    if (ctx.t_u[i].rows() > 0)
      g -= inst.mu[i] *
           gaussian_entropy(sym(ctx.t_u[i] * omega * ctx.t_u[i].transpose()));
    if (ctx.t_v[i].rows() > 0)
      g -= inst.mu[i] *
           gaussian_entropy(sym(ctx.t_v[i] * omega * ctx.t_v[i].transpose()));
  }
  return g;
}

}  // namespace

double g_of_gamma(const ProblemInstance& instance, const BtSolution& solution,
                  const SpectralDecomposition& decomp,
                  const GaussianTestChannel& channel, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("g_of_gamma: gamma must be in [0, 1]");
  return g_value(make_path_context(instance, solution, decomp, channel), gamma);
}

PathReport verify_monotone(const ProblemInstance& instance,
                           const BtSolution& solution,
                           const SpectralDecomposition& decomp,
                           const GaussianTestChannel& channel, int grid_size) {
  if (grid_size < 2)
    throw std::invalid_argument("verify_monotone: grid_size must be >= 2");
  const PathContext ctx = make_path_context(instance, solution, decomp, channel);

  PathReport rep;
  rep.gamma.resize(grid_size);
  rep.g_nats.resize(grid_size);
  for (int t = 0; t < grid_size; ++t) {
    rep.gamma[t] = static_cast<double>(t) / (grid_size - 1);
    rep.g_nats[t] = g_value(ctx, rep.gamma[t]);
  }
  rep.max_forward_increase = 0.0;
  for (int t = 0; t + 1 < grid_size; ++t)
    rep.max_forward_increase =
        std::max(rep.max_forward_increase, rep.g_nats[t + 1] - rep.g_nats[t]);
  rep.g0_minus_g1 = rep.g_nats.front() - rep.g_nats.back();
  rep.nonincreasing = rep.max_forward_increase <= 1e-7;
  rep.pass = rep.nonincreasing && rep.g0_minus_g1 >= -1e-8;
  return rep;
}

ExtremalReport verify_extremal(const ProblemInstance& instance,
                               const BtSolution& solution,
                               const GaussianTestChannel& channel) {
  const int L = instance.L;
  const ChannelConditionals cond = conditional_covariances(instance, channel);
  const auto& c = solution.chain.C;

  ExtremalReport rep;
  rep.trace = cond.trace;
  rep.feasible = cond.trace <= instance.d + 1e-9;

  double lhs = 0.0, rhs = 0.0;
  for (int i = 1; i <= L - 1; ++i) {
    const double w = instance.mu[i - 1] - instance.mu[i];
    lhs += w * gaussian_entropy(cond.cov_x_suffix[i]);
    rhs += w * gaussian_entropy(c[i]);
  }
  lhs -= instance.mu[0] * gaussian_entropy(cond.cov_x_suffix[0]);
  rhs -= instance.mu[0] * gaussian_entropy(c[0]);
  for (int i = 0; i < L; ++i) {
    const Matrix ng = sym(instance.Sigma[i] -
                          instance.Sigma[i] * solution.point.B[i] *
                              instance.Sigma[i]);
    lhs -= instance.mu[i] * gaussian_entropy(cond.cov_y[i]);
    rhs -= instance.mu[i] * gaussian_entropy(ng);
  }
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.gap = lhs - rhs;
  rep.pass = rep.feasible && rep.gap >= -1e-8;
  return rep;
}

ChainReport verify_proof_chain(const ProblemInstance& instance,
                               const BtSolution& solution,
                               const KktCertificate& certificate,
                               const SpectralDecomposition& decomp,
                               const GaussianTestChannel& channel,
                               double gamma) {
  const int L = instance.L;
  const int m = instance.m;
  const PathContext ctx = make_path_context(instance, solution, decomp, channel);
  const auto& c = ctx.c;
  const double tol = 1e-8;

  // Perturbed Fisher informations J(X_{i,gamma} | M_i..M_L), i = 1..L
  // (Gaussian: inverse of the mixed conditional covariance).
  std::vector<Matrix> j_mix(L);
  std::vector<Matrix> c_inv(L);
  for (int i = 0; i < L; ++i) {
    j_mix[i] = spd_inverse(mix(ctx.cond.cov_x_suffix[i], c[i], gamma),
                           "chain: J mix");
    c_inv[i] = spd_inverse(c[i], "chain: C inverse");
  }
  const Matrix j_last_only = spd_inverse(
      mix(ctx.cond.cov_x_only[L - 1], c[L - 1], gamma), "chain: J(X_L|M_L)");

  // Per-agent S_i = (Sigma_i^{-1} - B_i) - Sigma_i^{-1} cov(Y_{i,g}|X,M_i)
  // Sigma_i^{-1}.
  std::vector<Matrix> s_term(L);
  for (int i = 0; i < L; ++i) {
    s_term[i] = sym(ctx.slack[i] -
                    ctx.sigma_inv[i] * y_mix(ctx, i, gamma) * ctx.sigma_inv[i]);
  }

  auto block_weight = [&](const Matrix& basis, const Matrix& a) {
    if (basis.cols() == 0) return Matrix(Matrix::Zero(m, m));
    return Matrix(basis * (basis.transpose() * a * basis) * basis.transpose());
  };

  ChainReport rep;
  const auto& U = decomp.U;
  const auto& V = decomp.V;
  const auto& W = decomp.W;
  const auto& delta = decomp.Delta;

  for (int i = 0; i + 1 < L; ++i) {
    const Matrix diff = sym(delta[i + 1] - delta[i]);
    const Matrix fisher_gap = j_mix[i + 1] - c_inv[i + 1];
    rep.I1 += (2.0 * block_weight(U[i], diff) * fisher_gap).trace();
    rep.I2 += (2.0 * block_weight(V[i], diff) * fisher_gap).trace();
    rep.I5 += (2.0 * block_weight(W[i], delta[i + 1]) * fisher_gap).trace();
  }
  const Matrix fisher_gap_1 = j_mix[0] - c_inv[0];
  rep.I1 += (2.0 * block_weight(U[0], delta[0]) * fisher_gap_1).trace();
  rep.I2 += (2.0 * block_weight(V[0], delta[0]) * fisher_gap_1).trace();

  for (int i = 0; i < L; ++i) {
    rep.I3 -= instance.mu[i] *
              (block_weight(U[i], ctx.slack_inv[i]) * s_term[i]).trace();
    rep.I7 += (2.0 * block_weight(U[i], delta[i]) * s_term[i]).trace();
  }

  const Matrix c1_sq = c[0] * c[0];
  rep.I4 = -2.0 * certificate.lambda * (c1_sq * fisher_gap_1).trace();

  rep.I6 =
      (2.0 * block_weight(V[L - 1], delta[L - 1]) * (j_last_only - c_inv[L - 1]))
          .trace();

  rep.i2_le_i5_plus_i6 = {rep.I5 + rep.I6 - rep.I2,
                          rep.I5 + rep.I6 - rep.I2 >= -tol};
  rep.i1_plus_i5_le_i7 = {rep.I7 - rep.I1 - rep.I5,
                          rep.I7 - rep.I1 - rep.I5 >= -tol};
  rep.i6_nonpositive = {-rep.I6, rep.I6 <= tol};
  rep.i7_plus_i3_nonpositive = {-(rep.I7 + rep.I3), rep.I7 + rep.I3 <= tol};
  rep.i4_nonpositive = {-rep.I4, rep.I4 <= tol};

  // Appendix bound J(X|M_{i+1..L}) <= K^{-1} + sum_{j>i} (Sigma_j^{-1} -
  // Sigma_j^{-1} cov(Y_j|X,M_j,Q) Sigma_j^{-1}), unperturbed statistics.
  rep.fisher_bound_min_eig = std::numeric_limits<double>::infinity();
  const Matrix k_inv = spd_inverse(instance.K, "chain: K");
  for (int i = 0; i < L; ++i) {
    Matrix bound = k_inv;
    for (int j = i; j < L; ++j) {
      bound += sym(ctx.sigma_inv[j] -
                   ctx.sigma_inv[j] * ctx.cond.cov_y[j] * ctx.sigma_inv[j]);
    }
    const Matrix j_x =
        spd_inverse(ctx.cond.cov_x_suffix[i], "chain: J(X|suffix)");
    rep.fisher_bound_min_eig =
        std::min(rep.fisher_bound_min_eig, min_eigenvalue(sym(bound - j_x)));
  }
  rep.fisher_bound_pass = rep.fisher_bound_min_eig >= -tol;

  // Derivative checks against central finite differences on gamma.
  const double h = std::min(1e-5, 0.25 * std::min(gamma, 1.0 - gamma));
  if (h <= 0.0)
    throw std::invalid_argument("verify_proof_chain: gamma must be in (0,1)");
  const double scale = 2.0 * (1.0 - gamma);

  rep.deriv_identity_rel = 0.0;
  for (int i = 0; i < L; ++i) {
    auto entropy_at = [&](double g) {
      return gaussian_entropy(mix(ctx.cond.cov_x_suffix[i], c[i], g));
    };
    const double fd =
        scale * (entropy_at(gamma + h) - entropy_at(gamma - h)) / (2.0 * h);
    const double cf = (c[i] * (j_mix[i] - c_inv[i])).trace();
    rep.deriv_identity_rel =
        std::max(rep.deriv_identity_rel,
                 std::abs(fd - cf) / std::max(1.0, std::abs(cf)));
  }

  rep.deriv_u_margin = std::numeric_limits<double>::infinity();
  rep.deriv_v_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < L; ++i) {
    if (ctx.t_u[i].rows() > 0) {
      auto entropy_at = [&](double g) {
        return gaussian_entropy(
            sym(ctx.t_u[i] * y_mix(ctx, i, g) * ctx.t_u[i].transpose()));
      };
      const double fd =
          scale * (entropy_at(gamma + h) - entropy_at(gamma - h)) / (2.0 * h);
      const Matrix weight = block_weight(U[i], ctx.slack_inv[i]);
      const double rhs =
          (block_weight(U[i], Matrix::Identity(m, m)) -
           weight * ctx.sigma_inv[i] * y_mix(ctx, i, gamma) * ctx.sigma_inv[i])
              .trace();
      rep.deriv_u_margin = std::min(rep.deriv_u_margin, fd - rhs);
    }
    if (ctx.t_v[i].rows() > 0) {
      auto entropy_at = [&](double g) {
        return gaussian_entropy(
            sym(ctx.t_v[i] * y_mix(ctx, i, g) * ctx.t_v[i].transpose()));
      };
      const double fd =
          scale * (entropy_at(gamma + h) - entropy_at(gamma - h)) / (2.0 * h);
      const double rhs = (block_weight(V[i], ctx.slack_inv[i]) * ctx.slack[i] -
                          block_weight(V[i], Matrix::Identity(m, m)))
                             .trace();
      rep.deriv_v_margin = std::min(rep.deriv_v_margin, fd - rhs);
    }
  }
  const double deriv_tol = 1e-6;
  rep.deriv_pass = rep.deriv_identity_rel <= 1e-4 &&
                   rep.deriv_u_margin >= -deriv_tol &&
                   rep.deriv_v_margin >= -deriv_tol;

  rep.all_pass = rep.i2_le_i5_plus_i6.pass && rep.i1_plus_i5_le_i7.pass &&
                 rep.i6_nonpositive.pass && rep.i7_plus_i3_nonpositive.pass &&
                 rep.i4_nonpositive.pass && rep.fisher_bound_pass &&
                 rep.deriv_pass;
  return rep;
}

double weighted_sum_lower_bound(const ProblemInstance& instance,
                                const GaussianTestChannel& channel) {
  const int L = instance.L;
  const ChannelConditionals cond = conditional_covariances(instance, channel);

  double w = 0.0;
  const double h_all = gaussian_entropy(cond.cov_x_suffix[0]);
  for (int i = 1; i <= L - 1; ++i) {
    w += (instance.mu[i - 1] - instance.mu[i]) *
         (gaussian_entropy(cond.cov_x_suffix[i]) - h_all);
  }
  w += instance.mu[L - 1] * (gaussian_entropy(instance.K) - h_all);
  for (int i = 0; i < L; ++i) {
    w += instance.mu[i] * (gaussian_entropy(instance.Sigma[i]) -
                           gaussian_entropy(cond.cov_y[i]));
  }
  return w;
}

}  // namespace ceo
