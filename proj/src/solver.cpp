#include "ceo/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <random>

namespace ceo {

namespace {

using Point = std::vector<Matrix>;

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += (a[k].array() * b[k].array()).sum();
  return s;
}

double norm(const Point& a) { return std::sqrt(std::max(0.0, dot(a, a))); }

/// Everything about the instance that the inner loop reuses.
struct Ctx {
  const ProblemInstance* inst = nullptr;
  int m = 0, L = 0;
  double d = 0.0;
  Matrix k_inv;
  std::vector<Matrix> sigma_inv;
  std::vector<Matrix> sigma_inv_sqrt;
  std::vector<double> guard;  // abs floor for min eig of (Sigma^{-1} - B)
  double logdet_k = 0.0;
  std::vector<double> logdet_sigma = {};
};

Ctx make_ctx(const ProblemInstance& inst) {
  Ctx ctx;
  ctx.inst = &inst;
  ctx.m = inst.m;
  ctx.L = inst.L;
  ctx.d = inst.d;
  ctx.k_inv = spd_inverse(inst.K, "solve_bt: K");
  ctx.logdet_k = logdet_spd(inst.K, "solve_bt: K");
  ctx.sigma_inv.resize(inst.L);
  ctx.sigma_inv_sqrt.resize(inst.L);
  ctx.guard.resize(inst.L);
  ctx.logdet_sigma.resize(inst.L);
  for (int k = 0; k < inst.L; ++k) {
    ctx.sigma_inv[k] = spd_inverse(inst.Sigma[k], "solve_bt: Sigma");
    ctx.sigma_inv_sqrt[k] = spd_sqrt(ctx.sigma_inv[k], "solve_bt: Sigma");
    ctx.guard[k] = 1e-9 * max_eigenvalue(ctx.sigma_inv[k]);
    ctx.logdet_sigma[k] = logdet_spd(inst.Sigma[k], "solve_bt: Sigma");
  }
  return ctx;
}

struct ValueEval {
  bool ok = false;
  double f = 0.0;    // rate objective
  double c = 0.0;    // tr(C_1) - d
  double phi = 0.0;  // penalized value
};

struct GradEval : ValueEval {
  Point grad;  // gradient of phi
  Matrix c1;
};

double penalty_value(double f, double c, double lambda, double rho) {
  if (rho <= 0.0) return f + lambda * c;
  const double y = lambda + rho * c;
  if (y > 0.0) return f + lambda * c + 0.5 * rho * c * c;
  return f - 0.5 * lambda * lambda / rho;
}

double penalty_weight(double c, double lambda, double rho) {
  if (rho <= 0.0) return lambda;
  return std::max(0.0, lambda + rho * c);
}

std::optional<double> llt_logdet(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
}

bool guard_ok(const Ctx& ctx, const Point& b) {
  for (int k = 0; k < ctx.L; ++k) {
    Matrix shifted = ctx.sigma_inv[k] - b[k] -
                     ctx.guard[k] * Matrix::Identity(ctx.m, ctx.m);
    if (Eigen::LLT<Matrix>(shifted).info() != Eigen::Success) return false;
  }
  return true;
}

ValueEval value_at(const Ctx& ctx, const Point& b, double lambda, double rho) {
  ValueEval out;
  const Vector& mu = ctx.inst->mu;
  const int L = ctx.L;

  Matrix s = ctx.k_inv;
  std::vector<double> ld_suffix(L + 1);  // ld_suffix[i] = log|S_i|, 1-based
  double trace_c1 = 0.0;
  for (int i = L; i >= 1; --i) {
    s += b[i - 1];
    if (i == 1) {
      Eigen::LLT<Matrix> llt(s);
      if (llt.info() != Eigen::Success) return out;
      ld_suffix[1] = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
      trace_c1 = llt.solve(Matrix::Identity(ctx.m, ctx.m)).trace();
    } else {
      auto ld = llt_logdet(s);
      if (!ld) return out;
      ld_suffix[i] = *ld;
    }
  }

  double f = 0.5 * mu[0] * ld_suffix[1] + 0.5 * mu[L - 1] * ctx.logdet_k;
  for (int i = 1; i <= L - 1; ++i)
    f -= 0.5 * (mu[i - 1] - mu[i]) * ld_suffix[i + 1];
  for (int k = 0; k < L; ++k) {
    auto ld = llt_logdet(ctx.sigma_inv[k] - b[k]);
    if (!ld) return out;
    f -= 0.5 * mu[k] * (*ld + ctx.logdet_sigma[k]);
  }

  out.ok = true;
  out.f = f;
  out.c = trace_c1 - ctx.d;
  out.phi = penalty_value(f, out.c, lambda, rho);
  return out;
}

GradEval grad_at(const Ctx& ctx, const Point& b, double lambda, double rho) {
  GradEval out;
  const Vector& mu = ctx.inst->mu;
  const int L = ctx.L;

  std::vector<Matrix> c(L);
  Matrix s = ctx.k_inv;
  std::vector<double> ld_suffix(L + 1);
  for (int i = L; i >= 1; --i) {
    s += b[i - 1];
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) return out;
    ld_suffix[i] = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
    c[i - 1] = sym(llt.solve(Matrix::Identity(ctx.m, ctx.m)));
  }

  double f = 0.5 * mu[0] * ld_suffix[1] + 0.5 * mu[L - 1] * ctx.logdet_k;
  for (int i = 1; i <= L - 1; ++i)
    f -= 0.5 * (mu[i - 1] - mu[i]) * ld_suffix[i + 1];

  std::vector<Matrix> slack_inv(L);
  for (int k = 0; k < L; ++k) {
    Matrix slack = ctx.sigma_inv[k] - b[k];
    Eigen::LLT<Matrix> llt(slack);
    if (llt.info() != Eigen::Success) return out;
    f -= 0.5 * mu[k] *
         (2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum() +
          ctx.logdet_sigma[k]);
    slack_inv[k] = sym(llt.solve(Matrix::Identity(ctx.m, ctx.m)));
  }

  out.ok = true;
  out.f = f;
  out.c = c[0].trace() - ctx.d;
  out.phi = penalty_value(f, out.c, lambda, rho);
  out.c1 = c[0];

  const double w = penalty_weight(out.c, lambda, rho);
  const Matrix c1_sq = c[0] * c[0];
  out.grad.resize(L);
  Matrix prefix = 0.5 * mu[0] * c[0];
  for (int k = 0; k < L; ++k) {
    if (k > 0) prefix -= 0.5 * (mu[k - 1] - mu[k]) * c[k];
    out.grad[k] = sym(prefix + 0.5 * mu[k] * slack_inv[k] - w * c1_sq);
  }
  return out;
}

Point project_cone(const Point& b) {
  Point out(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) out[k] = psd_clip(sym(b[k]));
  return out;
}

double pg_residual(const Ctx& ctx, const Point& b, const Point& grad) {
  Point trial(b.size());
  for (int k = 0; k < ctx.L; ++k) trial[k] = b[k] - grad[k];
  trial = project_cone(trial);
  double s = 0.0;
  for (int k = 0; k < ctx.L; ++k) s += (b[k] - trial[k]).squaredNorm();
  return std::sqrt(s);
}

struct InnerResult {
  double f = 0.0;
  double c = 0.0;
  double pg_res = 0.0;
  int iters = 0;
};

/// Projected gradient with Barzilai-Borwein steps and a nonmonotone Armijo
/// line search along the projection arc. Iterates are retracted so that
/// Sigma^{-1} - B keeps a strictly positive smallest eigenvalue.
InnerResult inner_minimize(const Ctx& ctx, Point& b, double lambda, double rho,
                           double tol, int max_iters) {
  GradEval e = grad_at(ctx, b, lambda, rho);
  InnerResult res;
  if (!e.ok) return res;  // caller guarantees a valid starting point

  std::deque<double> recent{e.phi};
  double alpha = 1.0 / (1.0 + norm(e.grad));
  Point prev_b, prev_g;

  int iter = 0;
  for (; iter < max_iters; ++iter) {
    const double r = pg_residual(ctx, b, e.grad);
    res.pg_res = r;
    if (r <= tol * (1.0 + std::abs(e.f))) break;

    const double phi_ref = *std::max_element(recent.begin(), recent.end());
    double a = alpha;
    bool accepted = false;
    Point cand(ctx.L);
    ValueEval cand_eval;
    for (int t = 0; t < 60; ++t) {
      for (int k = 0; k < ctx.L; ++k) cand[k] = psd_clip(sym(b[k] - a * e.grad[k]));
      if (guard_ok(ctx, cand)) {
        cand_eval = value_at(ctx, cand, lambda, rho);
        if (cand_eval.ok) {
          double decrease = 0.0;
          for (int k = 0; k < ctx.L; ++k)
            decrease += (e.grad[k].array() * (b[k] - cand[k]).array()).sum();
          const bool pass = decrease > 0.0
                                ? cand_eval.phi <= phi_ref - 1e-4 * decrease
                                : cand_eval.phi < phi_ref;
          if (pass) {
            accepted = true;
            break;
          }
        }
      }
      a *= 0.5;
      if (a < 1e-18) break;
    }
    if (!accepted) break;  // line search stalled; report current residual

    GradEval e_new = grad_at(ctx, cand, lambda, rho);
    if (!e_new.ok) break;

    // BB1 step from the accepted move.
    Point db(ctx.L), dg(ctx.L);
    for (int k = 0; k < ctx.L; ++k) {
      db[k] = cand[k] - b[k];
      dg[k] = e_new.grad[k] - e.grad[k];
    }
    const double sy = dot(db, dg);
    const double ss = dot(db, db);
    alpha = (sy > 1e-30) ? std::clamp(ss / sy, 1e-10, 1e10) : a * 2.0;

    b = std::move(cand);
    e = std::move(e_new);
    recent.push_back(e.phi);
    if (recent.size() > 5) recent.pop_front();
  }

  res.f = e.f;
  res.c = e.c;
  res.iters = iter;
  res.pg_res = pg_residual(ctx, b, e.grad);
  return res;
}

/// Rescale all B_k by a common factor so that tr(C_1) = d exactly.
void snap_trace(const Ctx& ctx, Point& b) {
  Matrix total = Matrix::Zero(ctx.m, ctx.m);
  for (const auto& bk : b) total += bk;
  if (total.norm() == 0.0) return;
  double s = 1.0;
  for (int it = 0; it < 40; ++it) {
    Matrix c1 = spd_inverse(ctx.k_inv + s * total, "snap_trace");
    const double h = c1.trace() - ctx.d;
    if (std::abs(h) < 1e-15 * std::max(1.0, ctx.d)) break;
    const double hp = -(c1 * total * c1).trace();
    if (hp >= 0.0) break;
    double s_next = s - h / hp;
    if (!(s_next > 0.0)) s_next = 0.5 * s;
    s = s_next;
  }
  // Only apply if the scaled point still respects the strict upper guard.
  Point scaled(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) scaled[k] = s * b[k];
  if (guard_ok(ctx, scaled)) b = std::move(scaled);
}

struct StartResult {
  Point b;
  double f = std::numeric_limits<double>::infinity();
  double c = 0.0;
  double pg_res = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
  bool valid = false;
};

StartResult run_start(const Ctx& ctx, Point b, const SolverOptions& opts) {
  StartResult out;
  b = project_cone(b);
  for (int t = 0; t < 64 && !guard_ok(ctx, b); ++t)
    for (auto& bk : b) bk *= 0.5;
  if (!guard_ok(ctx, b)) return out;

  // Phase 1: augmented Lagrangian on the trace constraint.
  double lambda = 1.0;
  double rho = 10.0;
  double c_prev = std::numeric_limits<double>::infinity();
  double tol_o = 1e-3;
  InnerResult res;
  for (int outer = 0; outer < 40; ++outer) {
    res = inner_minimize(ctx, b, lambda, rho, tol_o, opts.max_iters);
    const double c = res.c;
    if (std::abs(c) <= 1e-10 && tol_o <= opts.tol) break;
    lambda = std::max(0.0, lambda + rho * c);
    if (outer > 0 && std::abs(c) > 0.25 * c_prev) rho = std::min(rho * 8.0, 1e12);
    c_prev = std::abs(c);
    tol_o = std::max(opts.tol, 0.05 * tol_o);
  }

  // Phase 2: fixed-multiplier solves with a secant update driving
  // tr(C_1) -> d (Corollary-2 activity).
  double lam_prev = lambda, c_at_prev = std::numeric_limits<double>::quiet_NaN();
  res = inner_minimize(ctx, b, lambda, 0.0, opts.tol, opts.max_iters);
  double c = res.c;
  for (int round = 0; round < 12 && std::abs(c) > 1e-12; ++round) {
    double lam_next;
    if (std::isfinite(c_at_prev) && c_at_prev != c) {
      lam_next = lambda - c * (lambda - lam_prev) / (c - c_at_prev);
    } else {
      const double bump = std::max(1e-8, 1e-3 * lambda);
      lam_next = lambda + (c > 0.0 ? bump : -bump);
    }
    lam_prev = lambda;
    c_at_prev = c;
    lambda = std::max(0.0, lam_next);
    res = inner_minimize(ctx, b, lambda, 0.0, opts.tol, opts.max_iters);
    c = res.c;
  }

  // Phase 3: pin the active trace exactly, then re-polish stationarity.
  for (int round = 0; round < 3; ++round) {
    snap_trace(ctx, b);
    res = inner_minimize(ctx, b, lambda, 0.0, opts.tol, 500);
    if (std::abs(res.c) <= 1e-13) break;
  }
  if (std::abs(res.c) > 1e-13) {
    snap_trace(ctx, b);
    GradEval e = grad_at(ctx, b, lambda, 0.0);
    res.f = e.f;
    res.c = e.c;
    res.pg_res = pg_residual(ctx, b, e.grad);
  }

  out.b = std::move(b);
  out.f = res.f;
  out.c = res.c;
  out.pg_res = res.pg_res;
  out.lambda = lambda;
  out.valid = true;
  return out;
}

bool lexicographic_less(const Point& a, const Point& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (int i = 0; i < a[k].rows(); ++i) {
      for (int j = 0; j < a[k].cols(); ++j) {
        if (a[k](i, j) != b[k](i, j)) return a[k](i, j) < b[k](i, j);
      }
    }
  }
  return false;
}

}  // namespace

BtSolution solve_bt(const ProblemInstance& instance,
                    const SolverOptions& options) {
  const Ctx ctx = make_ctx(instance);
  const int L = instance.L;
  const int m = instance.m;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, 0.95);

  auto make_start = [&](int index) {
    Point b(L);
    if (index < 9) {
      const double t = 0.1 * (index + 1);
      for (int k = 0; k < L; ++k) b[k] = t * ctx.sigma_inv[k];
    } else {
      for (int k = 0; k < L; ++k) {
        Matrix g(m, m);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) g(i, j) = normal(rng);
        Matrix w = sym(g * g.transpose());
        const double top = max_eigenvalue(w);
        if (top > 0.0) w /= top;
        const double u = unif(rng);
        b[k] = sym(ctx.sigma_inv_sqrt[k] * (u * w) * ctx.sigma_inv_sqrt[k]);
      }
    }
    return b;
  };

  StartResult best;
  int used = 0;
  for (int s = 0; s < std::max(1, options.starts); ++s) {
    StartResult cand = run_start(ctx, make_start(s), options);
    ++used;
    if (!cand.valid) continue;
    const bool cand_feas = cand.c <= options.feasibility_tol;
    const bool best_feas = best.valid && best.c <= options.feasibility_tol;
    bool take = false;
    if (!best.valid) {
      take = true;
    } else if (cand_feas != best_feas) {
      take = cand_feas;
    } else if (cand.f != best.f) {
      take = cand.f < best.f;
    } else {
      take = lexicographic_less(cand.b, best.b);
    }
    if (take) best = std::move(cand);
  }

  if (!best.valid) {
    throw InfeasibleError("solve_bt: no valid start could be constructed");
  }

  BtSolution sol;
  sol.point.B = best.b;
  sol.chain = mse_chain(instance, sol.point);
  sol.rate = bt_objective(instance, sol.point);
  sol.trace_gap = sol.chain.C[0].trace() - instance.d;
  sol.projected_gradient_norm = best.pg_res;
  sol.lambda_estimate = best.lambda;
  sol.starts_used = used;
  sol.seed = options.seed;
  const bool converged =
      best.pg_res <= options.tol * (1.0 + std::abs(sol.rate)) &&
      sol.trace_gap <= options.feasibility_tol;
  sol.status = converged ? SolveStatus::Converged : SolveStatus::MaxIterations;
  return sol;
}

}  // namespace ceo
