#include "ceo/fisher.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ceo {

namespace {

std::vector<LinearExpr> vars_of(const GaussianJoint& joint,
                                const std::vector<std::string>& names) {
  std::vector<LinearExpr> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(joint.var(n));
  return out;
}

void require_independent(const GaussianJoint& joint, const std::string& n,
                         const std::vector<std::string>& others,
                         const char* who) {
  const LinearExpr nn = joint.var(n);
  for (const auto& o : others) {
    if (spectral_norm(joint.cov(nn, joint.var(o))) > 1e-12) {
      throw std::invalid_argument(std::string(who) + ": '" + n +
                                  "' must be independent of '" + o + "'");
    }
  }
}

}  // namespace

Matrix conditional_cov(const GaussianJoint& joint, const std::string& target,
                       const std::vector<std::string>& given) {
  return joint.conditional_cov(joint.var(target), vars_of(joint, given));
}

Matrix fisher_conditional(const GaussianJoint& joint, const std::string& target,
                          const std::vector<std::string>& given) {
  return spd_inverse(conditional_cov(joint, target, given),
                     "fisher_conditional");
}

double check_complementary_identity(const GaussianJoint& joint,
                                    const std::string& x, const std::string& n,
                                    const std::vector<std::string>& given) {
  std::vector<std::string> rest = given;
  rest.push_back(x);
  require_independent(joint, n, rest, "check_complementary_identity");

  const Matrix sigma = joint.cov(joint.var(n));
  const Matrix sigma_inv = spd_inverse(sigma, "complementary identity: cov(N)");
  const LinearExpr sum = joint.var(x) + joint.var(n);
  auto u = vars_of(joint, given);

  const Matrix j_sum = spd_inverse(joint.conditional_cov(sum, u),
                                   "complementary identity: cov(X+N|U)");
  std::vector<LinearExpr> u_and_sum = u;
  u_and_sum.push_back(sum);
  const Matrix mmse = joint.conditional_cov(joint.var(x), u_and_sum);

  return spectral_norm(j_sum + sigma_inv * mmse * sigma_inv - sigma_inv);
}

DeBruijnResult check_de_bruijn(const GaussianJoint& joint, const std::string& x,
                               const std::string& n,
                               const std::vector<std::string>& given,
                               double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("check_de_bruijn: gamma must be in (0,1)");
  std::vector<std::string> rest = given;
  rest.push_back(x);
  require_independent(joint, n, rest, "check_de_bruijn");

  const Matrix sigma = joint.cov(joint.var(n));
  const auto u = vars_of(joint, given);
  const double h = std::min(1e-5, 0.25 * std::min(gamma, 1.0 - gamma));

  DeBruijnResult out;
  {
    // Lemma form: d/dg h(X + sqrt(g) N | U) = (1/2) tr{ J(X + sqrt(g) N | U) S }.
    auto entropy_at = [&](double g) {
      return joint.entropy(joint.var(x) + std::sqrt(g) * joint.var(n), u);
    };
    const double fd = (entropy_at(gamma + h) - entropy_at(gamma - h)) / (2 * h);
    const Matrix j = spd_inverse(
        joint.conditional_cov(joint.var(x) + std::sqrt(gamma) * joint.var(n), u),
        "de Bruijn");
    const double cf = 0.5 * (j * sigma).trace();
    out.lemma3_rel = std::abs(fd - cf) / std::max(1.0, std::abs(cf));
  }
  {
    // Corollary form: d/dg h(sqrt(g) X + N | U)
    //   = (1/2) tr{ S^{-1} cov(X | sqrt(g) X + N, U) }.
    auto entropy_at = [&](double g) {
      return joint.entropy(std::sqrt(g) * joint.var(x) + joint.var(n), u);
    };
    const double fd = (entropy_at(gamma + h) - entropy_at(gamma - h)) / (2 * h);
    std::vector<LinearExpr> cond = u;
    cond.push_back(std::sqrt(gamma) * joint.var(x) + joint.var(n));
    const Matrix mmse = joint.conditional_cov(joint.var(x), cond);
    const double cf =
        0.5 *
        (spd_inverse(sigma, "de Bruijn corollary: cov(N)") * mmse).trace();
    out.corollary1_rel = std::abs(fd - cf) / std::max(1.0, std::abs(cf));
  }
  return out;
}

Matrix check_fii(const GaussianJoint& joint, const std::string& x,
                 const std::string& y, const std::vector<std::string>& given,
                 double gamma) {
  const auto u = vars_of(joint, given);
  const Matrix cross =
      joint.conditional_cov(stack({joint.var(x), joint.var(y)}), u);
  const int dx = joint.dim(x);
  const int dy = joint.dim(y);
  if (cross.block(0, dx, dx, dy).norm() > 1e-10)
    throw std::invalid_argument(
        "check_fii: X and Y must be conditionally independent given U");

  const LinearExpr mix = std::sqrt(1.0 - gamma) * joint.var(x) +
                         std::sqrt(gamma) * joint.var(y);
  const Matrix lhs = spd_inverse(joint.conditional_cov(mix, u), "check_fii");
  const Matrix rhs =
      (1.0 - gamma) * spd_inverse(cross.block(0, 0, dx, dx), "check_fii") +
      gamma * spd_inverse(cross.block(dx, dx, dy, dy), "check_fii");
  return sym(rhs - lhs);
}

Matrix check_mmse_bound(const GaussianJoint& joint, const std::string& x,
                        const std::string& n,
                        const std::vector<std::string>& given, double gamma) {
  std::vector<std::string> rest = given;
  rest.push_back(x);
  require_independent(joint, n, rest, "check_mmse_bound");

  const Matrix sigma = joint.cov(joint.var(n));
  auto cond = vars_of(joint, given);
  const Matrix cov_x_u = joint.conditional_cov(joint.var(x), cond);
  cond.push_back(joint.var(x) + joint.var(n));
  const Matrix mmse = joint.conditional_cov(joint.var(x), cond);
  return sym(gamma * gamma * cov_x_u +
             (1.0 - gamma) * (1.0 - gamma) * sigma - mmse);
}

Matrix check_data_processing(const GaussianJoint& joint, const std::string& x,
                             const std::string& u, const std::string& v) {
  const Matrix markov =
      joint.conditional_cov(stack({joint.var(u), joint.var(x)}),
                            {joint.var(v)});
  const int du = joint.dim(u);
  const int dx = joint.dim(x);
  if (markov.block(0, du, du, dx).norm() > 1e-10)
    throw std::invalid_argument(
        "check_data_processing: U -> V -> X must form a Markov chain");

  const Matrix j_u = fisher_conditional(joint, x, {u});
  const Matrix j_v = fisher_conditional(joint, x, {v});
  return sym(j_v - j_u);
}

namespace {

struct DrawTools {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> unif{0.0, 1.0};

  explicit DrawTools(std::uint64_t seed) : rng(seed) {}

  Matrix gauss(int r, int c) {
    Matrix g(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) g(i, j) = normal(rng);
    return g;
  }

  // A = G G^T + eps I with eps = 1e-3: well-conditioned reproducible PSD.
  Matrix psd(int dim) {
    const Matrix g = gauss(dim, dim);
    return sym(g * g.transpose()) + 1e-3 * Matrix::Identity(dim, dim);
  }

  int dim() { return 1 + static_cast<int>(unif(rng) * 3.999); }
  double gamma() { return 0.05 + 0.9 * unif(rng); }
};

double condition_number(const Matrix& a) {
  const double lo = min_eigenvalue(a);
  const double hi = max_eigenvalue(a);
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

/// Correlated (X, U) pair plus an independent Gaussian N with cov matching X.
GaussianJoint draw_xu_n(DrawTools& t, int dx, int du) {
  const Matrix joint_xu = t.psd(dx + du);
  const Matrix sigma_n = t.psd(dx);
  Matrix full = Matrix::Zero(dx + du + dx, dx + du + dx);
  full.topLeftCorner(dx + du, dx + du) = joint_xu;
  full.bottomRightCorner(dx, dx) = sigma_n;
  return GaussianJoint({{"X", dx}, {"U", du}, {"N", dx}}, full);
}

}  // namespace

LemmaSuiteReport run_lemma_suite(std::uint64_t seed, int draws_per_lemma) {
  DrawTools t(seed);
  LemmaSuiteReport rep;
  rep.seed = seed;

  auto record = [&](const std::string& name, double tol, double residual,
                    double cond, LemmaResult* slot) {
    if (residual > slot->worst_residual) {
      slot->worst_residual = residual;
      slot->worst_condition = cond;
    }
    slot->name = name;
    slot->tolerance = tol;
    ++slot->draws;
  };

  LemmaResult cramer_rao, complementary, de_bruijn, fii, mmse, dpi;

  for (int it = 0; it < draws_per_lemma; ++it) {
    // Cramer-Rao (equality on Gaussians) + complementary identity + de Bruijn
    // share the (X, U, N) draw.
    {
      const int dx = t.dim(), du = t.dim();
      GaussianJoint j = draw_xu_n(t, dx, du);
      const double cond = condition_number(j.covariance());

      const Matrix cov_xu = conditional_cov(j, "X", {"U"});
      const Matrix jm = fisher_conditional(j, "X", {"U"});
      record("cramer-rao", 1e-10,
             spectral_norm(jm * cov_xu - Matrix::Identity(dx, dx)), cond,
             &cramer_rao);

      record("complementary-identity", 1e-10,
             check_complementary_identity(j, "X", "N", {"U"}), cond,
             &complementary);

      const DeBruijnResult db = check_de_bruijn(j, "X", "N", {"U"}, t.gamma());
      record("de-bruijn", 1e-5, std::max(db.lemma3_rel, db.corollary1_rel),
             cond, &de_bruijn);
    }

    // Fisher information inequality: X, Y conditionally independent given U.
    {
      const int d = t.dim(), du = t.dim();
      const Matrix s_u = t.psd(du);
      const Matrix fx = t.gauss(d, du), fy = t.gauss(d, du);
      const Matrix sx = t.psd(d), sy = t.psd(d);
      Matrix full = Matrix::Zero(2 * d + du, 2 * d + du);
      full.block(0, 0, d, d) = fx * s_u * fx.transpose() + sx;
      full.block(d, d, d, d) = fy * s_u * fy.transpose() + sy;
      full.block(2 * d, 2 * d, du, du) = s_u;
      full.block(0, d, d, d) = fx * s_u * fy.transpose();
      full.block(d, 0, d, d) = full.block(0, d, d, d).transpose();
      full.block(0, 2 * d, d, du) = fx * s_u;
      full.block(2 * d, 0, du, d) = full.block(0, 2 * d, d, du).transpose();
      full.block(d, 2 * d, d, du) = fy * s_u;
      full.block(2 * d, d, du, d) = full.block(d, 2 * d, d, du).transpose();
      GaussianJoint j({{"X", d}, {"Y", d}, {"U", du}}, full);
      const Matrix margin = check_fii(j, "X", "Y", {"U"}, t.gamma());
      record("fisher-information-inequality", 1e-10,
             std::max(0.0, -min_eigenvalue(margin)),
             condition_number(j.covariance()), &fii);
    }

    // MMSE bound.
    {
      const int dx = t.dim(), du = t.dim();
      GaussianJoint j = draw_xu_n(t, dx, du);
      const Matrix margin = check_mmse_bound(j, "X", "N", {"U"}, t.gamma());
      record("mmse-bound", 1e-10, std::max(0.0, -min_eigenvalue(margin)),
             condition_number(j.covariance()), &mmse);
    }

    // Data processing along U -> V -> X.
    {
      const int dx = t.dim(), dv = t.dim(), du = t.dim();
      const Matrix s_x = t.psd(dx);
      const Matrix g1 = t.gauss(dv, dx), g2 = t.gauss(du, dv);
      const Matrix s1 = t.psd(dv), s2 = t.psd(du);
      const Matrix s_v = g1 * s_x * g1.transpose() + s1;
      Matrix full = Matrix::Zero(dx + du + dv, dx + du + dv);
      full.block(0, 0, dx, dx) = s_x;
      full.block(dx + du, dx + du, dv, dv) = s_v;
      full.block(dx, dx, du, du) = g2 * s_v * g2.transpose() + s2;
      full.block(0, dx + du, dx, dv) = s_x * g1.transpose();
      full.block(dx + du, 0, dv, dx) = g1 * s_x;
      full.block(dx, dx + du, du, dv) = g2 * s_v;
      full.block(dx + du, dx, dv, du) = s_v * g2.transpose();
      full.block(0, dx, dx, du) = s_x * g1.transpose() * g2.transpose();
      full.block(dx, 0, du, dx) = full.block(0, dx, dx, du).transpose();
      GaussianJoint j({{"X", dx}, {"U", du}, {"V", dv}}, full);
      const Matrix margin = check_data_processing(j, "X", "U", "V");
      record("data-processing", 1e-10, std::max(0.0, -min_eigenvalue(margin)),
             condition_number(j.covariance()), &dpi);
    }
  }

  rep.cramer_rao_worst = cramer_rao.worst_residual;
  for (auto* r : {&cramer_rao, &complementary, &de_bruijn, &fii, &mmse, &dpi}) {
    r->pass = r->worst_residual <= r->tolerance;
    rep.lemmas.push_back(*r);
  }
  rep.all_pass = true;
  for (const auto& r : rep.lemmas) rep.all_pass = rep.all_pass && r.pass;
  return rep;
}

}  // namespace ceo
