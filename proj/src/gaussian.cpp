#include "ceo/gaussian.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ceo {

void LinearExpr::add_term(int component, const Matrix& coeff) {
  for (auto& [c, m] : terms_) {
    if (c == component) {
      m += coeff;
      return;
    }
  }
  terms_.emplace_back(component, coeff);
}

LinearExpr LinearExpr::premultiplied(const Matrix& t) const {
  if (t.cols() != rows_)
    throw std::invalid_argument("LinearExpr::premultiplied: shape mismatch");
  LinearExpr out(static_cast<int>(t.rows()));
  for (const auto& [c, m] : terms_) out.add_term(c, t * m);
  return out;
}

LinearExpr operator+(const LinearExpr& a, const LinearExpr& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("LinearExpr: adding different shapes");
  LinearExpr out(a.rows());
  for (const auto& [c, m] : a.terms_) out.add_term(c, m);
  for (const auto& [c, m] : b.terms_) out.add_term(c, m);
  return out;
}

LinearExpr operator*(double s, const LinearExpr& a) {
  LinearExpr out(a.rows());
  for (const auto& [c, m] : a.terms_) out.add_term(c, s * m);
  return out;
}

LinearExpr stack(const std::vector<LinearExpr>& exprs) {
  int total = 0;
  for (const auto& e : exprs) total += e.rows();
  LinearExpr out(total);
  int at = 0;
  for (const auto& e : exprs) {
    for (const auto& [c, m] : e.terms()) {
      Matrix lifted = Matrix::Zero(total, m.cols());
      lifted.middleRows(at, e.rows()) = m;
      out.add_term(c, lifted);
    }
    at += e.rows();
  }
  return out;
}

double gaussian_entropy(const Matrix& cov) {
  if (cov.rows() == 0) return 0.0;
  const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
  double ld;
  try {
    ld = logdet_spd(cov, "gaussian_entropy");
  } catch (const SingularMatrixError&) {
    throw DegenerateProjectionError(
        "gaussian_entropy: covariance lost rank (projected variable "
        "degenerate)");
  }
  return 0.5 * (ld + cov.rows() * std::log(two_pi_e));
}

GaussianJoint::GaussianJoint(
    std::vector<std::pair<std::string, int>> components, Matrix covariance)
    : cov_(std::move(covariance)) {
  int total = 0;
  for (auto& [name, dim] : components) {
    names_.push_back(name);
    dims_.push_back(dim);
    offsets_.push_back(total);
    total += dim;
  }
  if (cov_.rows() != total || cov_.cols() != total)
    throw std::invalid_argument("GaussianJoint: covariance shape mismatch");
  if (relative_asymmetry(cov_) > 1e-9)
    throw std::invalid_argument("GaussianJoint: covariance not symmetric");
  cov_ = sym(cov_);
}

GaussianJoint GaussianJoint::independent(
    const std::vector<std::pair<std::string, Matrix>>& blocks) {
  std::vector<std::pair<std::string, int>> components;
  int total = 0;
  for (const auto& [name, cov] : blocks) {
    components.emplace_back(name, static_cast<int>(cov.rows()));
    total += static_cast<int>(cov.rows());
  }
  Matrix full = Matrix::Zero(total, total);
  int at = 0;
  for (const auto& [name, cov] : blocks) {
    full.block(at, at, cov.rows(), cov.cols()) = cov;
    at += static_cast<int>(cov.rows());
  }
  return GaussianJoint(std::move(components), std::move(full));
}

int GaussianJoint::index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("GaussianJoint: unknown component '" + name +
                              "'");
}

int GaussianJoint::dim(const std::string& name) const {
  return dims_[index(name)];
}

LinearExpr GaussianJoint::var(const std::string& name) const {
  const int c = index(name);
  LinearExpr out(dims_[c]);
  out.add_term(c, Matrix::Identity(dims_[c], dims_[c]));
  return out;
}

Matrix GaussianJoint::cov(const LinearExpr& a, const LinearExpr& b) const {
  Matrix out = Matrix::Zero(a.rows(), b.rows());
  for (const auto& [ca, ma] : a.terms()) {
    for (const auto& [cb, mb] : b.terms()) {
      out += ma *
             cov_.block(offsets_[ca], offsets_[cb], dims_[ca], dims_[cb]) *
             mb.transpose();
    }
  }
  return out;
}

Matrix GaussianJoint::conditional_cov(
    const LinearExpr& target, const std::vector<LinearExpr>& given) const {
  const LinearExpr g = stack(given);
  if (g.rows() == 0) return cov(target);
  const Matrix s_gg = sym(cov(g, g));
  Eigen::LLT<Matrix> llt(s_gg);
  if (llt.info() != Eigen::Success ||
      min_eigenvalue(s_gg) <= 1e-13 * std::max(1.0, max_eigenvalue(s_gg))) {
    throw SingularConditioningError(
        "conditional_cov: conditioning block is singular at working "
        "precision");
  }
  const Matrix s_tg = cov(target, g);
  return sym(cov(target) - s_tg * llt.solve(s_tg.transpose()));
}

double GaussianJoint::entropy(const LinearExpr& target,
                              const std::vector<LinearExpr>& given) const {
  if (target.rows() == 0) return 0.0;
  return gaussian_entropy(conditional_cov(target, given));
}

}  // namespace ceo
