#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ceo/linalg.hpp"

namespace ceo {

class GaussianJoint;

/// A linear map of the joint's components: sum_c coeff_c * component_c.
/// rows() may be zero (the empty variable), which conditions on nothing and
/// has zero differential entropy by convention.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(int rows) : rows_(rows) {}

  int rows() const { return rows_; }
  const std::vector<std::pair<int, Matrix>>& terms() const { return terms_; }

  /// T * expr for a matrix T with T.cols() == rows().
  LinearExpr premultiplied(const Matrix& t) const;

  friend LinearExpr operator+(const LinearExpr& a, const LinearExpr& b);
  friend LinearExpr operator*(double s, const LinearExpr& a);

 private:
  friend class GaussianJoint;
  friend LinearExpr stack(const std::vector<LinearExpr>& exprs);
  void add_term(int component, const Matrix& coeff);

  int rows_ = 0;
  std::vector<std::pair<int, Matrix>> terms_;
};

/// A zero-mean jointly Gaussian family over named components with a full
/// block covariance. All queries are closed-form: covariances of linear
/// expressions, Schur-complement conditioning, differential entropies.
class GaussianJoint {
 public:
  GaussianJoint(std::vector<std::pair<std::string, int>> components,
                Matrix covariance);

  /// Block-diagonal convenience: mutually independent named blocks.
  static GaussianJoint independent(
      const std::vector<std::pair<std::string, Matrix>>& blocks);

  int components() const { return static_cast<int>(dims_.size()); }
  int dim(const std::string& name) const;
  const Matrix& covariance() const { return cov_; }

  /// Identity-coefficient expression for one component.
  LinearExpr var(const std::string& name) const;

  Matrix cov(const LinearExpr& a, const LinearExpr& b) const;
  Matrix cov(const LinearExpr& a) const { return sym(cov(a, a)); }

  /// cov(target | given); throws SingularConditioningError when the
  /// conditioning block is singular beyond a relative tolerance.
  Matrix conditional_cov(const LinearExpr& target,
                         const std::vector<LinearExpr>& given) const;

  /// Differential entropy h(target | given) in nats; 0 for empty targets.
  double entropy(const LinearExpr& target,
                 const std::vector<LinearExpr>& given) const;

 private:
  int index(const std::string& name) const;

  std::vector<std::string> names_;
  std::vector<int> dims_;
  std::vector<int> offsets_;
  Matrix cov_;
};

/// Stacks expressions into one (skipping zero-row entries).
LinearExpr stack(const std::vector<LinearExpr>& exprs);

/// h for a given covariance: (1/2) log |2 pi e  S|; 0 for the empty matrix.
double gaussian_entropy(const Matrix& cov);

}  // namespace ceo
