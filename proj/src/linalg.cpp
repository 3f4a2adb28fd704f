#include "ceo/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace ceo {

double relative_asymmetry(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

double min_eigenvalue(const Matrix& sym_a) {
  if (sym_a.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym_a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& sym_a) {
  if (sym_a.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym_a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.jacobiSvd().singularValues().maxCoeff();
}

double logdet_spd(const Matrix& a, const char* what) {
  if (a.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError(std::string(what) +
                              ": matrix is not positive definite");
  }
  return 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
}

Matrix spd_inverse(const Matrix& a, const char* what) {
  if (a.rows() == 0) return a;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError(std::string(what) +
                              ": matrix is not positive definite");
  }
  return sym(llt.solve(Matrix::Identity(a.rows(), a.cols())));
}

Matrix spd_sqrt(const Matrix& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.eigenvalues().minCoeff() < 0.0) {
    throw SingularMatrixError(std::string(what) +
                              ": matrix is not positive semidefinite");
  }
  return es.operatorSqrt();
}

Matrix psd_clip(const Matrix& sym_a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym_a);
  Vector lam = es.eigenvalues().cwiseMax(0.0);
  return sym(es.eigenvectors() * lam.asDiagonal() *
             es.eigenvectors().transpose());
}

bool is_spd(const Matrix& sym_a, double rel_tol) {
  if (sym_a.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym_a, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return hi > 0.0 && lo > rel_tol * hi;
}

}  // namespace ceo
