#include "slds/linalg.hpp"

#include <cmath>
#include <numbers>

namespace slds {

Eigen::LLT<Matrix> llt_jittered(const Matrix& s, const char* what) {
  Matrix sym = symmetrized(s);
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) return llt;
  const double jitter = 1e-10 * sym.trace() / static_cast<double>(sym.rows());
  sym.diagonal().array() += jitter;
  llt.compute(sym);
  if (llt.info() == Eigen::Success) return llt;
  throw NumericalError(std::string(what) + ": matrix not positive definite after jitter");
}

Eigen::LLT<Matrix> llt_strict(const Matrix& s, const char* what) {
  Eigen::LLT<Matrix> llt(symmetrized(s));
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": matrix not positive definite");
  }
  return llt;
}

double log_det_spd(const Matrix& s, const char* what) {
  return log_det_from_llt(llt_jittered(s, what));
}

Matrix spd_inverse(const Matrix& s, const char* what) {
  const Eigen::Index d = s.rows();
  return llt_jittered(s, what).solve(Matrix::Identity(d, d));
}

bool is_symmetric(const Matrix& s, double rel_tol) {
  const double scale = std::max(s.norm(), 1e-300);
  return (s - s.transpose()).norm() <= rel_tol * scale;
}

bool is_positive_definite(const Matrix& s) {
  if (s.rows() != s.cols()) return false;
  Eigen::LLT<Matrix> llt(symmetrized(s));
  return llt.info() == Eigen::Success;
}

bool is_simplex(const Vector& v, double tol) {
  if (v.size() == 0) return false;
  if (v.minCoeff() < -tol) return false;
  return std::abs(v.sum() - 1.0) <= tol;
}

double log_mvn(const Vector& x, const Vector& mean, const Eigen::LLT<Matrix>& chol_sigma) {
  const Eigen::Index d = x.size();
  const Vector r = chol_sigma.matrixL().solve(x - mean);
  const double half_log_det = chol_sigma.matrixLLT().diagonal().array().log().sum();
  return -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) - half_log_det -
         0.5 * r.squaredNorm();
}

double log_mvn(const Vector& x, const Vector& mean, const Matrix& sigma) {
  return log_mvn(x, mean, llt_jittered(sigma, "log_mvn"));
}

}  // namespace slds
