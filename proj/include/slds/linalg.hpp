#ifndef SLDS_LINALG_HPP
#define SLDS_LINALG_HPP

#include <Eigen/Cholesky>

#include "slds/types.hpp"

namespace slds {

inline Matrix symmetrized(const Matrix& s) { return 0.5 * (s + s.transpose()); }

// Cholesky of a symmetric PD matrix with the project-wide jitter policy:
// symmetrize, factor, and on failure add 1e-10 * trace/dim * I once before
// retrying. A second failure is a hard numerical error tagged with `what`.
Eigen::LLT<Matrix> llt_jittered(const Matrix& s, const char* what);

// Strict factorization (no jitter); throws NumericalError on failure.
Eigen::LLT<Matrix> llt_strict(const Matrix& s, const char* what);

inline double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double log_det_spd(const Matrix& s, const char* what);

// Inverse of an SPD matrix through its Cholesky factor.
Matrix spd_inverse(const Matrix& s, const char* what);

bool is_symmetric(const Matrix& s, double rel_tol = 1e-10);
bool is_positive_definite(const Matrix& s);
bool is_simplex(const Vector& v, double tol = 1e-10);

// log N(x; mean, Sigma) with Sigma supplied as a Cholesky factor.
double log_mvn(const Vector& x, const Vector& mean, const Eigen::LLT<Matrix>& chol_sigma);
double log_mvn(const Vector& x, const Vector& mean, const Matrix& sigma);

}  // namespace slds

#endif  // SLDS_LINALG_HPP
