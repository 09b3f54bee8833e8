#ifndef SLDS_DISTRIBUTIONS_HPP
#define SLDS_DISTRIBUTIONS_HPP

#include <utility>

#include "slds/linalg.hpp"
#include "slds/random.hpp"
#include "slds/types.hpp"

namespace slds {

// Gaussian in information form: theta = Sigma^{-1} mu, lambda = Sigma^{-1}.
// lambda is kept symmetric; positive definiteness is required only when
// converting to moment form or drawing.
struct InformationGaussian {
  Vector theta;
  Matrix lambda;

  InformationGaussian() = default;
  InformationGaussian(Vector t, Matrix l) : theta(std::move(t)), lambda(symmetrized(l)) {}

  static InformationGaussian zero(Eigen::Index dim) {
    return InformationGaussian(Vector::Zero(dim), Matrix::Zero(dim, dim));
  }
  Eigen::Index dim() const { return theta.size(); }
};

// Sum of two information-form Gaussians over the same variable.
InformationGaussian operator+(const InformationGaussian& a, const InformationGaussian& b);

// mean/covariance from (theta, lambda); throws NumericalError with a
// condition estimate when lambda is singular.
std::pair<Vector, Matrix> info_to_moment(const InformationGaussian& g);
InformationGaussian moment_to_info(const Vector& mean, const Matrix& cov);

// Exact joint draw from N^{-1}(theta, lambda).
Vector sample_information_gaussian(const InformationGaussian& g, Rng& rng);
Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng);

struct MatrixNormalParams {
  Matrix M;      // mean matrix, d_out x d_in
  Matrix V;      // right covariance (column coupling), d_in x d_in
  Matrix Sigma;  // left covariance, d_out x d_out
};

struct InverseWishartParams {
  double dof = 0.0;  // must exceed dim - 1
  Matrix scale;      // symmetric positive definite
};

// Normal-inverse-Wishart over (mu, Sigma): Sigma ~ IW(dof, scale),
// mu | Sigma ~ N(mu0, Sigma / kappa).
struct NiwParams {
  Vector mu0;
  double kappa = 1.0;
  double dof = 0.0;
  Matrix scale;
};

// vec(draw) ~ N(vec(M), V kron Sigma) with vec stacking columns.
Matrix sample_matrix_normal(const MatrixNormalParams& params, Rng& rng);

// Draw with E[X] = scale / (dof - dim - 1) for dof > dim + 1.
Matrix sample_inverse_wishart(const InverseWishartParams& params, Rng& rng);

std::pair<Vector, Matrix> sample_niw(const NiwParams& params, Rng& rng);

// Simplex draw; components nonnegative and summing to one within 1e-12.
Vector sample_dirichlet(const Vector& concentration, Rng& rng);

// Log densities used by the joint-density diagnostics.
double log_dirichlet(const Vector& x, const Vector& concentration);
double log_gamma_density(double x, double shape, double rate);
double log_beta_density(double x, double a, double b);
double log_inverse_wishart(const Matrix& sigma, const InverseWishartParams& params);
double log_matrix_normal(const Matrix& a, const MatrixNormalParams& params);

}  // namespace slds

#endif  // SLDS_DISTRIBUTIONS_HPP
