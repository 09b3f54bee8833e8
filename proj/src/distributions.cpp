#include "slds/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace slds {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ParameterError(std::string(what) + ": matrix must be square");
  }
}

double log_multivariate_gamma(double a, int d) {
  double out = 0.25 * d * (d - 1) * std::log(std::numbers::pi);
  for (int i = 0; i < d; ++i) out += std::lgamma(a - 0.5 * i);
  return out;
}

}  // namespace

InformationGaussian operator+(const InformationGaussian& a, const InformationGaussian& b) {
  if (a.dim() != b.dim()) {
    throw ParameterError("InformationGaussian: dimension mismatch in combination");
  }
  return InformationGaussian(a.theta + b.theta, a.lambda + b.lambda);
}

std::pair<Vector, Matrix> info_to_moment(const InformationGaussian& g) {
  Eigen::LLT<Matrix> llt(symmetrized(g.lambda));
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(g.lambda));
    std::ostringstream msg;
    msg << "info_to_moment: lambda singular or indefinite; eigenvalue range ["
        << es.eigenvalues().minCoeff() << ", " << es.eigenvalues().maxCoeff() << "]";
    throw NumericalError(msg.str());
  }
  const Eigen::Index d = g.dim();
  Matrix cov = llt.solve(Matrix::Identity(d, d));
  Vector mean = llt.solve(g.theta);
  return {std::move(mean), symmetrized(cov)};
}

InformationGaussian moment_to_info(const Vector& mean, const Matrix& cov) {
  auto llt = llt_strict(cov, "moment_to_info");
  const Eigen::Index d = mean.size();
  Matrix lambda = llt.solve(Matrix::Identity(d, d));
  Vector theta = llt.solve(mean);
  return InformationGaussian(std::move(theta), std::move(lambda));
}

Vector sample_information_gaussian(const InformationGaussian& g, Rng& rng) {
  auto llt = llt_jittered(g.lambda, "sample_information_gaussian");
  Vector mean = llt.solve(g.theta);
  // x = mean + L^{-T} z has covariance (L L^T)^{-1} = lambda^{-1}.
  Vector z = rng.normal_vector(g.dim());
  Matrix l = llt.matrixL();
  Vector delta = l.transpose().triangularView<Eigen::Upper>().solve(z);
  return mean + delta;
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng) {
  auto llt = llt_jittered(cov, "sample_mvn");
  Matrix l = llt.matrixL();
  return mean + l * rng.normal_vector(mean.size());
}

Matrix sample_matrix_normal(const MatrixNormalParams& params, Rng& rng) {
  const Eigen::Index d_out = params.M.rows();
  const Eigen::Index d_in = params.M.cols();
  if (params.Sigma.rows() != d_out || params.V.rows() != d_in) {
    throw ParameterError("sample_matrix_normal: dimension mismatch");
  }
  require_square(params.Sigma, "sample_matrix_normal");
  require_square(params.V, "sample_matrix_normal");
  auto llt_sigma = llt_jittered(params.Sigma, "sample_matrix_normal: Sigma");
  auto llt_v = llt_jittered(params.V, "sample_matrix_normal: V");
  Matrix z = rng.normal_matrix(d_out, d_in);
  Matrix lv = llt_v.matrixL();
  return params.M + Matrix(llt_sigma.matrixL()) * z * lv.transpose();
}

Matrix sample_inverse_wishart(const InverseWishartParams& params, Rng& rng) {
  require_square(params.scale, "sample_inverse_wishart");
  const int d = static_cast<int>(params.scale.rows());
  if (!(params.dof > d - 1)) {
    throw ParameterError("sample_inverse_wishart: dof must exceed dim - 1");
  }
  if (!is_positive_definite(params.scale)) {
    throw ParameterError("sample_inverse_wishart: scale must be positive definite");
  }
  auto llt = llt_strict(params.scale, "sample_inverse_wishart");

  // Bartlett factor of W ~ Wishart(dof, scale^{-1}); the draw is
  // (L A^{-T})(L A^{-T})^T, symmetric PD by construction.
  Matrix a = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(params.dof - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  Matrix lt = llt.matrixL().transpose();
  Matrix u = a.triangularView<Eigen::Lower>().solve(lt);  // A^{-1} L^T
  return symmetrized(u.transpose() * u);
}

std::pair<Vector, Matrix> sample_niw(const NiwParams& params, Rng& rng) {
  if (!(params.kappa > 0.0)) throw ParameterError("sample_niw: kappa must be positive");
  Matrix sigma = sample_inverse_wishart({params.dof, params.scale}, rng);
  Vector mu = sample_mvn(params.mu0, sigma / params.kappa, rng);
  return {std::move(mu), std::move(sigma)};
}

Vector sample_dirichlet(const Vector& concentration, Rng& rng) {
  const Eigen::Index n = concentration.size();
  if (n == 0) throw ParameterError("sample_dirichlet: empty concentration");
  if (concentration.minCoeff() <= 0.0) {
    throw ParameterError("sample_dirichlet: concentrations must be strictly positive");
  }
  // Gamma draws in the log domain via G(a) = G(a+1) U^{1/a}; exact for every
  // shape and immune to underflow at the tiny concentrations the weak-limit
  // prior produces.
  Vector log_g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = rng.gamma(concentration[i] + 1.0, 1.0);
    const double u = rng.uniform();
    log_g[i] = std::log(g) + std::log(u) / concentration[i];
  }
  const double m = log_g.maxCoeff();
  if (!std::isfinite(m)) {
    throw NumericalError("sample_dirichlet: degenerate log-gamma draws");
  }
  Vector w = (log_g.array() - m).exp();
  return w / w.sum();
}

double log_dirichlet(const Vector& x, const Vector& concentration) {
  double out = std::lgamma(concentration.sum());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out -= std::lgamma(concentration[i]);
    out += (concentration[i] - 1.0) * std::log(std::max(x[i], 1e-300));
  }
  return out;
}

double log_gamma_density(double x, double shape, double rate) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_beta_density(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

double log_inverse_wishart(const Matrix& sigma, const InverseWishartParams& params) {
  const int d = static_cast<int>(sigma.rows());
  const double n0 = params.dof;
  auto llt_sigma = llt_jittered(sigma, "log_inverse_wishart");
  const double log_det_sigma = log_det_from_llt(llt_sigma);
  const double log_det_scale = log_det_spd(params.scale, "log_inverse_wishart: scale");
  const double trace_term = llt_sigma.solve(params.scale).trace();
  return 0.5 * n0 * log_det_scale - 0.5 * n0 * d * std::log(2.0) -
         log_multivariate_gamma(0.5 * n0, d) - 0.5 * (n0 + d + 1.0) * log_det_sigma -
         0.5 * trace_term;
}

double log_matrix_normal(const Matrix& a, const MatrixNormalParams& params) {
  const int d_out = static_cast<int>(a.rows());
  const int d_in = static_cast<int>(a.cols());
  auto llt_sigma = llt_jittered(params.Sigma, "log_matrix_normal: Sigma");
  auto llt_v = llt_jittered(params.V, "log_matrix_normal: V");
  const Matrix diff = a - params.M;
  // tr(V^{-1} (A-M)^T Sigma^{-1} (A-M)) via triangular solves.
  const Matrix s1 = llt_sigma.matrixL().solve(diff);
  const Matrix s2 = llt_v.matrixL().solve(s1.transpose());
  const double quad = s2.squaredNorm();
  return -0.5 * d_out * d_in * std::log(2.0 * std::numbers::pi) -
         0.5 * d_in * log_det_from_llt(llt_sigma) - 0.5 * d_out * log_det_from_llt(llt_v) -
         0.5 * quad;
}

}  // namespace slds
