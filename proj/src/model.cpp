#include "slds/model.hpp"

#include <cmath>

#include "slds/linalg.hpp"

namespace slds {

Matrix ModelConfig::measurement_matrix() const {
  Matrix c = Matrix::Zero(obs_dim, state_dim);
  c.topLeftCorner(obs_dim, obs_dim).setIdentity();
  return c;
}

Matrix ModelConfig::initial_state_covariance() const {
  const int n = out_dim();
  double scale = p0_scale;
  if (scale <= 0.0) {
    const InverseWishartParams iw = sigma_iw_prior();
    scale = 10.0 * iw.scale.trace() / static_cast<double>(iw.scale.rows());
  }
  return scale * Matrix::Identity(n, n);
}

std::pair<Vector, Matrix> ModelConfig::process_mean_prior() const {
  if (mu_prior) return *mu_prior;
  if (niwn) return {niwn->mu0, niwn->Sigma0};
  throw ConfigError("process mean requested without a (mu0, Sigma0) prior");
}

InverseWishartParams ModelConfig::sigma_iw_prior() const {
  switch (prior) {
    case PriorFamily::Mniw:
      if (!mniw) throw ConfigError("MNIW prior not configured");
      return {mniw->n0, mniw->S0};
    case PriorFamily::Ard:
      if (!sigma_prior) throw ConfigError("ARD prior needs an IW prior on Sigma");
      return *sigma_prior;
    case PriorFamily::Niwn:
      if (!niwn) throw ConfigError("N-IW-N prior not configured");
      return {niwn->n0, niwn->S0};
  }
  throw ConfigError("unknown prior family");
}

void ModelConfig::validate(Eigen::Index data_dim, Eigen::Index data_length) const {
  if (L < 1) throw ConfigError("truncation L must be at least 1");
  if (obs_dim != data_dim) throw ConfigError("obs_dim does not match the data");
  if (is_slds() && state_dim < obs_dim) {
    throw ConfigError("SLDS state dimension must be at least the observation dimension");
  }
  if (!is_slds() && ar_order < 0) throw ConfigError("AR order must be nonnegative");
  if ((family == ModelFamily::SldsSharedA || has_fixed_A()) && prior != PriorFamily::Niwn) {
    throw ConfigError("shared-A and fixed-A families require the N-IW-N prior");
  }
  if (family == ModelFamily::SldsFixedA && !fixed_A) {
    throw ConfigError("fixed-A family requires the dynamic matrix");
  }
  if (!is_slds() && ar_order == 0 && prior != PriorFamily::Niwn) {
    throw ConfigError("an order-0 model has no dynamic matrix; use the N-IW-N prior");
  }
  if (!is_slds() && ar_order == 0 && !process_mean) {
    throw ConfigError("an order-0 model needs a process mean to carry the emissions");
  }
  if (has_fixed_A()) {
    if (fixed_A->rows() != out_dim() || fixed_A->cols() != in_dim()) {
      throw ConfigError("fixed A has the wrong shape");
    }
  }
  if (prior == PriorFamily::Mniw && !mniw) throw ConfigError("MNIW prior not configured");
  if (prior == PriorFamily::Niwn && !niwn) throw ConfigError("N-IW-N prior not configured");
  if (prior == PriorFamily::Ard && !sigma_prior) {
    throw ConfigError("ARD prior needs an IW prior on Sigma");
  }
  if (prior == PriorFamily::Mniw && process_mean && !mu_prior) {
    throw ConfigError("MNIW with a process mean needs an explicit (mu0, Sigma0) prior");
  }
  if (is_slds() && !mixture_noise && !r_prior) {
    throw ConfigError("SLDS families need a measurement-noise prior");
  }
  if (mixture_noise && !mixture_component_prior) {
    throw ConfigError("mixture measurement noise needs a component prior");
  }
  if (!supervision.empty()) {
    if (static_cast<Eigen::Index>(supervision.size()) != data_length) {
      throw ConfigError("supervision must give one label (or -1) per time step");
    }
    for (int s : supervision) {
      if (s >= L) throw ConfigError("supervision label exceeds the truncation");
    }
  }
  if (schedule.n_iters < 1) throw ConfigError("schedule needs at least one iteration");
}

void set_hyperparameters_from_data(ModelConfig& config, const Matrix& y, double s0_fraction,
                                   double r0_fraction, double n0_override) {
  if (y.cols() < 2) throw ParameterError("set_hyperparameters_from_data: need T >= 2");
  const Matrix sigma_bar = empirical_covariance(y);
  const int ell = config.out_dim();
  const int p = config.in_dim();
  double frac = s0_fraction;
  if (frac <= 0.0) frac = config.is_slds() ? 0.675 : 0.75;
  const Matrix s0 = frac * embed_scale_matrix(sigma_bar, ell);

  if (config.prior == PriorFamily::Mniw && !config.mniw) {
    config.mniw = mniw_hyper_from_scale(sigma_bar, ell, p, frac, n0_override);
  }
  if (config.prior == PriorFamily::Ard && !config.sigma_prior) {
    config.sigma_prior = InverseWishartParams{static_cast<double>(p) + 2.0, s0};
  }
  if (config.prior == PriorFamily::Niwn && !config.niwn) {
    NiwnHyper hyper;
    hyper.m_A = Vector::Zero(ell * p);
    const double var_scale = 0.75 * sigma_bar.diagonal().mean();
    hyper.Sigma_A = var_scale * Matrix::Identity(ell * p, ell * p);
    hyper.n0 = static_cast<double>(ell) + 2.0;
    hyper.S0 = 0.75 * embed_scale_matrix(sigma_bar, ell);
    hyper.mu0 = Vector::Zero(ell);
    hyper.Sigma0 = 0.75 * embed_scale_matrix(sigma_bar, ell);
    hyper.validate();
    config.niwn = hyper;
  }
  if (config.is_slds() && !config.mixture_noise && !config.r_prior) {
    config.r_prior = measurement_prior_from_data(y, r0_fraction);
  }
}

}  // namespace slds
