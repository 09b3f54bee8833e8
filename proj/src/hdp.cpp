#include "slds/hdp.hpp"

#include <cmath>

#include "slds/distributions.hpp"
#include "slds/linalg.hpp"

namespace slds {

void HdpHyper::validate() const {
  if (!(alpha > 0.0)) throw ParameterError("HdpHyper: alpha must be positive");
  if (!(gamma > 0.0)) throw ParameterError("HdpHyper: gamma must be positive");
  if (kappa < 0.0) throw ParameterError("HdpHyper: kappa must be nonnegative");
}

void TransitionSet::validate() const {
  if (!is_simplex(beta)) throw NumericalError("TransitionSet: beta off the simplex");
  if (pi.rows() != beta.size() || pi.cols() != beta.size()) {
    throw ParameterError("TransitionSet: pi must be L x L");
  }
  for (Eigen::Index j = 0; j < pi.rows(); ++j) {
    if (!is_simplex(pi.row(j).transpose())) {
      throw NumericalError("TransitionSet: pi row off the simplex");
    }
  }
}

Eigen::MatrixXi count_transitions(const IndexVec& z, int L) {
  Eigen::MatrixXi n = Eigen::MatrixXi::Zero(L, L);
  for (std::size_t t = 1; t < z.size(); ++t) {
    n(z[t - 1], z[t]) += 1;
  }
  return n;
}

Vector stick_breaking(double gamma, int L, Rng& rng) {
  if (L < 1) throw ParameterError("stick_breaking: truncation must be at least 1");
  if (!(gamma > 0.0)) throw ParameterError("stick_breaking: gamma must be positive");
  Vector beta(L);
  double remaining = 1.0;
  for (int k = 0; k + 1 < L; ++k) {
    const double v = rng.beta(1.0, gamma);
    beta[k] = v * remaining;
    remaining *= (1.0 - v);
  }
  beta[L - 1] = remaining;
  return beta;
}

Vector sample_transition_row(const Vector& beta, const HdpHyper& hyper,
                             const Vector& counts_row, int j, Rng& rng) {
  hyper.validate();
  if (!is_simplex(beta, 1e-8)) throw ParameterError("sample_transition_row: beta off the simplex");
  if (counts_row.size() != beta.size()) {
    throw ParameterError("sample_transition_row: counts/beta size mismatch");
  }
  if (counts_row.minCoeff() < 0.0) {
    throw ParameterError("sample_transition_row: negative counts");
  }
  Vector conc = hyper.alpha * beta + counts_row;
  conc[j] += hyper.kappa;
  // Guard against zero concentrations from beta underflow.
  conc = conc.cwiseMax(1e-10);
  return sample_dirichlet(conc, rng);
}

AuxCounts sample_aux_counts(const Eigen::MatrixXi& n, const Vector& beta,
                            const HdpHyper& hyper, Rng& rng) {
  const int L = static_cast<int>(beta.size());
  if (n.rows() != L || n.cols() != L) throw ParameterError("sample_aux_counts: n must be L x L");
  AuxCounts aux;
  aux.n = n;
  aux.m = Eigen::MatrixXi::Zero(L, L);
  aux.w = Eigen::VectorXi::Zero(L);

  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < L; ++k) {
      const int njk = n(j, k);
      if (njk == 0) continue;
      const double c = hyper.alpha * beta[k] + (j == k ? hyper.kappa : 0.0);
      int tables = 0;
      for (int i = 0; i < njk; ++i) {
        if (rng.bernoulli(c / (c + i))) ++tables;
      }
      aux.m(j, k) = tables;
    }
  }

  const double rho = hyper.rho();
  if (rho > 0.0) {
    for (int j = 0; j < L; ++j) {
      const int mjj = aux.m(j, j);
      if (mjj == 0) continue;
      const double p = rho / (rho + beta[j] * (1.0 - rho));
      int overrides = 0;
      for (int i = 0; i < mjj; ++i) {
        if (rng.bernoulli(p)) ++overrides;
      }
      aux.w[j] = overrides;
    }
  }

  aux.mbar = aux.m;
  aux.mbar.diagonal() -= aux.w;
  return aux;
}

Vector update_beta(const AuxCounts& aux, double gamma, Rng& rng, int initial_mode) {
  const int L = static_cast<int>(aux.mbar.cols());
  Vector conc = Vector::Constant(L, gamma / L);
  for (int k = 0; k < L; ++k) conc[k] += aux.mbar.col(k).sum();
  if (initial_mode >= 0) conc[initial_mode] += 1.0;
  return sample_dirichlet(conc, rng);
}

HdpHyper resample_hyperparameters(const AuxCounts& aux, const Vector& beta,
                                  const HdpHyper& current, const HdpPriors& priors,
                                  Rng& rng) {
  const int L = static_cast<int>(beta.size());
  const int total_m = aux.total_tables();
  const int total_w = aux.total_overrides();

  // alpha + kappa given table counts, via per-row (r_j, s_j) augmentation of
  // Gamma(c)/Gamma(c + n_j).
  double shape = priors.a_conc + total_m;
  double rate = priors.b_conc;
  const double c_cur = current.concentration();
  for (int j = 0; j < L; ++j) {
    const int nj = aux.n.row(j).sum();
    if (nj == 0) continue;
    const double r = rng.beta(c_cur + 1.0, static_cast<double>(nj));
    const bool s = rng.bernoulli(nj / (nj + c_cur));
    if (s) shape -= 1.0;
    rate -= std::log(std::max(r, 1e-300));
  }
  const double conc = rng.gamma(shape, rate);

  double rho = 0.0;
  if (priors.sticky) {
    rho = rng.beta(priors.c_rho + total_w, priors.d_rho + (total_m - total_w));
  }

  // gamma | beta under the finite Dirichlet(gamma/L, ..., gamma/L) truncation.
  const double sum_log_beta = beta.array().max(1e-300).log().sum();
  auto log_post = [&](double u) {
    const double g = std::exp(u);
    return log_gamma_density(g, priors.a_gamma, priors.b_gamma) + std::lgamma(g) -
           L * std::lgamma(g / L) + (g / L - 1.0) * sum_log_beta + u;
  };
  const double u_new =
      slice_sample(log_post, std::log(std::max(current.gamma, 1e-12)), 1.0, -40.0, 40.0, rng);

  HdpHyper out;
  out.alpha = (1.0 - rho) * conc;
  out.kappa = rho * conc;
  out.gamma = std::exp(u_new);
  out.validate();
  return out;
}

HdpHyper sample_hyper_from_prior(const HdpPriors& priors, Rng& rng) {
  HdpHyper hyper;
  const double conc = rng.gamma(priors.a_conc, priors.b_conc);
  const double rho = priors.sticky ? rng.beta(priors.c_rho, priors.d_rho) : 0.0;
  hyper.alpha = (1.0 - rho) * conc;
  hyper.kappa = rho * conc;
  hyper.gamma = rng.gamma(priors.a_gamma, priors.b_gamma);
  hyper.validate();
  return hyper;
}

TransitionSet sample_transitions_from_prior(const HdpHyper& hyper, int L, Rng& rng) {
  TransitionSet trans;
  trans.beta = sample_dirichlet(Vector::Constant(L, hyper.gamma / L), rng);
  trans.pi.resize(L, L);
  const Vector zero_counts = Vector::Zero(L);
  for (int j = 0; j < L; ++j) {
    trans.pi.row(j) = sample_transition_row(trans.beta, hyper, zero_counts, j, rng).transpose();
  }
  return trans;
}

}  // namespace slds
