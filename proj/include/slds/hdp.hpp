#ifndef SLDS_HDP_HPP
#define SLDS_HDP_HPP

#include "slds/random.hpp"
#include "slds/types.hpp"

namespace slds {

// Sticky HDP-HMM concentration state. rho = kappa / (alpha + kappa) is the
// self-transition proportion.
struct HdpHyper {
  double alpha = 1.0;
  double gamma = 1.0;
  double kappa = 0.0;

  double concentration() const { return alpha + kappa; }
  double rho() const { return kappa > 0.0 ? kappa / (alpha + kappa) : 0.0; }
  void validate() const;
};

// Priors on the concentration parameters: Gamma(a,b) on alpha+kappa and on
// gamma, Beta(c,d) on rho. Defaults are the weakly informative choice
// a=1, b=0.01, c=10, d=1. sticky=false pins kappa (and rho) to zero.
struct HdpPriors {
  double a_conc = 1.0;
  double b_conc = 0.01;
  double a_gamma = 1.0;
  double b_gamma = 0.01;
  double c_rho = 10.0;
  double d_rho = 1.0;
  bool sticky = true;
};

// Global weights beta (length L) plus the L x L row-stochastic transition
// matrix; row j is pi_j.
struct TransitionSet {
  Vector beta;
  Matrix pi;

  int truncation() const { return static_cast<int>(beta.size()); }
  void validate() const;
};

// Transition counts plus the auxiliary table/override counts of the sticky
// augmentation: m[j][k] tables, w[j] override tables on the diagonal, and
// mbar = m with the diagonal reduced by w.
struct AuxCounts {
  Eigen::MatrixXi n;
  Eigen::MatrixXi m;
  Eigen::VectorXi w;
  Eigen::MatrixXi mbar;

  int total_tables() const { return m.sum(); }
  int total_overrides() const { return w.sum(); }
};

// Transition counts n[j][k] = #{t >= 2 : z_{t-1} = j, z_t = k}.
Eigen::MatrixXi count_transitions(const IndexVec& z, int L);

// GEM(gamma) weights under an L-term truncation; the last weight absorbs the
// remaining stick so the output sums to one exactly.
Vector stick_breaking(double gamma, int L, Rng& rng);

// Weak-limit row draw: Dirichlet(alpha*beta + kappa*delta_j + counts_row).
Vector sample_transition_row(const Vector& beta, const HdpHyper& hyper,
                             const Vector& counts_row, int j, Rng& rng);

// Chinese-restaurant table counts per cell (concentration alpha*beta_k +
// kappa*delta_jk) and binomial override counts on the diagonal.
AuxCounts sample_aux_counts(const Eigen::MatrixXi& n, const Vector& beta,
                            const HdpHyper& hyper, Rng& rng);

// beta ~ Dirichlet(gamma/L + mbar column sums); when initial_mode >= 0 the
// first mode assignment (a direct draw from beta) adds one count.
Vector update_beta(const AuxCounts& aux, double gamma, Rng& rng, int initial_mode = -1);

// Resample (alpha+kappa, rho, gamma). alpha+kappa and rho use the exact
// auxiliary-variable conjugate updates; gamma is slice-sampled from its
// conditional given beta under the finite Dirichlet truncation.
HdpHyper resample_hyperparameters(const AuxCounts& aux, const Vector& beta,
                                  const HdpHyper& current, const HdpPriors& priors,
                                  Rng& rng);

// Draw all hyperparameters from their priors.
HdpHyper sample_hyper_from_prior(const HdpPriors& priors, Rng& rng);

// Full prior draw of (beta, pi) given hyperparameters.
TransitionSet sample_transitions_from_prior(const HdpHyper& hyper, int L, Rng& rng);

}  // namespace slds

#endif  // SLDS_HDP_HPP
