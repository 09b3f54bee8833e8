#ifndef SLDS_MODEL_HPP
#define SLDS_MODEL_HPP

#include <optional>
#include <utility>

#include "slds/distributions.hpp"
#include "slds/dynamics.hpp"
#include "slds/hdp.hpp"
#include "slds/types.hpp"

namespace slds {

enum class ModelFamily { Ar, Slds, SldsSharedA, SldsFixedA };
enum class PriorFamily { Mniw, Ard, Niwn };

struct Schedule {
  int n_iters = 1000;
  int burn_in = -1;  // negative: half of n_iters
  int thinning = 1;
  int sequential_period = 10;  // 0 disables the marginalized sweep
  int inner_iters = 5;         // ARD and N-IW-N inner refreshes
  bool store_params = false;

  int effective_burn_in() const { return burn_in >= 0 ? burn_in : n_iters / 2; }
  bool sequential_due(int iter) const {
    return sequential_period > 0 && iter % sequential_period == 0;
  }
};

struct Dataset {
  Matrix y;        // d x T, columns are time steps
  Matrix context;  // d x r observations preceding t = 1 (AR families)

  Eigen::Index dim() const { return y.rows(); }
  Eigen::Index length() const { return y.cols(); }
};

struct ModelConfig {
  ModelFamily family = ModelFamily::Ar;
  PriorFamily prior = PriorFamily::Mniw;
  int obs_dim = 1;   // d
  int ar_order = 1;  // r, AR families only
  int state_dim = 1; // n, SLDS families only
  int L = 20;        // weak-limit truncation

  HdpPriors hdp_priors;
  std::optional<HdpHyper> fixed_hyper;  // pin concentrations (tests, presets)

  std::optional<MniwHyper> mniw;
  std::optional<NiwnHyper> niwn;
  std::optional<InverseWishartParams> sigma_prior;  // IW on Sigma for the ARD path
  double ard_prior_mean = 1000.0;

  bool process_mean = false;
  std::optional<std::pair<Vector, Matrix>> mu_prior;  // overrides niwn's (mu0, Sigma0)

  std::optional<Matrix> fixed_A;

  std::optional<InverseWishartParams> r_prior;
  double p0_scale = -1.0;  // initial-state variance; negative resolves from S0
  bool mixture_noise = false;
  int mixture_truncation = 10;
  double mixture_sigma_r = 1.0;
  std::optional<InverseWishartParams> mixture_component_prior;

  Schedule schedule;
  IndexVec supervision;  // per-step fixed labels (-1 free); empty disables

  bool is_slds() const {
    return family == ModelFamily::Slds || family == ModelFamily::SldsSharedA ||
           family == ModelFamily::SldsFixedA;
  }
  bool shares_A() const { return family == ModelFamily::SldsSharedA; }
  bool has_fixed_A() const { return fixed_A.has_value(); }
  int out_dim() const { return is_slds() ? state_dim : obs_dim; }
  int in_dim() const { return is_slds() ? state_dim : obs_dim * ar_order; }

  Matrix measurement_matrix() const;  // C = [I_d 0]
  Matrix initial_state_covariance() const;
  std::pair<Vector, Matrix> process_mean_prior() const;
  InverseWishartParams sigma_iw_prior() const;

  void validate(Eigen::Index data_dim, Eigen::Index data_length) const;
};

// Fills any unset data-dependent hyperparameters with the standard recipes
// (MNIW: M=0, K=I, n0=m+2, S0 from fractions of the empirical covariance;
// measurement prior r0=d+2, R0=0.075*Sigma_bar; N-IW-N from the same scales).
void set_hyperparameters_from_data(ModelConfig& config, const Matrix& y,
                                   double s0_fraction = -1.0, double r0_fraction = 0.075,
                                   double n0_override = -1.0);

}  // namespace slds

#endif  // SLDS_MODEL_HPP
