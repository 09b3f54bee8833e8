#ifndef SLDS_GEWEKE_HPP
#define SLDS_GEWEKE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "slds/gibbs.hpp"

namespace slds {

struct GewekeOptions {
  int n_samples = 100000;
  Eigen::Index T = 20;
  std::uint64_t seed = 20110901;
  bool disable_beta_update = false;  // deliberate kernel mutation for validation
};

struct GewekeResult {
  std::vector<std::string> names;
  Vector forward_mean;
  Vector gibbs_mean;
  Vector z_scores;
  Vector gibbs_ess;

  double max_abs_z() const { return z_scores.cwiseAbs().maxCoeff(); }
};

// Effective sample size by Geyer's initial positive sequence estimator.
double effective_sample_size(const std::vector<double>& series);

// Joint-distribution test: independent forward prior-predictive draws versus a
// successive-conditional chain (sweep, then resimulate data). Statistics:
// mode-occupancy entropy, lag-1 autocovariance of y, alpha+kappa, tr(Sigma_1).
GewekeResult geweke_joint_test(const ModelConfig& config, const GewekeOptions& options);

}  // namespace slds

#endif  // SLDS_GEWEKE_HPP
