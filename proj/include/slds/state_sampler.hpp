#ifndef SLDS_STATE_SAMPLER_HPP
#define SLDS_STATE_SAMPLER_HPP

#include <vector>

#include "slds/distributions.hpp"
#include "slds/dynamics.hpp"
#include "slds/random.hpp"
#include "slds/types.hpp"

namespace slds {

// Shared measurement matrix with either a single noise covariance or per-step
// mixture components selected by labels.
struct MeasurementModel {
  Matrix C;
  std::vector<Matrix> R_components;  // size 1 unless a mixture is active
  IndexVec labels;                   // empty means component 0 everywhere

  static MeasurementModel shared(const Matrix& c, const Matrix& r) {
    return MeasurementModel{c, {r}, {}};
  }
  static MeasurementModel mixture(const Matrix& c, const MeasurementMixture& mix) {
    return MeasurementModel{c, mix.R, mix.labels};
  }

  int component_at(Eigen::Index t) const {
    return labels.empty() ? 0 : labels[static_cast<std::size_t>(t)];
  }
  const Matrix& R_at(Eigen::Index t) const { return R_components[component_at(t)]; }
};

// Per-component C^T R^{-1} C and C^T R^{-1}, computed once per sweep.
struct MeasurementCache {
  std::vector<Matrix> ct_rinv_c;
  std::vector<Matrix> ct_rinv;

  explicit MeasurementCache(const MeasurementModel& meas);
  const Matrix& info(const MeasurementModel& meas, Eigen::Index t) const {
    return ct_rinv_c[meas.component_at(t)];
  }
  Vector info_mean(const MeasurementModel& meas, Eigen::Index t, const Vector& y_t) const {
    return ct_rinv[meas.component_at(t)] * y_t;
  }
};

enum class FilterForm { Direct, Stable, Auto };

// Backward messages for x_t: predicted[t] is m_{t+1,t} (zero at t = T-1) and
// updated[t] folds in the measurement at t.
struct BackwardFilterBank {
  std::vector<InformationGaussian> predicted;
  std::vector<InformationGaussian> updated;
};

struct ForwardFilterBank {
  std::vector<InformationGaussian> predicted;  // predicted[0] is the x_1 prior
  std::vector<InformationGaussian> updated;
  IndexVec direct_fallback_modes;  // modes where the stable form was refused
};

BackwardFilterBank backward_info_filter(const Matrix& y, const IndexVec& z,
                                        const std::vector<ModeDynamics>& dyn,
                                        const MeasurementModel& meas,
                                        FilterForm form = FilterForm::Stable);

ForwardFilterBank forward_info_filter(const Matrix& y, const IndexVec& z,
                                      const std::vector<ModeDynamics>& dyn,
                                      const MeasurementModel& meas, const Matrix& p0,
                                      FilterForm form = FilterForm::Auto);

// Exact joint draw of x_{1:T} given (y, z, parameters); x_1 carries the
// N(0, P0) prior.
Matrix forward_sample_states(const BackwardFilterBank& bank, const IndexVec& z,
                             const std::vector<ModeDynamics>& dyn, const Matrix& p0,
                             Rng& rng);

}  // namespace slds

#endif  // SLDS_STATE_SAMPLER_HPP
