#ifndef SLDS_MODE_SAMPLER_HPP
#define SLDS_MODE_SAMPLER_HPP

#include <vector>

#include "slds/dynamics.hpp"
#include "slds/hdp.hpp"
#include "slds/random.hpp"
#include "slds/state_sampler.hpp"
#include "slds/types.hpp"

namespace slds {

// Backward messages in the log domain; log_m(t, k) = log m_{t+1,t}(k) after
// per-step max subtraction. log_m.row(T-1) is zero.
struct ModeMessages {
  Matrix log_m;
};

// Per-step Gaussian log likelihoods of the pseudo-observations under each
// mode, precomputed once per sweep. The SLDS table has a constant first row
// since x_1 carries a mode-independent prior. Throws NumericalError naming
// (t, k) on a non-finite entry.
Matrix regression_loglik_table(const PseudoObsRegression& reg,
                               const std::vector<ModeDynamics>& dyn);
Matrix slds_loglik_table(const Matrix& x, const std::vector<ModeDynamics>& dyn);

// Applies supervision: rows with a fixed label get -inf elsewhere.
void apply_supervision_mask(Matrix& loglik, const IndexVec& fixed_labels);

ModeMessages hmm_backward_messages(const Matrix& loglik, const Matrix& pi);

struct BlockSampleResult {
  IndexVec z;
  Eigen::MatrixXi counts;
};

// Forward sampling given precomputed backward messages; per-step categorical
// distributions are invariant to positive rescaling of any message row.
BlockSampleResult forward_sample_given_messages(const Matrix& loglik,
                                                const ModeMessages& messages,
                                                const TransitionSet& trans, Rng& rng);

// Joint draw of z_{1:T} by backward message passing and forward sampling.
// z_1's predecessor is the initial distribution beta.
BlockSampleResult block_sample_modes(const Matrix& loglik, const TransitionSet& trans,
                                     Rng& rng);
BlockSampleResult block_sample_modes(const PseudoObsRegression& reg, const TransitionSet& trans,
                                     const std::vector<ModeDynamics>& dyn, Rng& rng);

// Candidate log weights log f_k(y_{1:T}) for resampling z_t with the state
// sequence marginalized, given the forward message into t and the backward
// updated message at t. t = 0 uses the mode-independent x_1 prior.
Vector sequential_candidate_log_f(const InformationGaussian& forward_prev_updated,
                                  const InformationGaussian& backward_updated_t,
                                  const std::vector<ModeDynamics>& dyn, bool first_step,
                                  const Matrix& p0);

// Full T x L table of log f_k for a fixed mode sequence (forward filters run
// under z itself); used to validate the marginalized weights.
Matrix sequential_log_f_table(const Matrix& y, const IndexVec& z,
                              const std::vector<ModeDynamics>& dyn,
                              const MeasurementModel& meas, const Matrix& p0);

// One sequential marginalized sweep over z; backward messages come from the
// incoming sequence, forward messages are rebuilt from the freshly sampled
// prefix. Supervised entries (fixed >= 0) are kept as given.
IndexVec sequential_sample_modes_marginalized(const Matrix& y, const IndexVec& z,
                                              const TransitionSet& trans,
                                              const std::vector<ModeDynamics>& dyn,
                                              const MeasurementModel& meas, const Matrix& p0,
                                              Rng& rng,
                                              const IndexVec* fixed_labels = nullptr);

}  // namespace slds

#endif  // SLDS_MODE_SAMPLER_HPP
