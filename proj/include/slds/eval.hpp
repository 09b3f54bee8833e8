#ifndef SLDS_EVAL_HPP
#define SLDS_EVAL_HPP

#include <map>
#include <string>
#include <vector>

#include "slds/gibbs.hpp"
#include "slds/types.hpp"

namespace slds {

// Minimum-cost assignment on a square cost matrix (Hungarian with potentials).
// Returns the column matched to each row.
std::vector<int> hungarian_min_assignment(const Matrix& cost);

// Injective map from estimated labels to true labels maximizing overlap;
// unmatched estimated labels are absent from the map. Ties resolve to the
// lexicographically smallest mapping.
struct LabelMapping {
  std::map<int, int> mapping;
  int overlap = 0;
};
LabelMapping optimal_label_mapping(const IndexVec& z_est, const IndexVec& z_true);

// 1 - max overlap / T over injective relabelings of the estimate.
double hamming_with_optimal_mapping(const IndexVec& z_est, const IndexVec& z_true);

// Forward-sum HMM log likelihood from a per-step log-likelihood table.
double hmm_forward_loglik(const Matrix& loglik, const Vector& beta, const Matrix& pi);

// Maximum a posteriori mode sequence (Viterbi) for fixed parameters; a
// post-hoc summary, never part of inference. The change-point evaluation can
// use either this or posterior transition frequencies.
IndexVec viterbi_map_sequence(const Matrix& loglik, const Vector& beta, const Matrix& pi);

// Exact switching-VAR held-out log likelihood via the forward sum.
double ar_heldout_loglik(const Matrix& y, const Matrix& context, int r,
                         const TransitionSet& trans, const std::vector<ModeDynamics>& dyn);

// Moment-form Kalman log likelihood of an SLDS with a given mode sequence.
double slds_kalman_loglik(const Matrix& y, const IndexVec& z,
                          const std::vector<ModeDynamics>& dyn, const Matrix& c,
                          const Matrix& r, const Matrix& p0);

// Shortest interval containing `coverage` of the values; ties take the lowest
// start. Returns {lo, hi}.
std::pair<double, double> shortest_interval(std::vector<double> values, double coverage = 0.95);

struct HeldoutResult {
  std::vector<double> values;  // one per posterior sample
  double lo = 0.0;
  double hi = 0.0;
  std::string method;
};

// Held-out predictive log likelihood per stored posterior sample. AR families
// use the exact forward sum; SLDS samples a mode sequence from the transition
// draw and marginalizes the states analytically.
HeldoutResult heldout_log_likelihood(const std::vector<TraceRecord>& samples,
                                     const ModelConfig& config, const Matrix& y_heldout,
                                     const Matrix& context, std::uint64_t seed,
                                     double coverage = 0.95);

// Posterior change-point probability per step: frequency of z_t != z_{t-1}
// over trace samples; index t-1 holds the transition into step t (t >= 2).
Vector changepoint_probability(const std::vector<IndexVec>& z_samples);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Windowed change-point ROC: consecutive windows scored by the maximum
// change-point probability; a window is positive when it contains an event.
RocCurve changepoint_roc(const std::vector<IndexVec>& z_samples,
                         const std::vector<int>& true_event_times, int window);

// Change points implied by a label sequence (1-based times t where z_t
// differs from z_{t-1}).
std::vector<int> change_points(const IndexVec& z);

// Histogram of active mode counts (occupancy above 1%) over a trace.
std::map<int, int> mode_count_summary(const std::vector<TraceRecord>& trace);

}  // namespace slds

#endif  // SLDS_EVAL_HPP
