#ifndef SLDS_DYNAMICS_HPP
#define SLDS_DYNAMICS_HPP

#include <optional>
#include <vector>

#include "slds/distributions.hpp"
#include "slds/random.hpp"
#include "slds/types.hpp"

namespace slds {

// Aligned regression pairs psi_t = A^(z_t) psibar_{t-1} + e_t. For an AR(r)
// model psi is the observation and psibar the stacked lags [y_{t-1};...;y_{t-r}];
// for an SLDS psi = x_t and psibar = x_{t-1}.
struct PseudoObsRegression {
  Matrix psi;         // ell x N
  Matrix psibar;      // p x N
  IndexVec assignments;  // length N

  Eigen::Index out_dim() const { return psi.rows(); }
  Eigen::Index in_dim() const { return psibar.rows(); }
  Eigen::Index size() const { return psi.cols(); }
  void validate() const;
};

PseudoObsRegression ar_regression(const Matrix& y, const Matrix& context, int r,
                                  const IndexVec& z);
// SLDS pairs use t = 2..T; the first state carries no dynamics pair.
PseudoObsRegression slds_regression(const Matrix& x, const IndexVec& z);

struct ModeDynamics {
  Matrix A;      // ell x p
  Matrix Sigma;  // ell x ell, symmetric PD
  Vector mu;     // optional process-noise mean (empty when absent)

  bool has_mu() const { return mu.size() > 0; }
};

// Matrix-normal inverse-Wishart prior on (A, Sigma): A | Sigma ~ MN(M, Sigma, K)
// with K a right precision, Sigma ~ IW(n0, S0).
struct MniwHyper {
  Matrix M;
  Matrix K;
  double n0 = 0.0;
  Matrix S0;
  void validate() const;
};

struct MniwStats {
  Matrix S_bb;  // psibar-psibar moment plus K
  Matrix S_pb;  // psi-psibar moment plus M K
  Matrix S_pp;  // psi-psi moment plus M K M^T
  int count = 0;
};

// Per-mode sums reused by every prior family within a sweep.
struct ModeSums {
  Matrix S_bb;
  Matrix S_pb;
  Matrix S_pp;
  Vector sum_psi;
  Vector sum_psibar;
  int count = 0;
};

std::vector<ModeSums> accumulate_mode_sums(const PseudoObsRegression& reg, int L);

MniwStats mniw_sufficient_stats(const PseudoObsRegression& reg, int k, const MniwHyper& hyper);
MniwStats mniw_stats_from_sums(const ModeSums& sums, const MniwHyper& hyper);

struct MniwPosterior {
  Matrix A_mean;            // S_pb S_bb^{-1}
  InverseWishartParams iw;  // IW(n_k + n0, S_cond + S0)
  Matrix S_bb;              // right precision of A | Sigma
};

MniwPosterior mniw_posterior(const MniwStats& stats, const MniwHyper& hyper);
ModeDynamics sample_mniw_posterior(const MniwStats& stats, const MniwHyper& hyper, Rng& rng);

// Square-root form of the same posterior: QR on the stacked (prior, data)
// rows instead of the moment-matrix Schur complement. Coincides with
// mniw_posterior on benign data and stays positive semidefinite when the
// pseudo-observations span many orders of magnitude.
MniwPosterior mniw_posterior_sqrt(const PseudoObsRegression& reg, int k,
                                  const std::optional<Vector>& mode_mean,
                                  const MniwHyper& hyper);
ModeDynamics sample_mniw_posterior_sqrt(const PseudoObsRegression& reg, int k,
                                        const std::optional<Vector>& mode_mean,
                                        const MniwHyper& hyper, Rng& rng);

// ARD group structure over the entries of A (ell x p): consecutive column
// blocks share one precision. SLDS: one column per group; VAR(r): d columns
// per lag block.
struct ArdSpec {
  int groups = 0;
  int cols_per_group = 1;
  int rows = 0;

  int group_of_column(int j) const { return j / cols_per_group; }
  int group_size() const { return rows * cols_per_group; }
  int cols() const { return groups * cols_per_group; }
};

struct ArdState {
  ArdSpec spec;
  Vector alphas;     // one precision per group, > 0
  double a = 1.0;    // Gamma shape
  double b = 1e-3;   // Gamma rate

  void validate() const;
};

ArdSpec ard_spec_for_slds(int n);
ArdSpec ard_spec_for_var(int d, int r);
// Hyperparameters a = |S_l|, b = a / 1000 fixing the prior mean at 1000.
ArdState ard_state_from_spec(const ArdSpec& spec, Rng& rng);

// Prior precision matrix diag(alpha_1...alpha_1, ..., alpha_m...alpha_m) on
// the column-stacked vec(A).
Vector ard_prior_precision_diagonal(const ArdState& ard);

// Conditional N^{-1} posterior over vec(A) given Sigma and a Gaussian prior
// in information form (theta0, lambda0); mode_mean is subtracted from psi.
InformationGaussian vec_a_conditional(const ModeSums& sums, const Matrix& sigma,
                                      const std::optional<Vector>& mode_mean,
                                      const Vector& theta0, const Matrix& lambda0);

Matrix sample_ard_dynamic_matrix(const ModeSums& sums, const Matrix& sigma,
                                 const ArdState& ard, const std::optional<Vector>& mode_mean,
                                 Rng& rng);

Vector sample_ard_precisions(const Matrix& a_matrix, const ArdState& ard, Rng& rng);

InverseWishartParams sigma_posterior_given_A(const PseudoObsRegression& reg, int k,
                                             const Matrix& a_matrix,
                                             const std::optional<Vector>& mode_mean,
                                             const InverseWishartParams& prior);
Matrix sample_sigma_given_A(const PseudoObsRegression& reg, int k, const Matrix& a_matrix,
                            const std::optional<Vector>& mode_mean,
                            const InverseWishartParams& prior, Rng& rng);

// Independent prior pack for the N-IW-N family.
struct NiwnHyper {
  Vector m_A;      // prior mean of vec(A)
  Matrix Sigma_A;  // prior covariance of vec(A)
  double n0 = 0.0;
  Matrix S0;
  Vector mu0;      // process-mean prior
  Matrix Sigma0;
  void validate() const;
};

// Per-mode A draw under an independent normal prior on vec(A).
Matrix sample_A_niwn(const ModeSums& sums, const Matrix& sigma,
                     const std::optional<Vector>& mode_mean, const NiwnHyper& hyper, Rng& rng);

// Shared dynamic matrix: one vec(A) posterior pooling every mode's pairs with
// mode-specific (Sigma, mu); contributions accumulate in information form.
InformationGaussian shared_A_conditional(const std::vector<ModeSums>& sums,
                                         const std::vector<ModeDynamics>& dyn,
                                         const NiwnHyper& hyper);
Matrix sample_shared_A_niwn(const std::vector<ModeSums>& sums,
                            const std::vector<ModeDynamics>& dyn, const NiwnHyper& hyper,
                            Rng& rng);

Vector sample_process_mean(const ModeSums& sums, const Matrix& a_matrix, const Matrix& sigma,
                           const Vector& mu0, const Matrix& sigma0, Rng& rng);

// Shared measurement noise R ~ IW(T + r0, sum_t (y-Cx)(y-Cx)^T + R0).
Matrix sample_measurement_noise(const Matrix& y, const Matrix& x, const Matrix& c,
                                const InverseWishartParams& prior, Rng& rng);

// Truncated DP mixture measurement noise for the stochastic-volatility
// variant: weights from a truncated stick posterior, per-component IW draws,
// and per-step component labels.
struct MeasurementMixture {
  Vector omega;
  std::vector<Matrix> R;
  IndexVec labels;  // per time step
  double sigma_r = 1.0;
  InverseWishartParams component_prior;

  int components() const { return static_cast<int>(omega.size()); }
  bool active() const { return components() > 0; }
};

MeasurementMixture init_measurement_mixture(int truncation, double sigma_r,
                                            const InverseWishartParams& component_prior,
                                            Eigen::Index T, Rng& rng);
void update_mixture_measurement_noise(const Matrix& residuals, MeasurementMixture& mix,
                                      Rng& rng);

// Data-driven hyperparameter recipes.
Matrix empirical_covariance(const Matrix& y);
Matrix first_differences(const Matrix& y);

MniwHyper mniw_hyper_from_scale(const Matrix& sigma_bar, int out_dim, int in_dim,
                                double s0_fraction, double n0_override = -1.0);
MniwHyper mniw_hyper_from_data(const Matrix& y, int out_dim, int in_dim, double s0_fraction,
                               double n0_override = -1.0);
// SLDS state dimension n >= d embeds the observed covariance block; the extra
// coordinates get the mean observed variance.
Matrix embed_scale_matrix(const Matrix& sigma_bar, int n);
InverseWishartParams measurement_prior_from_data(const Matrix& y, double r0_fraction = 0.075);

// Realization sparsity check: a column that is zero in any mode's dynamic
// matrix must correspond to a zero column of C.
std::vector<int> required_zero_observation_columns(
    const std::vector<std::vector<int>>& zero_cols_per_mode);
bool satisfies_sparsity_criterion(const std::vector<std::vector<int>>& zero_cols_per_mode,
                                  const std::vector<int>& zero_cols_of_c);

}  // namespace slds

#endif  // SLDS_DYNAMICS_HPP
