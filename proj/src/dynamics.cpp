#include "slds/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "slds/hdp.hpp"
#include "slds/linalg.hpp"

namespace slds {

namespace {

// Kronecker product of a p x p matrix with an ell x ell matrix, laid out for
// column-stacked vec(A) with A of shape ell x p.
Matrix kron(const Matrix& left, const Matrix& right) {
  const Eigen::Index p = left.rows();
  const Eigen::Index l = right.rows();
  Matrix out(p * l, p * l);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      out.block(i * l, j * l, l, l) = left(i, j) * right;
    }
  }
  return out;
}

Matrix reshape_to_matrix(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace

void PseudoObsRegression::validate() const {
  if (psi.cols() != psibar.cols() ||
      static_cast<Eigen::Index>(assignments.size()) != psi.cols()) {
    throw ParameterError("PseudoObsRegression: psi, psibar, and assignments misaligned");
  }
}

PseudoObsRegression ar_regression(const Matrix& y, const Matrix& context, int r,
                                  const IndexVec& z) {
  const Eigen::Index d = y.rows();
  const Eigen::Index T = y.cols();
  if (r > 0 && (context.rows() != d || context.cols() < r)) {
    throw ParameterError("ar_regression: context must supply r observations before t=1");
  }
  if (static_cast<Eigen::Index>(z.size()) != T) {
    throw ParameterError("ar_regression: z length must match T");
  }
  PseudoObsRegression reg;
  reg.psi = y;
  reg.psibar.resize(d * r, T);
  reg.assignments = z;
  // obs(j) is y_j for j >= 1 and the context for j <= 0.
  auto obs = [&](Eigen::Index j) -> Vector {
    if (j >= 1) return y.col(j - 1);
    return context.col(-j);
  };
  for (Eigen::Index t = 1; t <= T; ++t) {
    for (int i = 1; i <= r; ++i) {
      reg.psibar.col(t - 1).segment((i - 1) * d, d) = obs(t - i);
    }
  }
  return reg;
}

PseudoObsRegression slds_regression(const Matrix& x, const IndexVec& z) {
  const Eigen::Index T = x.cols();
  if (static_cast<Eigen::Index>(z.size()) != T) {
    throw ParameterError("slds_regression: z length must match T");
  }
  if (T < 2) throw ParameterError("slds_regression: need at least two states");
  PseudoObsRegression reg;
  reg.psi = x.rightCols(T - 1);
  reg.psibar = x.leftCols(T - 1);
  reg.assignments.assign(z.begin() + 1, z.end());
  return reg;
}

void MniwHyper::validate() const {
  if (M.rows() != S0.rows() || M.cols() != K.rows() || K.rows() != K.cols() ||
      S0.rows() != S0.cols()) {
    throw ParameterError("MniwHyper: inconsistent dimensions");
  }
  if (!(n0 > static_cast<double>(S0.rows()) - 1.0)) {
    throw ParameterError("MniwHyper: n0 must exceed dim - 1");
  }
  if (!is_positive_definite(K) || !is_positive_definite(S0)) {
    throw ParameterError("MniwHyper: K and S0 must be positive definite");
  }
}

std::vector<ModeSums> accumulate_mode_sums(const PseudoObsRegression& reg, int L) {
  reg.validate();
  const Eigen::Index l = reg.out_dim();
  const Eigen::Index p = reg.in_dim();
  std::vector<ModeSums> sums(L);
  for (auto& s : sums) {
    s.S_bb = Matrix::Zero(p, p);
    s.S_pb = Matrix::Zero(l, p);
    s.S_pp = Matrix::Zero(l, l);
    s.sum_psi = Vector::Zero(l);
    s.sum_psibar = Vector::Zero(p);
  }
  for (Eigen::Index t = 0; t < reg.size(); ++t) {
    const int k = reg.assignments[t];
    if (k < 0 || k >= L) throw ParameterError("accumulate_mode_sums: assignment out of range");
    ModeSums& s = sums[k];
    const auto pb = reg.psibar.col(t);
    const auto ps = reg.psi.col(t);
    s.S_bb.noalias() += pb * pb.transpose();
    s.S_pb.noalias() += ps * pb.transpose();
    s.S_pp.noalias() += ps * ps.transpose();
    s.sum_psi += ps;
    s.sum_psibar += pb;
    s.count += 1;
  }
  return sums;
}

MniwStats mniw_stats_from_sums(const ModeSums& sums, const MniwHyper& hyper) {
  MniwStats stats;
  stats.S_bb = sums.S_bb + hyper.K;
  stats.S_pb = sums.S_pb + hyper.M * hyper.K;
  stats.S_pp = sums.S_pp + hyper.M * hyper.K * hyper.M.transpose();
  stats.count = sums.count;
  return stats;
}

MniwStats mniw_sufficient_stats(const PseudoObsRegression& reg, int k, const MniwHyper& hyper) {
  hyper.validate();
  if (reg.out_dim() != hyper.M.rows() || reg.in_dim() != hyper.M.cols()) {
    throw ParameterError("mniw_sufficient_stats: regression/prior dimension mismatch");
  }
  int L = k + 1;
  for (int a : reg.assignments) L = std::max(L, a + 1);
  auto sums = accumulate_mode_sums(reg, L);
  return mniw_stats_from_sums(sums[k], hyper);
}

MniwPosterior mniw_posterior(const MniwStats& stats, const MniwHyper& hyper) {
  auto llt_bb = llt_jittered(stats.S_bb, "mniw_posterior: S_bb");
  MniwPosterior post;
  post.A_mean = llt_bb.solve(stats.S_pb.transpose()).transpose();
  Matrix w = llt_bb.matrixL().solve(stats.S_pb.transpose());
  Matrix s_cond = symmetrized(stats.S_pp - w.transpose() * w);
  post.iw.dof = hyper.n0 + stats.count;
  post.iw.scale = symmetrized(s_cond + hyper.S0);
  post.S_bb = stats.S_bb;
  return post;
}

ModeDynamics sample_mniw_posterior(const MniwStats& stats, const MniwHyper& hyper, Rng& rng) {
  MniwPosterior post = mniw_posterior(stats, hyper);
  ModeDynamics dyn;
  // The IW scale can pick up tiny asymmetric or negative drift from the Schur
  // complement; the jitter policy inside the sampler's Cholesky covers it.
  InverseWishartParams iw = post.iw;
  iw.scale = symmetrized(iw.scale);
  Eigen::LLT<Matrix> scale_llt = llt_jittered(iw.scale, "sample_mniw_posterior: scale");
  iw.scale = scale_llt.reconstructedMatrix();
  dyn.Sigma = sample_inverse_wishart(iw, rng);

  auto llt_sigma = llt_jittered(dyn.Sigma, "sample_mniw_posterior: Sigma");
  auto llt_bb = llt_jittered(post.S_bb, "sample_mniw_posterior: S_bb");
  Matrix z = rng.normal_matrix(post.A_mean.rows(), post.A_mean.cols());
  // A = mean + L_Sigma Z L_bb^{-T}: right covariance S_bb^{-1}.
  Matrix yt = llt_bb.matrixL().solve(z.transpose());
  dyn.A = post.A_mean + Matrix(llt_sigma.matrixL()) * yt.transpose();
  return dyn;
}

MniwPosterior mniw_posterior_sqrt(const PseudoObsRegression& reg, int k,
                                  const std::optional<Vector>& mode_mean,
                                  const MniwHyper& hyper) {
  hyper.validate();
  reg.validate();
  const Eigen::Index l = reg.out_dim();
  const Eigen::Index p = reg.in_dim();
  int count = 0;
  for (int a : reg.assignments) {
    if (a == k) ++count;
  }
  // Rows of [psibar^T, psi^T]: prior square-root rows first, then the data;
  // zero rows pad the count so the R factor is a full square triangle.
  const Matrix l_k = llt_jittered(hyper.K, "mniw_posterior_sqrt: K").matrixL();
  const Eigen::Index n_rows = std::max<Eigen::Index>(p + count, p + l);
  Matrix stacked = Matrix::Zero(n_rows, p + l);
  stacked.topLeftCorner(p, p) = l_k.transpose();
  stacked.topRightCorner(p, l) = l_k.transpose() * hyper.M.transpose();
  Eigen::Index row = p;
  for (Eigen::Index t = 0; t < reg.size(); ++t) {
    if (reg.assignments[t] != k) continue;
    stacked.row(row).head(p) = reg.psibar.col(t).transpose();
    Vector psi = reg.psi.col(t);
    if (mode_mean) psi -= *mode_mean;
    stacked.row(row).tail(l) = psi.transpose();
    ++row;
  }
  const Matrix r_full =
      Eigen::HouseholderQR<Matrix>(stacked).matrixQR().topRows(p + l).triangularView<Eigen::Upper>();
  const Matrix r11 = r_full.topLeftCorner(p, p);
  const Matrix r12 = r_full.topRightCorner(p, l);
  const Matrix r22 = r_full.bottomRightCorner(l, l);

  MniwPosterior post;
  // S_pb S_bb^{-1} = R12^T R11^{-T} = (R11^{-1} R12)^T.
  post.A_mean = r11.triangularView<Eigen::Upper>().solve(r12).transpose();
  post.iw.dof = hyper.n0 + count;
  post.iw.scale = symmetrized(r22.transpose() * r22 + hyper.S0);
  post.S_bb = r11.transpose() * r11;
  return post;
}

namespace {

ModeDynamics sample_from_mniw_posterior(const MniwPosterior& post, Rng& rng) {
  ModeDynamics dyn;
  dyn.Sigma = sample_inverse_wishart(post.iw, rng);
  auto llt_sigma = llt_jittered(dyn.Sigma, "sample_mniw_posterior: Sigma");
  auto llt_bb = llt_jittered(post.S_bb, "sample_mniw_posterior: S_bb");
  Matrix z = rng.normal_matrix(post.A_mean.rows(), post.A_mean.cols());
  // A = mean + L_Sigma Z L_bb^{-T}: right covariance S_bb^{-1}.
  Matrix yt = llt_bb.matrixL().solve(z.transpose());
  dyn.A = post.A_mean + Matrix(llt_sigma.matrixL()) * yt.transpose();
  return dyn;
}

}  // namespace

ModeDynamics sample_mniw_posterior_sqrt(const PseudoObsRegression& reg, int k,
                                        const std::optional<Vector>& mode_mean,
                                        const MniwHyper& hyper, Rng& rng) {
  return sample_from_mniw_posterior(mniw_posterior_sqrt(reg, k, mode_mean, hyper), rng);
}

void ArdState::validate() const {
  if (alphas.size() != spec.groups) throw ParameterError("ArdState: alphas/spec mismatch");
  if (alphas.minCoeff() <= 0.0) throw ParameterError("ArdState: precisions must be positive");
  if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("ArdState: gamma hyperparameters positive");
}

ArdSpec ard_spec_for_slds(int n) { return ArdSpec{n, 1, n}; }
ArdSpec ard_spec_for_var(int d, int r) { return ArdSpec{r, d, d}; }

ArdState ard_state_from_spec(const ArdSpec& spec, Rng& rng) {
  ArdState ard;
  ard.spec = spec;
  ard.a = static_cast<double>(spec.group_size());
  ard.b = ard.a / 1000.0;
  ard.alphas.resize(spec.groups);
  for (int g = 0; g < spec.groups; ++g) ard.alphas[g] = rng.gamma(ard.a, ard.b);
  return ard;
}

Vector ard_prior_precision_diagonal(const ArdState& ard) {
  const int l = ard.spec.rows;
  const int p = ard.spec.cols();
  Vector diag(l * p);
  for (int j = 0; j < p; ++j) {
    diag.segment(j * l, l).setConstant(ard.alphas[ard.spec.group_of_column(j)]);
  }
  return diag;
}

InformationGaussian vec_a_conditional(const ModeSums& sums, const Matrix& sigma,
                                      const std::optional<Vector>& mode_mean,
                                      const Vector& theta0, const Matrix& lambda0) {
  const Eigen::Index l = sigma.rows();
  const Eigen::Index p = sums.S_bb.rows();
  const Matrix sigma_inv = spd_inverse(sigma, "vec_a_conditional: Sigma");
  Matrix lambda = lambda0 + kron(sums.S_bb, sigma_inv);
  Matrix cross = sums.S_pb;
  if (mode_mean) cross -= (*mode_mean) * sums.sum_psibar.transpose();
  Matrix rhs = sigma_inv * cross;  // ell x p
  Vector theta = theta0 + Eigen::Map<const Vector>(rhs.data(), l * p);
  return InformationGaussian(std::move(theta), std::move(lambda));
}

Matrix sample_ard_dynamic_matrix(const ModeSums& sums, const Matrix& sigma,
                                 const ArdState& ard, const std::optional<Vector>& mode_mean,
                                 Rng& rng) {
  ard.validate();
  const int l = ard.spec.rows;
  const int p = ard.spec.cols();
  const Vector prior_diag = ard_prior_precision_diagonal(ard);
  InformationGaussian post = vec_a_conditional(
      sums, sigma, mode_mean, Vector::Zero(l * p), Matrix(prior_diag.asDiagonal()));
  Vector v = sample_information_gaussian(post, rng);
  return reshape_to_matrix(v, l, p);
}

Vector sample_ard_precisions(const Matrix& a_matrix, const ArdState& ard, Rng& rng) {
  ard.validate();
  if (a_matrix.rows() != ard.spec.rows || a_matrix.cols() != ard.spec.cols()) {
    throw ParameterError("sample_ard_precisions: matrix/spec mismatch");
  }
  Vector alphas(ard.spec.groups);
  for (int g = 0; g < ard.spec.groups; ++g) {
    const double ssq =
        a_matrix.middleCols(g * ard.spec.cols_per_group, ard.spec.cols_per_group).squaredNorm();
    alphas[g] = rng.gamma(ard.a + 0.5 * ard.spec.group_size(), ard.b + 0.5 * ssq);
  }
  return alphas;
}

InverseWishartParams sigma_posterior_given_A(const PseudoObsRegression& reg, int k,
                                             const Matrix& a_matrix,
                                             const std::optional<Vector>& mode_mean,
                                             const InverseWishartParams& prior) {
  reg.validate();
  const Eigen::Index l = reg.out_dim();
  Matrix resid_sum = Matrix::Zero(l, l);
  int count = 0;
  for (Eigen::Index t = 0; t < reg.size(); ++t) {
    if (reg.assignments[t] != k) continue;
    Vector r = reg.psi.col(t);
    if (a_matrix.cols() > 0) r -= a_matrix * reg.psibar.col(t);
    if (mode_mean) r -= *mode_mean;
    resid_sum.noalias() += r * r.transpose();
    ++count;
  }
  return {prior.dof + count, symmetrized(prior.scale + resid_sum)};
}

Matrix sample_sigma_given_A(const PseudoObsRegression& reg, int k, const Matrix& a_matrix,
                            const std::optional<Vector>& mode_mean,
                            const InverseWishartParams& prior, Rng& rng) {
  return sample_inverse_wishart(sigma_posterior_given_A(reg, k, a_matrix, mode_mean, prior),
                                rng);
}

void NiwnHyper::validate() const {
  if (!is_positive_definite(Sigma_A) || !is_positive_definite(S0) ||
      !is_positive_definite(Sigma0)) {
    throw ParameterError("NiwnHyper: covariances must be positive definite");
  }
  if (!(n0 > static_cast<double>(S0.rows()) - 1.0)) {
    throw ParameterError("NiwnHyper: n0 must exceed dim - 1");
  }
}

Matrix sample_A_niwn(const ModeSums& sums, const Matrix& sigma,
                     const std::optional<Vector>& mode_mean, const NiwnHyper& hyper, Rng& rng) {
  const Eigen::Index l = sigma.rows();
  const Eigen::Index p = sums.S_bb.rows();
  auto llt_a = llt_jittered(hyper.Sigma_A, "sample_A_niwn: Sigma_A");
  Matrix lambda0 = llt_a.solve(Matrix::Identity(l * p, l * p));
  Vector theta0 = llt_a.solve(hyper.m_A);
  InformationGaussian post = vec_a_conditional(sums, sigma, mode_mean, theta0, lambda0);
  Vector v = sample_information_gaussian(post, rng);
  return reshape_to_matrix(v, l, p);
}

InformationGaussian shared_A_conditional(const std::vector<ModeSums>& sums,
                                         const std::vector<ModeDynamics>& dyn,
                                         const NiwnHyper& hyper) {
  if (sums.empty() || dyn.size() != sums.size()) {
    throw ParameterError("shared_A_conditional: sums/dynamics mismatch");
  }
  const Eigen::Index l = dyn[0].Sigma.rows();
  const Eigen::Index p = sums[0].S_bb.rows();
  auto llt_a = llt_jittered(hyper.Sigma_A, "shared_A_conditional: Sigma_A");
  Matrix lambda = llt_a.solve(Matrix::Identity(l * p, l * p));
  Vector theta = llt_a.solve(hyper.m_A);
  for (std::size_t k = 0; k < sums.size(); ++k) {
    if (sums[k].count == 0) continue;
    const Matrix sigma_inv = spd_inverse(dyn[k].Sigma, "shared_A_conditional: Sigma_k");
    lambda += kron(sums[k].S_bb, sigma_inv);
    Matrix cross = sums[k].S_pb;
    if (dyn[k].has_mu()) cross -= dyn[k].mu * sums[k].sum_psibar.transpose();
    Matrix rhs = sigma_inv * cross;
    theta += Eigen::Map<const Vector>(rhs.data(), l * p);
  }
  return InformationGaussian(std::move(theta), std::move(lambda));
}

Matrix sample_shared_A_niwn(const std::vector<ModeSums>& sums,
                            const std::vector<ModeDynamics>& dyn, const NiwnHyper& hyper,
                            Rng& rng) {
  const Eigen::Index l = dyn[0].Sigma.rows();
  const Eigen::Index p = sums[0].S_bb.rows();
  Vector v = sample_information_gaussian(shared_A_conditional(sums, dyn, hyper), rng);
  return reshape_to_matrix(v, l, p);
}

Vector sample_process_mean(const ModeSums& sums, const Matrix& a_matrix, const Matrix& sigma,
                           const Vector& mu0, const Matrix& sigma0, Rng& rng) {
  auto llt0 = llt_jittered(sigma0, "sample_process_mean: Sigma0");
  const Eigen::Index l = mu0.size();
  Matrix lambda = llt0.solve(Matrix::Identity(l, l));
  Vector theta = llt0.solve(mu0);
  if (sums.count > 0) {
    const Matrix sigma_inv = spd_inverse(sigma, "sample_process_mean: Sigma");
    Vector resid = sums.sum_psi;
    if (a_matrix.cols() > 0) resid -= a_matrix * sums.sum_psibar;
    theta += sigma_inv * resid;
    lambda += static_cast<double>(sums.count) * sigma_inv;
  }
  return sample_information_gaussian(InformationGaussian(theta, lambda), rng);
}

Matrix sample_measurement_noise(const Matrix& y, const Matrix& x, const Matrix& c,
                                const InverseWishartParams& prior, Rng& rng) {
  if (y.cols() != x.cols()) throw ParameterError("sample_measurement_noise: y/x mismatch");
  Matrix resid = y - c * x;
  Matrix s_r = resid * resid.transpose();
  return sample_inverse_wishart({prior.dof + static_cast<double>(y.cols()),
                                 symmetrized(prior.scale + s_r)},
                                rng);
}

MeasurementMixture init_measurement_mixture(int truncation, double sigma_r,
                                            const InverseWishartParams& component_prior,
                                            Eigen::Index T, Rng& rng) {
  MeasurementMixture mix;
  mix.sigma_r = sigma_r;
  mix.component_prior = component_prior;
  mix.omega = stick_breaking(sigma_r, truncation, rng);
  mix.R.resize(truncation);
  for (int j = 0; j < truncation; ++j) {
    mix.R[j] = sample_inverse_wishart(component_prior, rng);
  }
  mix.labels.assign(T, 0);
  for (Eigen::Index t = 0; t < T; ++t) {
    mix.labels[t] = rng.categorical(mix.omega);
  }
  return mix;
}

void update_mixture_measurement_noise(const Matrix& residuals, MeasurementMixture& mix,
                                      Rng& rng) {
  const int J = mix.components();
  const Eigen::Index T = residuals.cols();
  if (static_cast<Eigen::Index>(mix.labels.size()) != T) {
    throw ParameterError("update_mixture_measurement_noise: label/residual size mismatch");
  }
  const Eigen::Index d = residuals.rows();

  std::vector<Eigen::LLT<Matrix>> chols;
  chols.reserve(J);
  Vector log_omega(J);
  for (int j = 0; j < J; ++j) {
    chols.push_back(llt_jittered(mix.R[j], "mixture component"));
    log_omega[j] = std::log(std::max(mix.omega[j], 1e-300));
  }
  const Vector zero = Vector::Zero(d);
  std::vector<int> counts(J, 0);
  std::vector<Matrix> scatter(J, Matrix::Zero(d, d));
  Vector logw(J);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int j = 0; j < J; ++j) {
      logw[j] = log_omega[j] + log_mvn(residuals.col(t), zero, chols[j]);
    }
    const int c = rng.categorical_from_log(logw);
    mix.labels[t] = c;
    counts[c] += 1;
    scatter[c].noalias() += residuals.col(t) * residuals.col(t).transpose();
  }

  for (int j = 0; j < J; ++j) {
    mix.R[j] = sample_inverse_wishart(
        {mix.component_prior.dof + counts[j],
         symmetrized(mix.component_prior.scale + scatter[j])},
        rng);
  }

  // Truncated stick posterior for the weights.
  double remaining = 1.0;
  int tail = 0;
  for (int j = J - 1; j >= 0; --j) {
    tail += counts[j];
  }
  int seen = 0;
  for (int j = 0; j < J; ++j) {
    seen += counts[j];
    const int after = tail - seen;
    if (j + 1 < J) {
      const double v = rng.beta(1.0 + counts[j], mix.sigma_r + after);
      mix.omega[j] = v * remaining;
      remaining *= (1.0 - v);
    } else {
      mix.omega[j] = remaining;
    }
  }
}

Matrix empirical_covariance(const Matrix& y) {
  const Eigen::Index T = y.cols();
  if (T < 2) throw ParameterError("empirical_covariance: need at least two observations");
  Vector mean = y.rowwise().mean();
  Matrix centered = y.colwise() - mean;
  return (centered * centered.transpose()) / static_cast<double>(T);
}

Matrix first_differences(const Matrix& y) {
  const Eigen::Index T = y.cols();
  if (T < 2) throw ParameterError("first_differences: need at least two observations");
  return y.rightCols(T - 1) - y.leftCols(T - 1);
}

Matrix embed_scale_matrix(const Matrix& sigma_bar, int n) {
  const int d = static_cast<int>(sigma_bar.rows());
  if (n < d) throw ParameterError("embed_scale_matrix: n must be at least d");
  if (n == d) return sigma_bar;
  Matrix out = Matrix::Zero(n, n);
  out.topLeftCorner(d, d) = sigma_bar;
  const double fill = sigma_bar.diagonal().mean();
  out.bottomRightCorner(n - d, n - d) = fill * Matrix::Identity(n - d, n - d);
  return out;
}

MniwHyper mniw_hyper_from_scale(const Matrix& sigma_bar, int out_dim, int in_dim,
                                double s0_fraction, double n0_override) {
  MniwHyper hyper;
  hyper.M = Matrix::Zero(out_dim, in_dim);
  hyper.K = Matrix::Identity(in_dim, in_dim);
  hyper.n0 = n0_override > 0.0 ? n0_override : static_cast<double>(in_dim) + 2.0;
  hyper.S0 = s0_fraction * embed_scale_matrix(sigma_bar, out_dim);
  hyper.validate();
  return hyper;
}

MniwHyper mniw_hyper_from_data(const Matrix& y, int out_dim, int in_dim, double s0_fraction,
                               double n0_override) {
  return mniw_hyper_from_scale(empirical_covariance(y), out_dim, in_dim, s0_fraction,
                               n0_override);
}

InverseWishartParams measurement_prior_from_data(const Matrix& y, double r0_fraction) {
  const int d = static_cast<int>(y.rows());
  return {static_cast<double>(d) + 2.0, r0_fraction * empirical_covariance(y)};
}

std::vector<int> required_zero_observation_columns(
    const std::vector<std::vector<int>>& zero_cols_per_mode) {
  std::set<int> required;
  for (const auto& cols : zero_cols_per_mode) {
    required.insert(cols.begin(), cols.end());
  }
  return {required.begin(), required.end()};
}

bool satisfies_sparsity_criterion(const std::vector<std::vector<int>>& zero_cols_per_mode,
                                  const std::vector<int>& zero_cols_of_c) {
  const auto required = required_zero_observation_columns(zero_cols_per_mode);
  const std::set<int> c_zero(zero_cols_of_c.begin(), zero_cols_of_c.end());
  return std::all_of(required.begin(), required.end(),
                     [&](int j) { return c_zero.count(j) > 0; });
}

}  // namespace slds
