#include "slds/mode_sampler.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "slds/linalg.hpp"

namespace slds {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct ModeLikelihoodCache {
  std::vector<Eigen::LLT<Matrix>> chol;
  std::vector<double> log_norm;  // -d/2 log(2 pi) - 1/2 log|Sigma|
};

ModeLikelihoodCache make_likelihood_cache(const std::vector<ModeDynamics>& dyn) {
  ModeLikelihoodCache cache;
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (const auto& d : dyn) {
    cache.chol.push_back(llt_jittered(d.Sigma, "mode likelihood: Sigma"));
    const double half_log_det =
        cache.chol.back().matrixLLT().diagonal().array().log().sum();
    cache.log_norm.push_back(-0.5 * d.Sigma.rows() * log2pi - half_log_det);
  }
  return cache;
}

double mode_log_density(const ModeLikelihoodCache& cache, const std::vector<ModeDynamics>& dyn,
                        int k, const Vector& psi, const Vector& psibar) {
  Vector r = psi;
  if (dyn[k].A.cols() > 0) r -= dyn[k].A * psibar;
  if (dyn[k].has_mu()) r -= dyn[k].mu;
  const Vector s = cache.chol[k].matrixL().solve(r);
  return cache.log_norm[k] - 0.5 * s.squaredNorm();
}

void check_finite(double v, Eigen::Index t, int k) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "mode likelihood non-finite at t=" << t + 1 << ", k=" << k + 1
        << " (degenerate Sigma?)";
    throw NumericalError(msg.str());
  }
}

// log f_k for one time step of the marginalized sampler.
double log_f_weight(const InformationGaussian& pred_k, const InformationGaussian& back) {
  auto llt_pred = llt_jittered(pred_k.lambda, "sequential weight: Lambda_t");
  auto llt_sum = llt_jittered(pred_k.lambda + back.lambda, "sequential weight: Lambda sum");
  const double logdet_pred = log_det_from_llt(llt_pred);
  const double logdet_sum = log_det_from_llt(llt_sum);
  const double quad_pred = pred_k.theta.dot(llt_pred.solve(pred_k.theta));
  const Vector combined = pred_k.theta + back.theta;
  const double quad_sum = combined.dot(llt_sum.solve(combined));
  return 0.5 * logdet_pred - 0.5 * logdet_sum - 0.5 * quad_pred + 0.5 * quad_sum;
}

}  // namespace

Matrix regression_loglik_table(const PseudoObsRegression& reg,
                               const std::vector<ModeDynamics>& dyn) {
  reg.validate();
  const Eigen::Index N = reg.size();
  const int L = static_cast<int>(dyn.size());
  ModeLikelihoodCache cache = make_likelihood_cache(dyn);
  Matrix table(N, L);
  for (Eigen::Index t = 0; t < N; ++t) {
    const Vector psi = reg.psi.col(t);
    const Vector psibar = reg.psibar.col(t);
    for (int k = 0; k < L; ++k) {
      const double v = mode_log_density(cache, dyn, k, psi, psibar);
      check_finite(v, t, k);
      table(t, k) = v;
    }
  }
  return table;
}

Matrix slds_loglik_table(const Matrix& x, const std::vector<ModeDynamics>& dyn) {
  const Eigen::Index T = x.cols();
  const int L = static_cast<int>(dyn.size());
  ModeLikelihoodCache cache = make_likelihood_cache(dyn);
  Matrix table = Matrix::Zero(T, L);
  for (Eigen::Index t = 1; t < T; ++t) {
    const Vector psi = x.col(t);
    const Vector psibar = x.col(t - 1);
    for (int k = 0; k < L; ++k) {
      const double v = mode_log_density(cache, dyn, k, psi, psibar);
      check_finite(v, t, k);
      table(t, k) = v;
    }
  }
  return table;
}

void apply_supervision_mask(Matrix& loglik, const IndexVec& fixed_labels) {
  if (fixed_labels.empty()) return;
  if (static_cast<Eigen::Index>(fixed_labels.size()) != loglik.rows()) {
    throw ParameterError("apply_supervision_mask: label length mismatch");
  }
  for (Eigen::Index t = 0; t < loglik.rows(); ++t) {
    const int fixed = fixed_labels[t];
    if (fixed < 0) continue;
    for (Eigen::Index k = 0; k < loglik.cols(); ++k) {
      if (k != fixed) loglik(t, k) = kNegInf;
    }
  }
}

ModeMessages hmm_backward_messages(const Matrix& loglik, const Matrix& pi) {
  const Eigen::Index T = loglik.rows();
  const Eigen::Index L = loglik.cols();
  if (pi.rows() != L || pi.cols() != L) {
    throw ParameterError("hmm_backward_messages: pi must be L x L");
  }
  Matrix log_pi = pi.array().max(1e-300).log();
  ModeMessages msg;
  msg.log_m = Matrix::Zero(T, L);
  Vector v(L);
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (Eigen::Index j = 0; j < L; ++j) v[j] = loglik(t + 1, j) + msg.log_m(t + 1, j);
    const double vmax = v.maxCoeff();
    if (!std::isfinite(vmax)) {
      throw NumericalError("hmm_backward_messages: all-zero message row");
    }
    Vector ev = (v.array() - vmax).exp();
    for (Eigen::Index k = 0; k < L; ++k) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < L; ++j) acc += pi(k, j) * ev[j];
      msg.log_m(t, k) = vmax + std::log(acc);
    }
    // Per-step max normalization keeps long chains bounded.
    msg.log_m.row(t).array() -= msg.log_m.row(t).maxCoeff();
  }
  return msg;
}

BlockSampleResult forward_sample_given_messages(const Matrix& loglik,
                                                const ModeMessages& messages,
                                                const TransitionSet& trans, Rng& rng) {
  const Eigen::Index T = loglik.rows();
  const int L = static_cast<int>(loglik.cols());
  if (trans.truncation() != L) {
    throw ParameterError("forward_sample_given_messages: truncation mismatch");
  }
  const Matrix log_pi = trans.pi.array().max(1e-300).log();
  const Vector log_beta = trans.beta.array().max(1e-300).log();

  BlockSampleResult out;
  out.z.assign(T, 0);
  out.counts = Eigen::MatrixXi::Zero(L, L);
  Vector w(L);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int k = 0; k < L; ++k) {
      const double prior = (t == 0) ? log_beta[k] : log_pi(out.z[t - 1], k);
      w[k] = prior + loglik(t, k) + messages.log_m(t, k);
    }
    out.z[t] = rng.categorical_from_log(w);
    if (t > 0) out.counts(out.z[t - 1], out.z[t]) += 1;
  }
  return out;
}

BlockSampleResult block_sample_modes(const Matrix& loglik, const TransitionSet& trans,
                                     Rng& rng) {
  return forward_sample_given_messages(loglik, hmm_backward_messages(loglik, trans.pi),
                                       trans, rng);
}

BlockSampleResult block_sample_modes(const PseudoObsRegression& reg, const TransitionSet& trans,
                                     const std::vector<ModeDynamics>& dyn, Rng& rng) {
  return block_sample_modes(regression_loglik_table(reg, dyn), trans, rng);
}

Vector sequential_candidate_log_f(const InformationGaussian& forward_prev_updated,
                                  const InformationGaussian& backward_updated_t,
                                  const std::vector<ModeDynamics>& dyn, bool first_step,
                                  const Matrix& p0) {
  const int L = static_cast<int>(dyn.size());
  const Eigen::Index n = p0.rows();
  Vector log_f(L);
  if (first_step) {
    InformationGaussian pred(Vector::Zero(n), spd_inverse(p0, "sequential: P0"));
    const double f = log_f_weight(pred, backward_updated_t);
    log_f.setConstant(f);
    return log_f;
  }
  auto llt_fwd = llt_jittered(forward_prev_updated.lambda, "sequential: forward lambda");
  const Matrix fwd_cov = llt_fwd.solve(Matrix::Identity(n, n));
  const Vector fwd_mean = llt_fwd.solve(forward_prev_updated.theta);
  for (int k = 0; k < L; ++k) {
    const Matrix& a = dyn[k].A;
    Matrix pred_cov = dyn[k].Sigma + a * fwd_cov * a.transpose();
    InformationGaussian pred;
    pred.lambda = spd_inverse(pred_cov, "sequential: predicted covariance");
    Vector drift = a * fwd_mean;
    if (dyn[k].has_mu()) drift += dyn[k].mu;
    pred.theta = pred.lambda * drift;
    log_f[k] = log_f_weight(pred, backward_updated_t);
  }
  return log_f;
}

Matrix sequential_log_f_table(const Matrix& y, const IndexVec& z,
                              const std::vector<ModeDynamics>& dyn,
                              const MeasurementModel& meas, const Matrix& p0) {
  const Eigen::Index T = y.cols();
  const int L = static_cast<int>(dyn.size());
  BackwardFilterBank back = backward_info_filter(y, z, dyn, meas);
  ForwardFilterBank fwd = forward_info_filter(y, z, dyn, meas, p0);
  Matrix table(T, L);
  for (Eigen::Index t = 0; t < T; ++t) {
    const InformationGaussian& prev =
        (t == 0) ? InformationGaussian::zero(p0.rows()) : fwd.updated[t - 1];
    table.row(t) =
        sequential_candidate_log_f(prev, back.updated[t], dyn, t == 0, p0).transpose();
  }
  return table;
}

IndexVec sequential_sample_modes_marginalized(const Matrix& y, const IndexVec& z,
                                              const TransitionSet& trans,
                                              const std::vector<ModeDynamics>& dyn,
                                              const MeasurementModel& meas, const Matrix& p0,
                                              Rng& rng, const IndexVec* fixed_labels) {
  const Eigen::Index T = y.cols();
  const int L = static_cast<int>(dyn.size());
  if (trans.truncation() != L) {
    throw ParameterError("sequential_sample_modes_marginalized: truncation mismatch");
  }
  // Backward messages from the incoming sequence: at the moment z_t is drawn
  // they only involve z_{t+1:T}, which has not been resampled yet.
  BackwardFilterBank back = backward_info_filter(y, z, dyn, meas);
  MeasurementCache cache(meas);

  const Matrix log_pi = trans.pi.array().max(1e-300).log();
  const Vector log_beta = trans.beta.array().max(1e-300).log();
  const Eigen::Index n = p0.rows();

  std::vector<Matrix> sigma_inv;
  sigma_inv.reserve(dyn.size());
  for (const auto& d : dyn) sigma_inv.push_back(spd_inverse(d.Sigma, "sequential: Sigma"));

  IndexVec out = z;
  InformationGaussian fwd_updated;  // forward message under the new prefix
  Vector w(L);
  Matrix fwd_cov;
  Vector fwd_mean;
  std::vector<InformationGaussian> candidate_pred(L);

  for (Eigen::Index t = 0; t < T; ++t) {
    if (t == 0) {
      InformationGaussian pred(Vector::Zero(n), spd_inverse(p0, "sequential: P0"));
      for (int k = 0; k < L; ++k) candidate_pred[k] = pred;
      const double f = log_f_weight(pred, back.updated[0]);
      for (int k = 0; k < L; ++k) {
        w[k] = log_beta[k] + f;
        if (T > 1) w[k] += log_pi(k, out[1]);
      }
    } else {
      auto llt_fwd = llt_jittered(fwd_updated.lambda, "sequential: forward lambda");
      fwd_cov = llt_fwd.solve(Matrix::Identity(n, n));
      fwd_mean = llt_fwd.solve(fwd_updated.theta);
      for (int k = 0; k < L; ++k) {
        const Matrix& a = dyn[k].A;
        Matrix pred_cov = dyn[k].Sigma + a * fwd_cov * a.transpose();
        candidate_pred[k].lambda = spd_inverse(pred_cov, "sequential: predicted covariance");
        Vector drift = a * fwd_mean;
        if (dyn[k].has_mu()) drift += dyn[k].mu;
        candidate_pred[k].theta = candidate_pred[k].lambda * drift;
        w[k] = log_pi(out[t - 1], k) + log_f_weight(candidate_pred[k], back.updated[t]);
        if (t + 1 < T) w[k] += log_pi(k, out[t + 1]);
      }
    }
    const int fixed =
        fixed_labels && !fixed_labels->empty() ? (*fixed_labels)[t] : -1;
    const int zt = (fixed >= 0) ? fixed : rng.categorical_from_log(w);
    out[t] = zt;
    fwd_updated =
        InformationGaussian(candidate_pred[zt].theta + cache.info_mean(meas, t, y.col(t)),
                            candidate_pred[zt].lambda + cache.info(meas, t));
  }
  return out;
}

}  // namespace slds
