#include "slds/state_sampler.hpp"

#include <cmath>
#include <sstream>

#include "slds/linalg.hpp"

namespace slds {

namespace {

struct ModeInverses {
  std::vector<Matrix> sigma_inv;
  std::vector<bool> stable_ok;       // A invertible with moderate condition number
  std::vector<Matrix> a_inv_t;       // A^{-T} where available
};

ModeInverses precompute_mode_inverses(const std::vector<ModeDynamics>& dyn, bool need_a_inv) {
  ModeInverses out;
  out.sigma_inv.reserve(dyn.size());
  out.stable_ok.assign(dyn.size(), false);
  out.a_inv_t.resize(dyn.size());
  for (std::size_t k = 0; k < dyn.size(); ++k) {
    out.sigma_inv.push_back(spd_inverse(dyn[k].Sigma, "filter: Sigma"));
    if (!need_a_inv) continue;
    const Matrix& a = dyn[k].A;
    if (a.rows() != a.cols() || a.rows() == 0) continue;
    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible()) continue;
    const double rcond = lu.rcond();
    if (rcond < 1e-8) continue;
    out.a_inv_t[k] = lu.inverse().transpose();
    out.stable_ok[k] = true;
  }
  return out;
}

Vector mode_mu(const ModeDynamics& d) {
  return d.has_mu() ? d.mu : Vector(Vector::Zero(d.Sigma.rows()));
}

}  // namespace

MeasurementCache::MeasurementCache(const MeasurementModel& meas) {
  for (const Matrix& r : meas.R_components) {
    const Matrix r_inv = spd_inverse(r, "MeasurementCache: R");
    ct_rinv.push_back(meas.C.transpose() * r_inv);
    ct_rinv_c.push_back(symmetrized(ct_rinv.back() * meas.C));
  }
}

BackwardFilterBank backward_info_filter(const Matrix& y, const IndexVec& z,
                                        const std::vector<ModeDynamics>& dyn,
                                        const MeasurementModel& meas, FilterForm form) {
  const Eigen::Index T = y.cols();
  const Eigen::Index n = meas.C.cols();
  if (static_cast<Eigen::Index>(z.size()) != T) {
    throw ParameterError("backward_info_filter: z length must match T");
  }
  const bool stable = (form != FilterForm::Direct);
  MeasurementCache cache(meas);
  ModeInverses inv = precompute_mode_inverses(dyn, false);
  const Matrix eye = Matrix::Identity(n, n);

  BackwardFilterBank bank;
  bank.predicted.resize(T);
  bank.updated.resize(T);

  bank.predicted[T - 1] = InformationGaussian::zero(n);
  bank.updated[T - 1] = InformationGaussian(cache.info_mean(meas, T - 1, y.col(T - 1)),
                                            cache.info(meas, T - 1));

  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const int k = z[t + 1];
    const InformationGaussian& u = bank.updated[t + 1];
    const Matrix& a = dyn[k].A;
    const Matrix& s_inv = inv.sigma_inv[k];
    const Vector mu = mode_mu(dyn[k]);
    InformationGaussian pred;
    if (stable) {
      const Matrix j = u.lambda * llt_jittered(u.lambda + s_inv, "backward filter").solve(eye);
      const Matrix l = eye - j;
      pred.lambda = symmetrized(a.transpose() *
                                (l * u.lambda * l.transpose() + j * s_inv * j.transpose()) * a);
      pred.theta = a.transpose() * (l * (u.theta - u.lambda * mu));
    } else {
      const Matrix mid = llt_jittered(s_inv + u.lambda, "backward filter").solve(eye);
      const Matrix sa = s_inv * a;
      pred.lambda = symmetrized(a.transpose() * sa - sa.transpose() * mid * sa);
      pred.theta =
          -sa.transpose() * mu + sa.transpose() * (mid * (u.theta + s_inv * mu));
    }
    if (!pred.lambda.allFinite() || !pred.theta.allFinite()) {
      std::ostringstream msg;
      msg << "backward_info_filter: non-finite message at t=" << t;
      throw NumericalError(msg.str());
    }
    bank.predicted[t] = pred;
    bank.updated[t] = InformationGaussian(pred.theta + cache.info_mean(meas, t, y.col(t)),
                                          pred.lambda + cache.info(meas, t));
  }
  return bank;
}

ForwardFilterBank forward_info_filter(const Matrix& y, const IndexVec& z,
                                      const std::vector<ModeDynamics>& dyn,
                                      const MeasurementModel& meas, const Matrix& p0,
                                      FilterForm form) {
  const Eigen::Index T = y.cols();
  const Eigen::Index n = meas.C.cols();
  if (static_cast<Eigen::Index>(z.size()) != T) {
    throw ParameterError("forward_info_filter: z length must match T");
  }
  MeasurementCache cache(meas);
  ModeInverses inv = precompute_mode_inverses(dyn, form != FilterForm::Direct);
  const Matrix eye = Matrix::Identity(n, n);

  ForwardFilterBank bank;
  bank.predicted.resize(T);
  bank.updated.resize(T);
  if (form != FilterForm::Direct) {
    for (std::size_t k = 0; k < dyn.size(); ++k) {
      if (!inv.stable_ok[k]) bank.direct_fallback_modes.push_back(static_cast<int>(k));
    }
  }

  bank.predicted[0] =
      InformationGaussian(Vector::Zero(n), spd_inverse(p0, "forward_info_filter: P0"));
  bank.updated[0] =
      InformationGaussian(bank.predicted[0].theta + cache.info_mean(meas, 0, y.col(0)),
                          bank.predicted[0].lambda + cache.info(meas, 0));

  for (Eigen::Index t = 1; t < T; ++t) {
    const int k = z[t];
    const InformationGaussian& u = bank.updated[t - 1];
    const Matrix& a = dyn[k].A;
    const Matrix& s_inv = inv.sigma_inv[k];
    const Vector mu = mode_mu(dyn[k]);
    const bool use_stable =
        (form == FilterForm::Stable || form == FilterForm::Auto) && inv.stable_ok[k];
    InformationGaussian pred;
    if (use_stable) {
      const Matrix m = symmetrized(inv.a_inv_t[k] * u.lambda * inv.a_inv_t[k].transpose());
      const Matrix j = m * llt_jittered(m + s_inv, "forward filter").solve(eye);
      const Matrix l = eye - j;
      pred.lambda = symmetrized(l * m * l.transpose() + j * s_inv * j.transpose());
      pred.theta = l * (inv.a_inv_t[k] * u.theta) + pred.lambda * mu;
    } else {
      const Matrix g = symmetrized(a.transpose() * s_inv * a) + u.lambda;
      const Matrix g_inv = llt_jittered(g, "forward filter").solve(eye);
      const Matrix sa = s_inv * a;
      pred.lambda = symmetrized(s_inv - sa * g_inv * sa.transpose());
      pred.theta = s_inv * mu + sa * (g_inv * (u.theta - sa.transpose() * mu));
    }
    if (!pred.lambda.allFinite() || !pred.theta.allFinite()) {
      std::ostringstream msg;
      msg << "forward_info_filter: non-finite message at t=" << t;
      throw NumericalError(msg.str());
    }
    bank.predicted[t] = pred;
    bank.updated[t] = InformationGaussian(pred.theta + cache.info_mean(meas, t, y.col(t)),
                                          pred.lambda + cache.info(meas, t));
  }
  return bank;
}

Matrix forward_sample_states(const BackwardFilterBank& bank, const IndexVec& z,
                             const std::vector<ModeDynamics>& dyn, const Matrix& p0,
                             Rng& rng) {
  const Eigen::Index T = static_cast<Eigen::Index>(bank.updated.size());
  const Eigen::Index n = p0.rows();
  ModeInverses inv = precompute_mode_inverses(dyn, false);
  Matrix x(n, T);

  InformationGaussian first(bank.updated[0].theta,
                            bank.updated[0].lambda + spd_inverse(p0, "forward_sample: P0"));
  x.col(0) = sample_information_gaussian(first, rng);

  for (Eigen::Index t = 1; t < T; ++t) {
    const int k = z[t];
    const Matrix& s_inv = inv.sigma_inv[k];
    Vector drift = dyn[k].A * x.col(t - 1);
    if (dyn[k].has_mu()) drift += dyn[k].mu;
    InformationGaussian cond(s_inv * drift + bank.updated[t].theta,
                             s_inv + bank.updated[t].lambda);
    x.col(t) = sample_information_gaussian(cond, rng);
  }
  return x;
}

}  // namespace slds
