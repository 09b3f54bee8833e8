#include "slds/geweke.hpp"

#include <cmath>

namespace slds {

namespace {

double mode_occupancy_entropy(const IndexVec& z, int L) {
  std::vector<double> freq(L, 0.0);
  for (int v : z) freq[v] += 1.0;
  double h = 0.0;
  for (double f : freq) {
    if (f > 0.0) {
      const double p = f / static_cast<double>(z.size());
      h -= p * std::log(p);
    }
  }
  return h;
}

double lag1_autocovariance(const Matrix& y) {
  const Eigen::Index T = y.cols();
  const Vector mean = y.rowwise().mean();
  double acc = 0.0;
  for (Eigen::Index t = 0; t + 1 < T; ++t) {
    acc += (y.col(t) - mean).dot(y.col(t + 1) - mean);
  }
  return acc / static_cast<double>(T - 1);
}

Vector statistics(const ChainState& state, const Dataset& data, int L) {
  Vector s(6);
  s[0] = mode_occupancy_entropy(state.z, L);
  s[1] = lag1_autocovariance(data.y);
  s[2] = state.hyper.concentration();
  s[3] = state.dyn[0].Sigma.trace();
  // Couplings between the global weights and the mode assignments; these are
  // the statistics that expose a broken beta update (beta's marginal alone
  // stays at the prior when its update is skipped).
  Vector freq = Vector::Zero(L);
  for (int v : state.z) freq[v] += 1.0;
  freq /= static_cast<double>(state.z.size());
  s[4] = state.trans.beta.dot(freq);
  s[5] = state.trans.beta[state.z.front()];
  return s;
}

}  // namespace

double effective_sample_size(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 8) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (var <= 0.0) return static_cast<double>(n);

  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      acc += (series[t] - mean) * (series[t + lag] - mean);
    }
    return acc / static_cast<double>(n);
  };

  // Sum paired autocovariances while the pair sums stay positive.
  double sum = 0.0;
  const std::size_t max_lag = n / 2;
  for (std::size_t lag = 1; lag + 1 <= max_lag; lag += 2) {
    const double pair = autocov(lag) + autocov(lag + 1);
    if (pair <= 0.0) break;
    sum += pair;
  }
  const double tau = 1.0 + 2.0 * sum / var;
  return static_cast<double>(n) / std::max(tau, 1.0);
}

GewekeResult geweke_joint_test(const ModelConfig& config, const GewekeOptions& options) {
  const int n_stats = 6;
  const Matrix context = Matrix::Zero(config.obs_dim, std::max(config.ar_order, 1));

  Matrix forward(options.n_samples, n_stats);
  {
    Rng rng = Rng::stream(options.seed, 1);
    for (int i = 0; i < options.n_samples; ++i) {
      ForwardDraw draw = sample_joint_from_prior(config, context, options.T, rng);
      forward.row(i) = statistics(draw.state, draw.data, config.L).transpose();
    }
  }

  Matrix gibbs(options.n_samples, n_stats);
  {
    Rng rng = Rng::stream(options.seed, 2);
    ForwardDraw draw = sample_joint_from_prior(config, context, options.T, rng);
    SweepOptions sweep_opts;
    sweep_opts.skip_beta_update = options.disable_beta_update;
    for (int i = 0; i < options.n_samples; ++i) {
      gibbs_sweep(draw.state, config, draw.data, rng, sweep_opts);
      resimulate_data(draw.state, config, draw.data, rng);
      gibbs.row(i) = statistics(draw.state, draw.data, config.L).transpose();
    }
  }

  GewekeResult result;
  result.names = {"mode_occupancy_entropy", "lag1_autocov_y",      "alpha_plus_kappa",
                  "trace_sigma_1",          "beta_occupancy_dot",  "beta_first_mode"};
  result.forward_mean.resize(n_stats);
  result.gibbs_mean.resize(n_stats);
  result.z_scores.resize(n_stats);
  result.gibbs_ess.resize(n_stats);
  for (int s = 0; s < n_stats; ++s) {
    const double mf = forward.col(s).mean();
    const double mg = gibbs.col(s).mean();
    const double vf = (forward.col(s).array() - mf).square().sum() / (options.n_samples - 1);
    const double vg = (gibbs.col(s).array() - mg).square().sum() / (options.n_samples - 1);
    std::vector<double> series(gibbs.col(s).data(), gibbs.col(s).data() + options.n_samples);
    const double ess = effective_sample_size(series);
    const double se = std::sqrt(vf / options.n_samples + vg / ess);
    result.forward_mean[s] = mf;
    result.gibbs_mean[s] = mg;
    result.gibbs_ess[s] = ess;
    result.z_scores[s] = (mg - mf) / std::max(se, 1e-300);
  }
  return result;
}

}  // namespace slds
