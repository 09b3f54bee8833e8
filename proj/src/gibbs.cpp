#include "slds/gibbs.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include "slds/linalg.hpp"

namespace slds {

namespace {

MeasurementModel measurement_model(const ChainState& state, const ModelConfig& config) {
  const Matrix c = config.measurement_matrix();
  if (config.mixture_noise) return MeasurementModel::mixture(c, state.mix);
  return MeasurementModel::shared(c, state.R);
}

ModeDynamics sample_mode_dynamics_from_prior(const ModelConfig& config, ArdState* ard,
                                             Rng& rng) {
  ModeDynamics dyn;
  const int ell = config.out_dim();
  const int p = config.in_dim();
  switch (config.prior) {
    case PriorFamily::Mniw: {
      const MniwHyper& h = *config.mniw;
      dyn.Sigma = sample_inverse_wishart({h.n0, h.S0}, rng);
      MatrixNormalParams mn{h.M, spd_inverse(h.K, "prior: K"), dyn.Sigma};
      dyn.A = sample_matrix_normal(mn, rng);
      break;
    }
    case PriorFamily::Ard: {
      ArdSpec spec = config.is_slds() ? ard_spec_for_slds(config.state_dim)
                                      : ard_spec_for_var(config.obs_dim, config.ar_order);
      *ard = ard_state_from_spec(spec, rng);
      ard->b = ard->a / config.ard_prior_mean;
      for (int g = 0; g < spec.groups; ++g) ard->alphas[g] = rng.gamma(ard->a, ard->b);
      const Vector prec = ard_prior_precision_diagonal(*ard);
      Vector v(prec.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal() / std::sqrt(prec[i]);
      dyn.A = Eigen::Map<const Matrix>(v.data(), ell, p);
      dyn.Sigma = sample_inverse_wishart(*config.sigma_prior, rng);
      break;
    }
    case PriorFamily::Niwn: {
      const NiwnHyper& h = *config.niwn;
      dyn.Sigma = sample_inverse_wishart({h.n0, h.S0}, rng);
      if (config.has_fixed_A()) {
        dyn.A = *config.fixed_A;
      } else if (p > 0) {
        Vector v = sample_mvn(h.m_A, h.Sigma_A, rng);
        dyn.A = Eigen::Map<const Matrix>(v.data(), ell, p);
      } else {
        dyn.A = Matrix::Zero(ell, 0);
      }
      break;
    }
  }
  if (config.process_mean) {
    const auto [mu0, sigma0] = config.process_mean_prior();
    dyn.mu = sample_mvn(mu0, sigma0, rng);
  }
  return dyn;
}

void update_dynamics(ChainState& state, const ModelConfig& config,
                     const PseudoObsRegression& reg, Rng& rng) {
  const int L = config.L;
  const auto sums = accumulate_mode_sums(reg, L);
  const int inner = std::max(1, config.schedule.inner_iters);

  switch (config.prior) {
    case PriorFamily::Mniw: {
      const MniwHyper& h = *config.mniw;
      for (int k = 0; k < L; ++k) {
        if (config.process_mean) {
          const auto [mu0, sigma0] = config.process_mean_prior();
          for (int it = 0; it < inner; ++it) {
            ModeDynamics d = sample_mniw_posterior_sqrt(reg, k, state.dyn[k].mu, h, rng);
            d.mu = sample_process_mean(sums[k], d.A, d.Sigma, mu0, sigma0, rng);
            state.dyn[k] = d;
          }
        } else {
          state.dyn[k] = sample_mniw_posterior_sqrt(reg, k, std::nullopt, h, rng);
        }
      }
      break;
    }
    case PriorFamily::Ard: {
      const InverseWishartParams& iw = *config.sigma_prior;
      for (int k = 0; k < L; ++k) {
        std::optional<Vector> mu;
        if (config.process_mean) mu = state.dyn[k].mu;
        if (sums[k].count == 0) {
          // Empty modes refresh jointly from the prior.
          ArdState fresh = state.ard[k];
          ModeDynamics d;
          for (int g = 0; g < fresh.spec.groups; ++g) {
            fresh.alphas[g] = rng.gamma(fresh.a, fresh.b);
          }
          const Vector prec = ard_prior_precision_diagonal(fresh);
          Vector v(prec.size());
          for (Eigen::Index i = 0; i < v.size(); ++i) {
            v[i] = rng.normal() / std::sqrt(prec[i]);
          }
          d.A = Eigen::Map<const Matrix>(v.data(), fresh.spec.rows, fresh.spec.cols());
          d.Sigma = sample_inverse_wishart(iw, rng);
          if (config.process_mean) {
            const auto [mu0, sigma0] = config.process_mean_prior();
            d.mu = sample_mvn(mu0, sigma0, rng);
          }
          state.ard[k] = fresh;
          state.dyn[k] = d;
          continue;
        }
        for (int it = 0; it < inner; ++it) {
          state.dyn[k].A =
              sample_ard_dynamic_matrix(sums[k], state.dyn[k].Sigma, state.ard[k], mu, rng);
          state.ard[k].alphas = sample_ard_precisions(state.dyn[k].A, state.ard[k], rng);
          state.dyn[k].Sigma = sample_sigma_given_A(reg, k, state.dyn[k].A, mu, iw, rng);
          if (config.process_mean) {
            const auto [mu0, sigma0] = config.process_mean_prior();
            state.dyn[k].mu = sample_process_mean(sums[k], state.dyn[k].A,
                                                  state.dyn[k].Sigma, mu0, sigma0, rng);
            mu = state.dyn[k].mu;
          }
        }
      }
      break;
    }
    case PriorFamily::Niwn: {
      const NiwnHyper& h = *config.niwn;
      const InverseWishartParams iw{h.n0, h.S0};
      const bool sample_a = !config.has_fixed_A() && config.in_dim() > 0;
      for (int it = 0; it < inner; ++it) {
        if (config.shares_A()) {
          Matrix a = sample_shared_A_niwn(sums, state.dyn, h, rng);
          for (auto& d : state.dyn) d.A = a;
        }
        for (int k = 0; k < L; ++k) {
          std::optional<Vector> mu;
          if (config.process_mean) mu = state.dyn[k].mu;
          if (sample_a && !config.shares_A()) {
            state.dyn[k].A = sample_A_niwn(sums[k], state.dyn[k].Sigma, mu, h, rng);
          }
          state.dyn[k].Sigma =
              sample_sigma_given_A(reg, k, state.dyn[k].A, mu, iw, rng);
          if (config.process_mean) {
            const auto [mu0, sigma0] = config.process_mean_prior();
            state.dyn[k].mu = sample_process_mean(sums[k], state.dyn[k].A,
                                                  state.dyn[k].Sigma, mu0, sigma0, rng);
          }
        }
      }
      break;
    }
  }
}

double log_dynamics_prior(const ChainState& state, const ModelConfig& config) {
  double out = 0.0;
  const int ell = config.out_dim();
  const int p = config.in_dim();
  switch (config.prior) {
    case PriorFamily::Mniw: {
      const MniwHyper& h = *config.mniw;
      const Matrix v = spd_inverse(h.K, "log_joint: K");
      for (const auto& d : state.dyn) {
        out += log_inverse_wishart(d.Sigma, {h.n0, h.S0});
        out += log_matrix_normal(d.A, {h.M, v, d.Sigma});
      }
      break;
    }
    case PriorFamily::Ard: {
      for (std::size_t k = 0; k < state.dyn.size(); ++k) {
        const ArdState& ard = state.ard[k];
        const Vector prec = ard_prior_precision_diagonal(ard);
        const Vector va = Eigen::Map<const Vector>(state.dyn[k].A.data(), ell * p);
        out += 0.5 * prec.array().log().sum() -
               0.5 * ell * p * std::log(2.0 * std::numbers::pi) -
               0.5 * (prec.array() * va.array().square()).sum();
        for (int g = 0; g < ard.spec.groups; ++g) {
          out += log_gamma_density(ard.alphas[g], ard.a, ard.b);
        }
        out += log_inverse_wishart(state.dyn[k].Sigma, *config.sigma_prior);
      }
      break;
    }
    case PriorFamily::Niwn: {
      const NiwnHyper& h = *config.niwn;
      bool shared_counted = false;
      for (const auto& d : state.dyn) {
        out += log_inverse_wishart(d.Sigma, {h.n0, h.S0});
        if (!config.has_fixed_A() && p > 0) {
          if (config.shares_A()) {
            if (!shared_counted) {
              const Vector va = Eigen::Map<const Vector>(d.A.data(), ell * p);
              out += log_mvn(va, h.m_A, h.Sigma_A);
              shared_counted = true;
            }
          } else {
            const Vector va = Eigen::Map<const Vector>(d.A.data(), ell * p);
            out += log_mvn(va, h.m_A, h.Sigma_A);
          }
        }
      }
      break;
    }
  }
  if (config.process_mean) {
    const auto [mu0, sigma0] = config.process_mean_prior();
    auto llt = llt_jittered(sigma0, "log_joint: Sigma0");
    for (const auto& d : state.dyn) out += log_mvn(d.mu, mu0, llt);
  }
  return out;
}

}  // namespace

int active_mode_count(const IndexVec& z, int L, double threshold) {
  std::vector<int> counts(L, 0);
  for (int v : z) counts[v] += 1;
  const double cutoff = threshold * static_cast<double>(z.size());
  int active = 0;
  for (int c : counts) {
    if (c > cutoff) ++active;
  }
  return active;
}

ChainState init_chain_state(const ModelConfig& config, const Dataset& data, Rng& rng) {
  config.validate(data.dim(), data.length());
  const Eigen::Index T = data.length();
  const int L = config.L;

  ChainState state;
  state.hyper = config.fixed_hyper ? *config.fixed_hyper
                                   : sample_hyper_from_prior(config.hdp_priors, rng);
  state.trans = sample_transitions_from_prior(state.hyper, L, rng);

  state.dyn.resize(L);
  if (config.prior == PriorFamily::Ard) state.ard.resize(L);
  Matrix shared_a;
  for (int k = 0; k < L; ++k) {
    ArdState* ard = config.prior == PriorFamily::Ard ? &state.ard[k] : nullptr;
    state.dyn[k] = sample_mode_dynamics_from_prior(config, ard, rng);
    if (config.shares_A()) {
      if (k == 0) shared_a = state.dyn[0].A;
      state.dyn[k].A = shared_a;
    }
  }

  state.z.assign(T, 0);
  for (Eigen::Index t = 0; t < T; ++t) {
    if (!config.supervision.empty() && config.supervision[t] >= 0) {
      state.z[t] = config.supervision[t];
    } else if (t == 0) {
      state.z[0] = rng.categorical(state.trans.beta);
    } else {
      state.z[t] = rng.categorical(state.trans.pi.row(t > 0 ? state.z[t - 1] : 0).transpose());
    }
  }

  if (config.is_slds()) {
    const Matrix p0 = config.initial_state_covariance();
    state.x.resize(config.state_dim, T);
    state.x.col(0) = sample_mvn(Vector::Zero(config.state_dim), p0, rng);
    for (Eigen::Index t = 1; t < T; ++t) {
      const ModeDynamics& d = state.dyn[state.z[t]];
      Vector mean = d.A * state.x.col(t - 1);
      if (d.has_mu()) mean += d.mu;
      state.x.col(t) = sample_mvn(mean, d.Sigma, rng);
    }
    if (config.mixture_noise) {
      state.mix = init_measurement_mixture(config.mixture_truncation, config.mixture_sigma_r,
                                           *config.mixture_component_prior, T, rng);
    } else {
      state.R = sample_inverse_wishart(*config.r_prior, rng);
    }
  }
  return state;
}

void gibbs_sweep(ChainState& state, const ModelConfig& config, const Dataset& data, Rng& rng,
                 const SweepOptions& options) {
  const int L = config.L;
  Matrix loglik;

  if (config.is_slds()) {
    const MeasurementModel meas = measurement_model(state, config);
    const Matrix p0 = config.initial_state_covariance();
    if (options.sequential) {
      state.z = sequential_sample_modes_marginalized(
          data.y, state.z, state.trans, state.dyn, meas, p0, rng,
          config.supervision.empty() ? nullptr : &config.supervision);
    }
    BackwardFilterBank bank = backward_info_filter(data.y, state.z, state.dyn, meas);
    state.x = forward_sample_states(bank, state.z, state.dyn, p0, rng);
    loglik = slds_loglik_table(state.x, state.dyn);
  } else {
    PseudoObsRegression reg = ar_regression(data.y, data.context, config.ar_order, state.z);
    loglik = regression_loglik_table(reg, state.dyn);
  }

  apply_supervision_mask(loglik, config.supervision);
  BlockSampleResult res = block_sample_modes(loglik, state.trans, rng);
  state.z = res.z;

  AuxCounts aux = sample_aux_counts(res.counts, state.trans.beta, state.hyper, rng);
  if (!options.skip_beta_update) {
    state.trans.beta = update_beta(aux, state.hyper.gamma, rng, state.z[0]);
  }
  if (!config.fixed_hyper) {
    state.hyper = resample_hyperparameters(aux, state.trans.beta, state.hyper,
                                           config.hdp_priors, rng);
  }
  for (int j = 0; j < L; ++j) {
    state.trans.pi.row(j) =
        sample_transition_row(state.trans.beta, state.hyper,
                              res.counts.row(j).cast<double>().transpose(), j, rng)
            .transpose();
  }

  PseudoObsRegression reg = config.is_slds()
                                ? slds_regression(state.x, state.z)
                                : ar_regression(data.y, data.context, config.ar_order, state.z);
  update_dynamics(state, config, reg, rng);

  if (config.is_slds()) {
    if (config.mixture_noise) {
      const Matrix resid = data.y - config.measurement_matrix() * state.x;
      update_mixture_measurement_noise(resid, state.mix, rng);
    } else {
      state.R = sample_measurement_noise(data.y, state.x, config.measurement_matrix(),
                                         *config.r_prior, rng);
    }
  }
}

double log_joint(const ChainState& state, const ModelConfig& config, const Dataset& data) {
  const int L = config.L;
  double out = 0.0;

  if (!config.fixed_hyper) {
    const HdpPriors& pr = config.hdp_priors;
    out += log_gamma_density(state.hyper.concentration(), pr.a_conc, pr.b_conc);
    out += log_gamma_density(state.hyper.gamma, pr.a_gamma, pr.b_gamma);
    if (pr.sticky) out += log_beta_density(state.hyper.rho(), pr.c_rho, pr.d_rho);
  }

  const Vector base = Vector::Constant(L, state.hyper.gamma / L);
  out += log_dirichlet(state.trans.beta, base);
  for (int j = 0; j < L; ++j) {
    Vector conc = state.hyper.alpha * state.trans.beta;
    conc[j] += state.hyper.kappa;
    out += log_dirichlet(state.trans.pi.row(j).transpose(), conc.cwiseMax(1e-10));
  }

  out += std::log(std::max(state.trans.beta[state.z[0]], 1e-300));
  for (std::size_t t = 1; t < state.z.size(); ++t) {
    out += std::log(std::max(state.trans.pi(state.z[t - 1], state.z[t]), 1e-300));
  }

  out += log_dynamics_prior(state, config);

  if (config.is_slds()) {
    const Matrix p0 = config.initial_state_covariance();
    out += log_mvn(state.x.col(0), Vector::Zero(p0.rows()), p0);
    for (Eigen::Index t = 1; t < state.x.cols(); ++t) {
      const ModeDynamics& d = state.dyn[state.z[t]];
      Vector mean = d.A * state.x.col(t - 1);
      if (d.has_mu()) mean += d.mu;
      out += log_mvn(state.x.col(t), mean, d.Sigma);
    }
    const Matrix c = config.measurement_matrix();
    if (config.mixture_noise) {
      for (Eigen::Index t = 0; t < data.length(); ++t) {
        const int comp = state.mix.labels[t];
        out += std::log(std::max(state.mix.omega[comp], 1e-300));
        out += log_mvn(data.y.col(t), c * state.x.col(t), state.mix.R[comp]);
      }
      for (const auto& r : state.mix.R) {
        out += log_inverse_wishart(r, state.mix.component_prior);
      }
    } else {
      out += log_inverse_wishart(state.R, *config.r_prior);
      auto llt_r = llt_jittered(state.R, "log_joint: R");
      for (Eigen::Index t = 0; t < data.length(); ++t) {
        out += log_mvn(data.y.col(t), c * state.x.col(t), llt_r);
      }
    }
  } else {
    PseudoObsRegression reg = ar_regression(data.y, data.context, config.ar_order, state.z);
    Matrix table = regression_loglik_table(reg, state.dyn);
    for (Eigen::Index t = 0; t < table.rows(); ++t) out += table(t, state.z[t]);
  }
  return out;
}

TraceRecord make_trace_record(const ChainState& state, const ModelConfig& config,
                              const Dataset& data, int iteration) {
  TraceRecord rec;
  rec.iteration = iteration;
  rec.z = state.z;
  rec.active_modes = active_mode_count(state.z, config.L);
  rec.log_joint = log_joint(state, config, data);
  rec.alpha = state.hyper.alpha;
  rec.gamma = state.hyper.gamma;
  rec.kappa = state.hyper.kappa;
  if (config.prior == PriorFamily::Ard && !state.ard.empty()) {
    const int groups = state.ard[0].spec.groups;
    rec.ard_alphas.resize(groups, config.L);
    for (int k = 0; k < config.L; ++k) rec.ard_alphas.col(k) = state.ard[k].alphas;
  }
  if (config.schedule.store_params) {
    rec.has_params = true;
    rec.dyn = state.dyn;
    rec.beta = state.trans.beta;
    rec.pi = state.trans.pi;
    rec.R = state.R;
  }
  return rec;
}

std::vector<std::vector<TraceRecord>> run_chains(const ModelConfig& config,
                                                 const Dataset& data, int n_chains,
                                                 std::uint64_t seed, int n_threads) {
  std::vector<std::vector<TraceRecord>> traces(n_chains);
  auto run_one = [&](int c) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(c));
    ChainState state = init_chain_state(config, data, rng);
    auto& trace = traces[c];
    for (int iter = 1; iter <= config.schedule.n_iters; ++iter) {
      SweepOptions opts;
      opts.sequential = config.is_slds() && config.schedule.sequential_due(iter);
      gibbs_sweep(state, config, data, rng, opts);
      if (iter % std::max(1, config.schedule.thinning) == 0) {
        trace.push_back(make_trace_record(state, config, data, iter));
      }
    }
  };

  if (n_threads <= 1 || n_chains <= 1) {
    for (int c = 0; c < n_chains; ++c) run_one(c);
  } else {
    std::vector<std::thread> workers;
    const int used = std::min(n_threads, n_chains);
    for (int w = 0; w < used; ++w) {
      workers.emplace_back([&, w]() {
        for (int c = w; c < n_chains; c += used) run_one(c);
      });
    }
    for (auto& th : workers) th.join();
  }
  return traces;
}

ForwardDraw sample_joint_from_prior(const ModelConfig& config, const Matrix& context,
                                    Eigen::Index T, Rng& rng) {
  ForwardDraw draw;
  draw.data.context = context;
  draw.data.y = Matrix::Zero(config.obs_dim, T);
  draw.state = init_chain_state(config, draw.data, rng);
  resimulate_data(draw.state, config, draw.data, rng);
  return draw;
}

void resimulate_data(const ChainState& state, const ModelConfig& config, Dataset& data,
                     Rng& rng) {
  const Eigen::Index T = data.length();
  if (config.is_slds()) {
    const Matrix c = config.measurement_matrix();
    for (Eigen::Index t = 0; t < T; ++t) {
      const Matrix& r = config.mixture_noise
                            ? state.mix.R[state.mix.labels[t]]
                            : state.R;
      data.y.col(t) = sample_mvn(c * state.x.col(t), r, rng);
    }
    return;
  }
  const int r = config.ar_order;
  const int d = config.obs_dim;
  auto obs = [&](Eigen::Index j) -> Vector {
    if (j >= 1) return data.y.col(j - 1);
    return data.context.col(-j);
  };
  for (Eigen::Index t = 1; t <= T; ++t) {
    const ModeDynamics& dk = state.dyn[state.z[t - 1]];
    Vector mean = Vector::Zero(d);
    if (r > 0) {
      Vector psibar(d * r);
      for (int i = 1; i <= r; ++i) psibar.segment((i - 1) * d, d) = obs(t - i);
      mean = dk.A * psibar;
    }
    if (dk.has_mu()) mean += dk.mu;
    data.y.col(t - 1) = sample_mvn(mean, dk.Sigma, rng);
  }
}

}  // namespace slds
