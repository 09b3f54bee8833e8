// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantities.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "slds/eval.hpp"
#include "slds/geweke.hpp"
#include "slds/gibbs.hpp"
#include "slds/io.hpp"
#include "slds/linalg.hpp"
#include "slds/synthetic.hpp"

using namespace slds;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int criterion, bool pass, const std::string& detail, double seconds) {
  std::printf("[criterion %d] %s — %s (%.1f s)\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str(), seconds);
  std::fflush(stdout);
}

std::vector<ModeDynamics> scalar_ar_modes() {
  std::vector<ModeDynamics> dyn(3);
  dyn[0].A = 0.9 * Matrix::Identity(1, 1);
  dyn[0].Sigma = 0.5 * Matrix::Identity(1, 1);
  dyn[1].A = -0.5 * Matrix::Identity(1, 1);
  dyn[1].Sigma = 1.0 * Matrix::Identity(1, 1);
  dyn[2].A = 0.2 * Matrix::Identity(1, 1);
  dyn[2].Sigma = 2.0 * Matrix::Identity(1, 1);
  return dyn;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_SUITE_BEGIN("acceptance");

TEST_CASE("criterion 1: blocked mode sampler matches exhaustive enumeration") {
  Stopwatch watch;
  const int T = 5, L = 3;
  auto dyn = scalar_ar_modes();

  Matrix pi(L, L);
  pi << 0.80, 0.10, 0.10, 0.15, 0.70, 0.15, 0.10, 0.20, 0.70;
  Vector beta(L);
  beta << 0.5, 0.3, 0.2;
  TransitionSet trans{beta, pi};

  Rng data_rng(20250101);
  Matrix context = Matrix::Constant(1, 1, 0.3);
  IndexVec z_gen = {0, 0, 1, 2, 2};
  Matrix y = simulate_var(dyn, z_gen, context, data_rng);

  PseudoObsRegression reg = ar_regression(y, context, 1, IndexVec(T, 0));
  const Matrix loglik = regression_loglik_table(reg, dyn);
  const Matrix oracle = oracles::enumerate_hmm_marginals(loglik, beta, pi);

  const ModeMessages msg = hmm_backward_messages(loglik, pi);
  Matrix freq = Matrix::Zero(T, L);
  const int n_draws = 200000;
  Rng rng(77);
  for (int i = 0; i < n_draws; ++i) {
    BlockSampleResult res = forward_sample_given_messages(loglik, msg, trans, rng);
    for (int t = 0; t < T; ++t) freq(t, res.z[t]) += 1.0;
  }
  freq /= n_draws;

  double worst_tv = 0.0;
  for (int t = 0; t < T; ++t) {
    worst_tv = std::max(worst_tv, 0.5 * (freq.row(t) - oracle.row(t)).cwiseAbs().sum());
  }
  const bool pass = worst_tv < 0.01;
  report(1, pass,
         "max per-step TV vs enumeration = " + std::to_string(worst_tv) + " (< 0.01)",
         watch.seconds());
  CHECK(pass);
  CHECK(watch.seconds() < 60.0);
}

TEST_CASE("criterion 2: state filters and sampler match the dense joint oracle") {
  Stopwatch watch;
  const int T = 10, n = 2;
  Rng setup(20250202);
  std::vector<ModeDynamics> dyn(2);
  dyn[0].A.resize(n, n);
  dyn[0].A << 0.85 * std::cos(0.4), -0.85 * std::sin(0.4), 0.85 * std::sin(0.4),
      0.85 * std::cos(0.4);
  dyn[0].Sigma = 0.6 * Matrix::Identity(n, n);
  dyn[1].A.resize(n, n);
  dyn[1].A << 0.5, 0.2, -0.1, 0.7;
  dyn[1].Sigma.resize(n, n);
  dyn[1].Sigma << 0.8, 0.2, 0.2, 0.5;
  Matrix c(1, n);
  c << 1.0, 0.0;
  Matrix r = 0.4 * Matrix::Identity(1, 1);
  Matrix p0 = 3.0 * Matrix::Identity(n, n);
  IndexVec z = {0, 0, 1, 1, 0, 1, 0, 0, 1, 1};
  Matrix y(1, T);
  for (int t = 0; t < T; ++t) y(0, t) = 1.5 * std::sin(0.7 * t) + 0.3 * setup.normal();

  MeasurementModel meas = MeasurementModel::shared(c, r);
  BackwardFilterBank back = backward_info_filter(y, z, dyn, meas);
  ForwardFilterBank fwd = forward_info_filter(y, z, dyn, meas, p0);
  oracles::DenseJoint joint = oracles::build_dense_joint(dyn, z, c, r, p0);

  std::vector<Vector> mx(T);
  std::vector<Matrix> px(T);
  mx[0] = Vector::Zero(n);
  px[0] = p0;
  for (int t = 1; t < T; ++t) {
    mx[t] = dyn[z[t]].A * mx[t - 1];
    px[t] = dyn[z[t]].A * px[t - 1] * dyn[z[t]].A.transpose() + dyn[z[t]].Sigma;
  }

  double worst_filter = 0.0;
  for (int t = 0; t < T; ++t) {
    // (a) conditional on future observations only, via the backward message
    if (t + 1 < T) {
      std::vector<int> target = {static_cast<int>(joint.x_index(t, 0)),
                                 static_cast<int>(joint.x_index(t, 1))};
      std::vector<int> given;
      Vector obs(T - t - 1);
      for (int s = t + 1; s < T; ++s) {
        given.push_back(static_cast<int>(joint.y_index(s, 0)));
        obs[s - t - 1] = y(0, s);
      }
      auto [mo, co] = oracles::condition_gaussian(joint.mean, joint.cov, target, given, obs);
      const Matrix prior_info = px[t].inverse();
      auto [mf, cf] = info_to_moment(InformationGaussian(
          prior_info * mx[t] + back.predicted[t].theta, prior_info + back.predicted[t].lambda));
      worst_filter = std::max(worst_filter, (mf - mo).cwiseAbs().maxCoeff());
      worst_filter = std::max(worst_filter, (cf - co).cwiseAbs().maxCoeff());
    }
    // (b) full smoothing marginal via forward updated + backward predicted
    std::vector<int> target = {static_cast<int>(joint.x_index(t, 0)),
                               static_cast<int>(joint.x_index(t, 1))};
    std::vector<int> given;
    Vector obs(T);
    for (int s = 0; s < T; ++s) {
      given.push_back(static_cast<int>(joint.y_index(s, 0)));
      obs[s] = y(0, s);
    }
    auto [mo, co] = oracles::condition_gaussian(joint.mean, joint.cov, target, given, obs);
    auto [mf, cf] = info_to_moment(fwd.updated[t] + back.predicted[t]);
    worst_filter = std::max(worst_filter, (mf - mo).cwiseAbs().maxCoeff());
    worst_filter = std::max(worst_filter, (cf - co).cwiseAbs().maxCoeff());
  }

  // (c) joint draws reproduce the conditional mean and lag-1 cross moment
  std::vector<int> all_x, given;
  Vector obs(T);
  for (int t = 0; t < T; ++t) {
    all_x.push_back(static_cast<int>(joint.x_index(t, 0)));
    all_x.push_back(static_cast<int>(joint.x_index(t, 1)));
    given.push_back(static_cast<int>(joint.y_index(t, 0)));
    obs[t] = y(0, t);
  }
  auto [mo, co] = oracles::condition_gaussian(joint.mean, joint.cov, all_x, given, obs);
  Rng rng(909);
  const int n_draws = 100000;
  Vector mean_acc = Vector::Zero(2 * T);
  double cross_acc = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const Matrix x = forward_sample_states(back, z, dyn, p0, rng);
    for (int t = 0; t < T; ++t) {
      mean_acc[2 * t] += x(0, t);
      mean_acc[2 * t + 1] += x(1, t);
    }
    cross_acc += x(0, 4) * x(0, 5);
  }
  mean_acc /= n_draws;
  bool moments_ok = true;
  for (int j = 0; j < 2 * T; ++j) {
    const double se = std::sqrt(co(j, j) / n_draws);
    if (std::abs(mean_acc[j] - mo[j]) > 3.0 * se + 1e-12) moments_ok = false;
  }
  const int i4 = 8, i5 = 10;
  const double mxm = mo[i4], mym = mo[i5];
  const double vx = co(i4, i4), vy = co(i5, i5), cxy = co(i4, i5);
  const double var_prod =
      mxm * mxm * vy + mym * mym * vx + 2.0 * mxm * mym * cxy + vx * vy + cxy * cxy;
  const double se_cross = std::sqrt(var_prod / n_draws);
  const double cross_target = cxy + mxm * mym;
  if (std::abs(cross_acc / n_draws - cross_target) > 3.0 * se_cross) moments_ok = false;

  const bool pass = worst_filter < 1e-7 && moments_ok;
  report(2, pass,
         "max filter deviation = " + std::to_string(worst_filter) +
             " (< 1e-7), sampled moments within 3 SE: " + (moments_ok ? "yes" : "no"),
         watch.seconds());
  CHECK(pass);
  CHECK(watch.seconds() < 120.0);
}

TEST_CASE("criterion 3: marginalized mode weights equal Kalman likelihoods up to a constant") {
  Stopwatch watch;
  const int T = 8, L = 3, n = 2;
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    Rng rng(3000 + instance);
    std::vector<ModeDynamics> dyn(L);
    for (int k = 0; k < L; ++k) {
      const double angle = rng.uniform() * 1.2;
      const double scale = 0.5 + 0.45 * rng.uniform();
      dyn[k].A.resize(n, n);
      dyn[k].A << scale * std::cos(angle), -scale * std::sin(angle),
          scale * std::sin(angle), scale * std::cos(angle);
      Matrix half = rng.normal_matrix(n, n);
      dyn[k].Sigma = 0.3 * Matrix::Identity(n, n) + 0.2 * half * half.transpose();
      dyn[k].mu = 0.4 * rng.normal_vector(n);
    }
    Matrix c(1, n);
    c << 1.0, 0.0;
    Matrix r = (0.2 + rng.uniform()) * Matrix::Identity(1, 1);
    Matrix p0 = 2.0 * Matrix::Identity(n, n);
    Matrix y = rng.normal_matrix(1, T);
    IndexVec z(T);
    for (int t = 0; t < T; ++t) z[t] = rng.uniform_int(0, L - 1);

    const Matrix logf =
        sequential_log_f_table(y, z, dyn, MeasurementModel::shared(c, r), p0);
    for (int t = 0; t < T; ++t) {
      Vector direct(L);
      for (int k = 0; k < L; ++k) {
        IndexVec zk = z;
        zk[t] = k;
        direct[k] = oracles::kalman_loglik_oracle(y, zk, dyn, c, r, p0);
      }
      const Vector diff = logf.row(t).transpose() - direct;
      worst = std::max(worst, diff.maxCoeff() - diff.minCoeff());
    }
  }
  const bool pass = worst < 1e-6;
  report(3, pass,
         "max k-dependence of (log f_k - log Kalman) over 100 instances = " +
             std::to_string(worst) + " (< 1e-6)",
         watch.seconds());
  CHECK(pass);
  CHECK(watch.seconds() < 60.0);
}

TEST_CASE("criterion 4: conjugacy oracles for every prior family") {
  Stopwatch watch;
  bool pass = true;
  std::string detail;

  // (a) MNIW joint posterior against the grid oracle.
  {
    MniwHyper h;
    h.M = Matrix::Zero(1, 1);
    h.K = Matrix::Identity(1, 1);
    h.n0 = 3.0;
    h.S0 = Matrix::Identity(1, 1);
    Rng data_rng(404);
    const int n = 12;
    std::vector<double> psibar(n), psi(n);
    for (int i = 0; i < n; ++i) {
      psibar[i] = data_rng.normal();
      psi[i] = 0.7 * psibar[i] + 0.8 * data_rng.normal();
    }
    PseudoObsRegression reg;
    reg.psi.resize(1, n);
    reg.psibar.resize(1, n);
    reg.assignments.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      reg.psi(0, i) = psi[i];
      reg.psibar(0, i) = psibar[i];
    }
    MniwStats stats = mniw_sufficient_stats(reg, 0, h);
    Rng rng(405);
    std::vector<std::pair<double, double>> draws;
    for (int i = 0; i < 200000; ++i) {
      ModeDynamics d = sample_mniw_posterior(stats, h, rng);
      draws.emplace_back(d.A(0, 0), d.Sigma(0, 0));
    }
    auto log_density = [&](double a, double sigma) {
      if (sigma <= 0.0) return -1e300;
      double lp = -0.5 * std::log(2.0 * M_PI * sigma) - 0.5 * (a * a) / sigma;
      lp += -(0.5 * h.n0 + 1.0) * std::log(sigma) - 0.5 / sigma;
      for (int i = 0; i < n; ++i) {
        const double res = psi[i] - a * psibar[i];
        lp += -0.5 * std::log(2.0 * M_PI * sigma) - 0.5 * res * res / sigma;
      }
      return lp;
    };
    double a_lo = 1e18, a_hi = -1e18, s_lo = 1e18, s_hi = -1e18;
    for (auto& [a, s] : draws) {
      a_lo = std::min(a_lo, a);
      a_hi = std::max(a_hi, a);
      s_lo = std::min(s_lo, s);
      s_hi = std::max(s_hi, s);
    }
    const double tv = oracles::grid_tv_2d(draws, log_density, a_lo - 0.05, a_hi + 0.05,
                                          std::max(1e-6, 0.9 * s_lo), s_hi + 0.1, 12, 12);
    pass = pass && tv < 0.02;
    detail += "MNIW grid TV=" + std::to_string(tv);
  }

  // (b) ARD conditional mean against dense ridge normal equations.
  {
    Rng data_rng(406);
    const int n = 2, T = 50;
    PseudoObsRegression reg;
    reg.psi.resize(n, T);
    reg.psibar.resize(n, T);
    reg.assignments.assign(T, 0);
    for (int t = 0; t < T; ++t) {
      reg.psibar.col(t) = data_rng.normal_vector(n);
      reg.psi.col(t) = data_rng.normal_vector(n);
    }
    Matrix sigma(n, n);
    sigma << 1.1, -0.3, -0.3, 0.7;
    ArdState ard = ard_state_from_spec(ard_spec_for_slds(n), data_rng);
    ard.alphas << 3.0, 0.4;
    const auto sums = accumulate_mode_sums(reg, 1);
    auto [mean, cov] = info_to_moment(vec_a_conditional(
        sums[0], sigma, std::nullopt, Vector::Zero(n * n),
        Matrix(ard_prior_precision_diagonal(ard).asDiagonal())));
    Matrix lambda = Matrix(ard_prior_precision_diagonal(ard).asDiagonal());
    Vector rhs = Vector::Zero(n * n);
    const Matrix sigma_inv = sigma.inverse();
    for (int t = 0; t < T; ++t) {
      Matrix design = Matrix::Zero(n, n * n);
      for (int j = 0; j < n; ++j) {
        design.block(0, j * n, n, n) = reg.psibar(j, t) * Matrix::Identity(n, n);
      }
      lambda += design.transpose() * sigma_inv * design;
      rhs += design.transpose() * sigma_inv * reg.psi.col(t);
    }
    const double err =
        (mean - lambda.fullPivLu().solve(rhs)).cwiseAbs().maxCoeff();
    pass = pass && err < 1e-8;
    detail += ", ARD ridge err=" + std::to_string(err);
  }

  // (c) shared-A conditional mean against weighted least squares.
  {
    Rng data_rng(407);
    const int T = 60;
    PseudoObsRegression reg;
    reg.psi.resize(1, T);
    reg.psibar.resize(1, T);
    reg.assignments.resize(T);
    for (int t = 0; t < T; ++t) {
      reg.assignments[t] = t % 2;
      reg.psibar(0, t) = data_rng.normal();
      reg.psi(0, t) = 0.8 * reg.psibar(0, t) + 0.3 * data_rng.normal();
    }
    const auto sums = accumulate_mode_sums(reg, 2);
    std::vector<ModeDynamics> dyn(2);
    dyn[0].Sigma = 0.25 * Matrix::Identity(1, 1);
    dyn[1].Sigma = 4.0 * Matrix::Identity(1, 1);
    NiwnHyper hyper;
    hyper.m_A = Vector::Zero(1);
    hyper.Sigma_A = 10.0 * Matrix::Identity(1, 1);
    hyper.n0 = 3.0;
    hyper.S0 = Matrix::Identity(1, 1);
    hyper.mu0 = Vector::Zero(1);
    hyper.Sigma0 = Matrix::Identity(1, 1);
    auto [mean, cov] = info_to_moment(shared_A_conditional(sums, dyn, hyper));
    double num = 0.0, den = 0.1;
    for (int t = 0; t < T; ++t) {
      const double w = reg.assignments[t] == 0 ? 4.0 : 0.25;
      num += w * reg.psibar(0, t) * reg.psi(0, t);
      den += w * reg.psibar(0, t) * reg.psibar(0, t);
    }
    const double err = std::abs(mean[0] - num / den);
    pass = pass && err < 1e-8;
    detail += ", N-IW-N weighted-LS err=" + std::to_string(err);
  }

  // (d) zero-data conditionals reproduce the priors (KS, scalar projections).
  {
    Rng rng(408);
    bool ks_ok = true;
    // MNIW
    {
      MniwHyper h;
      h.M = 0.3 * Matrix::Ones(1, 1);
      h.K = 2.0 * Matrix::Identity(1, 1);
      h.n0 = 4.0;
      h.S0 = 1.5 * Matrix::Identity(1, 1);
      PseudoObsRegression empty;
      empty.psi = Matrix::Zero(1, 0);
      empty.psibar = Matrix::Zero(1, 0);
      MniwStats stats = mniw_sufficient_stats(empty, 0, h);
      std::vector<double> a_post, a_prior;
      for (int i = 0; i < 10000; ++i) {
        a_post.push_back(sample_mniw_posterior(stats, h, rng).A(0, 0));
        const Matrix sig = sample_inverse_wishart({h.n0, h.S0}, rng);
        a_prior.push_back(
            sample_matrix_normal({h.M, spd_inverse(h.K, "t"), sig}, rng)(0, 0));
      }
      ks_ok = ks_ok && oracles::ks_two_sample_pvalue(a_post, a_prior) > 1e-3;
    }
    // ARD conditional with empty sums
    {
      ArdState ard = ard_state_from_spec(ard_spec_for_var(1, 2), rng);
      ard.alphas << 1.5, 6.0;
      ModeSums sums;
      sums.S_bb = Matrix::Zero(2, 2);
      sums.S_pb = Matrix::Zero(1, 2);
      sums.S_pp = Matrix::Zero(1, 1);
      sums.sum_psi = Vector::Zero(1);
      sums.sum_psibar = Vector::Zero(2);
      std::vector<double> post, prior;
      for (int i = 0; i < 10000; ++i) {
        post.push_back(
            sample_ard_dynamic_matrix(sums, Matrix::Identity(1, 1), ard, std::nullopt,
                                      rng)(0, 1));
        prior.push_back(rng.normal() / std::sqrt(6.0));
      }
      ks_ok = ks_ok && oracles::ks_two_sample_pvalue(post, prior) > 1e-3;
    }
    // N-IW-N process mean with no data
    {
      ModeSums sums;
      sums.S_bb = Matrix::Zero(1, 1);
      sums.S_pb = Matrix::Zero(1, 1);
      sums.S_pp = Matrix::Zero(1, 1);
      sums.sum_psi = Vector::Zero(1);
      sums.sum_psibar = Vector::Zero(1);
      std::vector<double> post, prior;
      for (int i = 0; i < 10000; ++i) {
        post.push_back(sample_process_mean(sums, Matrix::Zero(1, 1),
                                           Matrix::Identity(1, 1), Vector::Constant(1, 0.7),
                                           3.0 * Matrix::Identity(1, 1), rng)[0]);
        prior.push_back(0.7 + std::sqrt(3.0) * rng.normal());
      }
      ks_ok = ks_ok && oracles::ks_two_sample_pvalue(post, prior) > 1e-3;
    }
    pass = pass && ks_ok;
    detail += std::string(", prior-recovery KS: ") + (ks_ok ? "ok" : "reject");
  }

  report(4, pass, detail, watch.seconds());
  CHECK(pass);
  CHECK(watch.seconds() < 120.0);
}

TEST_CASE("criterion 5: joint-distribution test detects a broken kernel and passes intact") {
  Stopwatch watch;
  ModelConfig config;
  config.family = ModelFamily::Ar;
  config.prior = PriorFamily::Mniw;
  config.obs_dim = 1;
  config.ar_order = 1;
  config.L = 3;
  MniwHyper h;
  h.M = Matrix::Zero(1, 1);
  h.K = Matrix::Identity(1, 1);
  h.n0 = 3.0;
  h.S0 = 0.75 * Matrix::Identity(1, 1);
  config.mniw = h;
  config.schedule.sequential_period = 0;

  GewekeOptions options;
  options.n_samples = 100000;
  options.T = 20;
  options.seed = 505;
  GewekeResult intact = geweke_joint_test(config, options);

  GewekeOptions broken = options;
  broken.disable_beta_update = true;
  broken.seed = 506;
  GewekeResult mutated = geweke_joint_test(config, broken);

  const bool intact_ok = intact.max_abs_z() < 4.0;
  const bool mutation_detected = mutated.max_abs_z() > 10.0;
  const bool pass = intact_ok && mutation_detected;
  std::string zs;
  for (int i = 0; i < intact.z_scores.size(); ++i) {
    zs += intact.names[i] + "=" + std::to_string(intact.z_scores[i]) + " ";
  }
  report(5, pass,
         "intact |z|: " + zs + "(all < 4); mutated max |z| = " +
             std::to_string(mutated.max_abs_z()) + " (> 10)",
         watch.seconds());
  CHECK(pass);
  CHECK(watch.seconds() < 600.0);
}

TEST_CASE("criterion 6: five-mode switching VAR recovery beats the first-difference baseline") {
  Stopwatch watch;
  const Eigen::Index T = 1000;
  SyntheticData data = generate_synthetic(Scenario::Var1FiveMode, T, 606);

  ModelConfig var_config;
  var_config.family = ModelFamily::Ar;
  var_config.prior = PriorFamily::Mniw;
  var_config.obs_dim = 3;
  var_config.ar_order = 1;
  var_config.L = 20;
  set_hyperparameters_from_data(var_config, data.y);
  var_config.schedule.n_iters = 1000;
  Dataset var_ds{data.y, data.context};
  auto var_traces = run_chains(var_config, var_ds, 10, 6001, 1);

  std::vector<double> var_hamming;
  std::vector<TraceRecord> var_post;
  for (const auto& chain : var_traces) {
    for (std::size_t i = chain.size() / 2; i < chain.size(); ++i) {
      var_hamming.push_back(hamming_with_optimal_mapping(chain[i].z, data.z_true));
      var_post.push_back(chain[i]);
    }
  }
  const double var_median = median(var_hamming);
  // The active-mode histogram should peak at the generating mode count.
  auto mode_hist = mode_count_summary(var_post);
  int modal_count = 0, modal_freq = -1;
  for (const auto& [modes, freq] : mode_hist) {
    if (freq > modal_freq) {
      modal_freq = freq;
      modal_count = modes;
    }
  }

  // Baseline: sticky emissions model on first differences (order-0 family,
  // mode-specific mean and covariance).
  const Matrix diff = first_differences(data.y);
  IndexVec truth_diff(data.z_true.begin() + 1, data.z_true.end());
  ModelConfig base_config;
  base_config.family = ModelFamily::Ar;
  base_config.prior = PriorFamily::Niwn;
  base_config.obs_dim = 3;
  base_config.ar_order = 0;
  base_config.L = 20;
  base_config.process_mean = true;
  set_hyperparameters_from_data(base_config, diff);
  base_config.schedule.n_iters = 1000;
  Dataset base_ds{diff, Matrix::Zero(3, 0)};
  auto base_traces = run_chains(base_config, base_ds, 10, 6002, 1);

  std::vector<double> base_hamming;
  for (const auto& chain : base_traces) {
    for (std::size_t i = chain.size() / 2; i < chain.size(); ++i) {
      base_hamming.push_back(hamming_with_optimal_mapping(chain[i].z, truth_diff));
    }
  }
  const double base_median = median(base_hamming);

  const bool pass = var_median <= 0.15 && var_median < base_median && modal_count == 5;
  report(6, pass,
         "median Hamming: switching VAR = " + std::to_string(var_median) +
             " (<= 0.15), first-difference baseline = " + std::to_string(base_median) +
             "; modal active-mode count = " + std::to_string(modal_count),
         watch.seconds());
  CHECK(pass);
  CHECK(watch.seconds() < 1800.0);
}

TEST_CASE("criterion 7: ARD separates null columns and does not trail the conjugate prior") {
  Stopwatch watch;
  const Eigen::Index T = 1000;
  SyntheticData data = generate_synthetic(Scenario::SldsSparseTwoMode, T, 707);
  Dataset ds{data.y, Matrix::Zero(2, 0)};

  ModelConfig ard_config;
  ard_config.family = ModelFamily::Slds;
  ard_config.prior = PriorFamily::Ard;
  ard_config.obs_dim = 2;
  ard_config.state_dim = 3;
  ard_config.L = 20;
  set_hyperparameters_from_data(ard_config, data.y);
  ard_config.schedule.n_iters = 1000;
  const int n_chains = 4;
  auto ard_traces = run_chains(ard_config, ds, n_chains, 7001, 1);

  // Null and active column groups of the two generating modes (the second
  // mode in its equivalent sparse realization).
  const std::vector<std::vector<int>> null_cols = {{2}, {1, 2}};
  const std::vector<std::vector<int>> active_cols = {{0, 1}, {0}};

  int separated = 0, considered = 0;
  std::vector<double> ard_hamming;
  for (const auto& chain : ard_traces) {
    for (std::size_t i = chain.size() / 2; i < chain.size(); ++i) {
      const TraceRecord& rec = chain[i];
      ard_hamming.push_back(hamming_with_optimal_mapping(rec.z, data.z_true));
      LabelMapping map = optimal_label_mapping(rec.z, data.z_true);
      // Estimated label serving each true mode.
      int est_for_true[2] = {-1, -1};
      for (const auto& [est, tru] : map.mapping) {
        if (tru >= 0 && tru < 2) est_for_true[tru] = est;
      }
      ++considered;
      bool ok = est_for_true[0] >= 0 && est_for_true[1] >= 0;
      for (int mode = 0; mode < 2 && ok; ++mode) {
        const Vector alphas = rec.ard_alphas.col(est_for_true[mode]);
        double min_null = 1e300, max_active = 0.0;
        for (int g : null_cols[mode]) min_null = std::min(min_null, alphas[g]);
        for (int g : active_cols[mode]) max_active = std::max(max_active, alphas[g]);
        ok = min_null >= 10.0 * max_active;
      }
      if (ok) ++separated;
    }
  }
  const double sep_frac = static_cast<double>(separated) / considered;
  const double ard_median = median(ard_hamming);

  ModelConfig mniw_config;
  mniw_config.family = ModelFamily::Slds;
  mniw_config.prior = PriorFamily::Mniw;
  mniw_config.obs_dim = 2;
  mniw_config.state_dim = 3;
  mniw_config.L = 20;
  set_hyperparameters_from_data(mniw_config, data.y);
  mniw_config.schedule.n_iters = 1000;
  auto mniw_traces = run_chains(mniw_config, ds, n_chains, 7002, 1);
  std::vector<double> mniw_hamming;
  for (const auto& chain : mniw_traces) {
    for (std::size_t i = chain.size() / 2; i < chain.size(); ++i) {
      mniw_hamming.push_back(hamming_with_optimal_mapping(chain[i].z, data.z_true));
    }
  }
  const double mniw_median = median(mniw_hamming);

  const bool pass = sep_frac >= 0.9 && ard_median <= mniw_median;
  report(7, pass,
         "precision separation in " + std::to_string(sep_frac * 100.0) +
             "% of samples (>= 90%); median Hamming ARD = " + std::to_string(ard_median) +
             " vs MNIW = " + std::to_string(mniw_median),
         watch.seconds());
  CHECK(pass);
  CHECK(watch.seconds() < 2700.0);
}

TEST_CASE("criterion 8: the sticky prior wins the change-point ROC comparison") {
  Stopwatch watch;
  const Eigen::Index T = 600;
  SyntheticData data = generate_synthetic(Scenario::MssvSwitchingMean, T, 808);
  Dataset ds{data.y, Matrix::Zero(1, 0)};
  const std::vector<int> events = change_points(data.z_true);

  auto fit_auc = [&](bool sticky, std::uint64_t seed) {
    ModelConfig config;
    config.family = ModelFamily::SldsSharedA;
    config.prior = PriorFamily::Niwn;
    config.obs_dim = 1;
    config.state_dim = 1;
    config.L = 10;
    config.process_mean = true;
    config.hdp_priors.sticky = sticky;
    set_hyperparameters_from_data(config, data.y);
    config.schedule.n_iters = 800;
    auto traces = run_chains(config, ds, 3, seed, 1);
    std::vector<IndexVec> samples;
    for (const auto& chain : traces) {
      for (std::size_t i = chain.size() / 2; i < chain.size(); ++i) {
        samples.push_back(chain[i].z);
      }
    }
    return changepoint_roc(samples, events, 20).auc;
  };

  const double auc_sticky = fit_auc(true, 8001);
  const double auc_plain = fit_auc(false, 8002);
  const bool pass = auc_sticky > auc_plain;
  report(8, pass,
         "windowed ROC AUC: sticky = " + std::to_string(auc_sticky) +
             ", non-sticky = " + std::to_string(auc_plain),
         watch.seconds());
  CHECK(pass);
  CHECK(watch.seconds() < 1200.0);
}

TEST_CASE("criterion 9: module invariants hold end to end") {
  Stopwatch watch;
  bool pass = true;
  std::string detail;

  // Simplex/PD invariants across live sweeps of an SLDS chain.
  {
    SyntheticData data = generate_synthetic(Scenario::SldsThreeMode, 120, 909);
    ModelConfig config;
    config.family = ModelFamily::Slds;
    config.prior = PriorFamily::Mniw;
    config.obs_dim = 3;
    config.state_dim = 3;
    config.L = 6;
    set_hyperparameters_from_data(config, data.y);
    Dataset ds{data.y, Matrix::Zero(3, 0)};
    Rng rng(910);
    ChainState state = init_chain_state(config, ds, rng);
    bool ok = true;
    for (int i = 0; i < 10; ++i) {
      SweepOptions opts;
      opts.sequential = (i % 3 == 2);
      gibbs_sweep(state, config, ds, rng, opts);
      state.trans.validate();
      ok = ok && is_simplex(state.trans.beta);
      for (int k = 0; k < config.L; ++k) {
        ok = ok && is_positive_definite(state.dyn[k].Sigma);
      }
      ok = ok && is_positive_definite(state.R);
      ok = ok && std::isfinite(log_joint(state, config, ds));
    }
    pass = pass && ok;
    detail += std::string("simplex/PD chain: ") + (ok ? "ok" : "violated");
  }

  // Normalization invariance of the blocked sampler.
  {
    Rng data_rng(911);
    const int T = 40, L = 3;
    Matrix loglik(T, L);
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < L; ++k) loglik(t, k) = -std::abs(data_rng.normal());
    }
    Matrix pi = Matrix::Constant(L, L, 0.15);
    pi.diagonal().setConstant(0.7);
    TransitionSet trans{Vector::Constant(L, 1.0 / L), pi};
    ModeMessages msg = hmm_backward_messages(loglik, pi);
    ModeMessages scaled = msg;
    scaled.log_m.row(11).array() += 2.5;
    scaled.log_m.row(29).array() -= 4.0;
    Rng a(912), b(912);
    const bool ok = forward_sample_given_messages(loglik, msg, trans, a).z ==
                    forward_sample_given_messages(loglik, scaled, trans, b).z;
    pass = pass && ok;
    detail += std::string(", normalization invariance: ") + (ok ? "ok" : "violated");
  }

  // Mode relabeling equivariance of the likelihood table and messages.
  {
    Rng rng(913);
    std::vector<ModeDynamics> dyn(3);
    for (int k = 0; k < 3; ++k) {
      dyn[k].A = (0.3 * k - 0.2) * Matrix::Identity(1, 1);
      dyn[k].Sigma = (0.5 + 0.4 * k) * Matrix::Identity(1, 1);
    }
    PseudoObsRegression reg;
    reg.psi = rng.normal_matrix(1, 10);
    reg.psibar = rng.normal_matrix(1, 10);
    reg.assignments.assign(10, 0);
    const std::vector<int> perm = {1, 2, 0};
    std::vector<ModeDynamics> dyn_p(3);
    for (int k = 0; k < 3; ++k) dyn_p[perm[k]] = dyn[k];
    const Matrix t1 = regression_loglik_table(reg, dyn);
    const Matrix t2 = regression_loglik_table(reg, dyn_p);
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
      ok = ok && (t1.col(k) - t2.col(perm[k])).cwiseAbs().maxCoeff() < 1e-12;
    }
    pass = pass && ok;
    detail += std::string(", relabeling equivariance: ") + (ok ? "ok" : "violated");
  }

  // Hamming pseudo-metric properties.
  {
    Rng rng(914);
    bool ok = true;
    for (int rep = 0; rep < 20; ++rep) {
      IndexVec a(25), b(25);
      for (int t = 0; t < 25; ++t) {
        a[t] = rng.uniform_int(0, 3);
        b[t] = rng.uniform_int(0, 2);
      }
      const double d = hamming_with_optimal_mapping(a, b);
      ok = ok && d >= 0.0 && d <= 1.0;
      ok = ok && hamming_with_optimal_mapping(a, a) == 0.0;
      IndexVec a2 = a;
      for (int& v : a2) v = 2 * v + 5;
      ok = ok && std::abs(hamming_with_optimal_mapping(a2, b) - d) < 1e-12;
    }
    pass = pass && ok;
    detail += std::string(", hamming pseudo-metric: ") + (ok ? "ok" : "violated");
  }

  // Round-trip I/O.
  {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "slds_acceptance_io";
    fs::create_directories(dir);
    Rng rng(915);
    Matrix y = rng.normal_matrix(2, 33);
    write_matrix_csv(dir / "y.csv", y);
    bool ok = (read_matrix_csv(dir / "y.csv") - y).cwiseAbs().maxCoeff() == 0.0;
    IndexVec z = {0, 3, 1, 1, 2};
    write_labels_csv(dir / "z.csv", z);
    ok = ok && read_labels_csv(dir / "z.csv") == z;
    TraceRecord rec;
    rec.iteration = 4;
    rec.z = z;
    rec.active_modes = 4;
    rec.log_joint = -12.25;
    write_trace_jsonl(dir / "t.jsonl", 0, {rec});
    auto back = read_trace_jsonl(dir / "t.jsonl");
    ok = ok && back.size() == 1 && back[0].z == z && back[0].log_joint == -12.25;
    pass = pass && ok;
    detail += std::string(", io round-trip: ") + (ok ? "ok" : "violated");
  }

  report(9, pass, detail, watch.seconds());
  CHECK(pass);
  CHECK(watch.seconds() < 300.0);
}

TEST_SUITE_END();
