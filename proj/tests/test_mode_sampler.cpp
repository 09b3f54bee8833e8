#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "slds/linalg.hpp"
#include "slds/mode_sampler.hpp"

using namespace slds;

namespace {

TransitionSet make_transitions(const Matrix& pi, const Vector& beta) {
  TransitionSet t;
  t.pi = pi;
  t.beta = beta;
  return t;
}

std::vector<ModeDynamics> scalar_modes(const std::vector<double>& a,
                                       const std::vector<double>& sigma) {
  std::vector<ModeDynamics> dyn;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ModeDynamics d;
    d.A = a[k] * Matrix::Identity(1, 1);
    d.Sigma = sigma[k] * Matrix::Identity(1, 1);
    dyn.push_back(d);
  }
  return dyn;
}

}  // namespace

TEST_SUITE_BEGIN("mode_sampler");

TEST_CASE("backward messages") {
  SUBCASE("uniform likelihoods and transitions give uniform messages") {
    const int T = 6, L = 3;
    Matrix loglik = Matrix::Constant(T, L, -1.7);
    Matrix pi = Matrix::Constant(L, L, 1.0 / L);
    ModeMessages msg = hmm_backward_messages(loglik, pi);
    for (int t = 0; t < T; ++t) {
      CHECK((msg.log_m.row(t).maxCoeff() - msg.log_m.row(t).minCoeff()) < 1e-13);
    }
  }
  SUBCASE("single step has unit messages") {
    Matrix loglik = Matrix::Constant(1, 2, -0.3);
    Matrix pi = Matrix::Constant(2, 2, 0.5);
    ModeMessages msg = hmm_backward_messages(loglik, pi);
    CHECK(msg.log_m.row(0).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("random instance matches path enumeration within 1e-10") {
    Rng rng(2001);
    const int T = 4, L = 2;
    Matrix loglik(T, L);
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < L; ++k) loglik(t, k) = -0.5 * std::abs(rng.normal());
    }
    Matrix pi(L, L);
    pi << 0.7, 0.3, 0.4, 0.6;
    ModeMessages msg = hmm_backward_messages(loglik, pi);
    const Matrix oracle = oracles::enumerate_backward_messages(loglik, pi);
    for (int t = 0; t < T; ++t) {
      // Compare after normalizing both to unit sum.
      Vector ours = msg.log_m.row(t).array().exp();
      ours /= ours.sum();
      Vector ref = oracle.row(t);
      ref /= ref.sum();
      CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("blocked sampling basics") {
  Rng rng(2002);
  SUBCASE("single mode always returns mode zero") {
    Matrix loglik = Matrix::Constant(5, 1, -0.9);
    TransitionSet trans = make_transitions(Matrix::Ones(1, 1), Vector::Ones(1));
    BlockSampleResult res = block_sample_modes(loglik, trans, rng);
    for (int v : res.z) CHECK(v == 0);
    CHECK(res.counts(0, 0) == 4);
  }
  SUBCASE("identical dynamics leave the posterior at the transition prior") {
    const int T = 5, L = 2;
    Matrix loglik = Matrix::Zero(T, L);
    Rng data_rng(2003);
    for (int t = 0; t < T; ++t) {
      const double v = data_rng.normal();
      loglik(t, 0) = v;
      loglik(t, 1) = v;  // modes indistinguishable
    }
    Matrix pi(L, L);
    pi << 0.9, 0.1, 0.2, 0.8;
    Vector beta(L);
    beta << 0.6, 0.4;
    TransitionSet trans = make_transitions(pi, beta);
    const Matrix flat = Matrix::Zero(T, L);
    const Matrix oracle = oracles::enumerate_hmm_marginals(flat, beta, pi);
    Matrix freq = Matrix::Zero(T, L);
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
      BlockSampleResult res = block_sample_modes(loglik, trans, rng);
      for (int t = 0; t < T; ++t) freq(t, res.z[t]) += 1.0;
    }
    freq /= n;
    for (int t = 0; t < T; ++t) {
      CHECK(0.5 * (freq.row(t) - oracle.row(t)).cwiseAbs().sum() < 0.02);
    }
  }
  SUBCASE("marginals match exhaustive enumeration") {
    const int T = 5, L = 3;
    Rng data_rng(2004);
    Matrix loglik(T, L);
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < L; ++k) loglik(t, k) = -1.5 * std::abs(data_rng.normal());
    }
    Matrix pi(L, L);
    pi << 0.8, 0.1, 0.1, 0.15, 0.7, 0.15, 0.05, 0.25, 0.7;
    Vector beta(L);
    beta << 0.5, 0.3, 0.2;
    TransitionSet trans = make_transitions(pi, beta);
    const Matrix oracle = oracles::enumerate_hmm_marginals(loglik, beta, pi);
    Matrix freq = Matrix::Zero(T, L);
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
      BlockSampleResult res = block_sample_modes(loglik, trans, rng);
      for (int t = 0; t < T; ++t) freq(t, res.z[t]) += 1.0;
    }
    freq /= n;
    for (int t = 0; t < T; ++t) {
      CHECK(0.5 * (freq.row(t) - oracle.row(t)).cwiseAbs().sum() < 0.02);
    }
  }
}

TEST_CASE("normalization invariance: rescaled messages give identical draws") {
  const int T = 30, L = 4;
  Rng data_rng(2005);
  Matrix loglik(T, L);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < L; ++k) loglik(t, k) = -0.5 * std::abs(data_rng.normal());
  }
  Matrix pi = Matrix::Constant(L, L, 0.1);
  pi.diagonal().setConstant(0.7);
  Vector beta = Vector::Constant(L, 0.25);
  TransitionSet trans = make_transitions(pi, beta);
  ModeMessages msg = hmm_backward_messages(loglik, trans.pi);
  ModeMessages scaled = msg;
  scaled.log_m.row(7).array() += std::log(3.7);
  scaled.log_m.row(20).array() += std::log(0.004);

  Rng a(555), b(555);
  BlockSampleResult ra = forward_sample_given_messages(loglik, msg, trans, a);
  BlockSampleResult rb = forward_sample_given_messages(loglik, scaled, trans, b);
  CHECK(ra.z == rb.z);
}

TEST_CASE("mode relabeling equivariance of tables, messages, and weights") {
  const int T = 12;
  Rng rng(2006);
  auto dyn = scalar_modes({0.9, -0.4, 0.3}, {0.5, 1.0, 2.0});
  PseudoObsRegression reg;
  reg.psi = rng.normal_matrix(1, T);
  reg.psibar = rng.normal_matrix(1, T);
  reg.assignments.assign(T, 0);

  const std::vector<int> perm = {2, 0, 1};  // new index of each old mode
  std::vector<ModeDynamics> dyn_p(3);
  for (int k = 0; k < 3; ++k) dyn_p[perm[k]] = dyn[k];

  const Matrix table = regression_loglik_table(reg, dyn);
  const Matrix table_p = regression_loglik_table(reg, dyn_p);
  for (int k = 0; k < 3; ++k) {
    CHECK((table.col(k) - table_p.col(perm[k])).cwiseAbs().maxCoeff() < 1e-12);
  }

  Matrix pi(3, 3);
  pi << 0.8, 0.1, 0.1, 0.2, 0.6, 0.2, 0.3, 0.3, 0.4;
  Matrix pi_p(3, 3);
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) pi_p(perm[j], perm[k]) = pi(j, k);
  }
  ModeMessages msg = hmm_backward_messages(table, pi);
  ModeMessages msg_p = hmm_backward_messages(table_p, pi_p);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < 3; ++k) {
      CHECK(msg.log_m(t, k) == doctest::Approx(msg_p.log_m(t, perm[k])).epsilon(1e-12));
    }
  }
}

TEST_CASE("supervision masks pin the labels") {
  Rng rng(2007);
  const int T = 10, L = 3;
  Matrix loglik = Matrix::Zero(T, L);
  IndexVec fixed(T, -1);
  fixed[2] = 1;
  fixed[7] = 2;
  apply_supervision_mask(loglik, fixed);
  Matrix pi = Matrix::Constant(L, L, 1.0 / 3.0);
  TransitionSet trans = make_transitions(pi, Vector::Constant(L, 1.0 / 3.0));
  for (int i = 0; i < 50; ++i) {
    BlockSampleResult res = block_sample_modes(loglik, trans, rng);
    CHECK(res.z[2] == 1);
    CHECK(res.z[7] == 2);
  }
}

TEST_CASE("non-finite likelihood reports the failing step and mode") {
  auto dyn = scalar_modes({0.5}, {1.0});
  PseudoObsRegression reg;
  reg.psi = Matrix::Zero(1, 3);
  reg.psi(0, 2) = std::numeric_limits<double>::quiet_NaN();
  reg.psibar = Matrix::Zero(1, 3);
  reg.assignments.assign(3, 0);
  CHECK_THROWS_WITH_AS(regression_loglik_table(reg, dyn),
                       doctest::Contains("t=3"), NumericalError);
}

TEST_CASE("sequential marginalized sampler") {
  SUBCASE("single mode leaves the sequence unchanged") {
    const int T = 7;
    Rng rng(2008);
    ModeDynamics d;
    d.A = 0.8 * Matrix::Identity(1, 1);
    d.Sigma = Matrix::Identity(1, 1);
    Matrix c = Matrix::Identity(1, 1);
    Matrix r = Matrix::Identity(1, 1);
    Matrix y = rng.normal_matrix(1, T);
    TransitionSet trans = make_transitions(Matrix::Ones(1, 1), Vector::Ones(1));
    IndexVec z(T, 0);
    IndexVec out = sequential_sample_modes_marginalized(
        y, z, trans, {d}, MeasurementModel::shared(c, r), Matrix::Identity(1, 1), rng);
    CHECK(out == z);
  }
  SUBCASE("log weights equal full-sequence kalman likelihoods up to a constant") {
    const int T = 8, L = 3, n = 2;
    Rng rng(2009);
    std::vector<ModeDynamics> dyn;
    for (int k = 0; k < L; ++k) {
      ModeDynamics d;
      const double angle = 0.2 + 0.45 * k;
      const double scale = 0.9 - 0.12 * k;
      d.A.resize(n, n);
      d.A << scale * std::cos(angle), -scale * std::sin(angle),
          scale * std::sin(angle), scale * std::cos(angle);
      Matrix half = rng.normal_matrix(n, n);
      d.Sigma = 0.5 * Matrix::Identity(n, n) + 0.1 * half * half.transpose();
      d.mu = 0.3 * rng.normal_vector(n);
      dyn.push_back(d);
    }
    Matrix c(1, n);
    c << 1.0, 0.0;
    Matrix r = 0.4 * Matrix::Identity(1, 1);
    Matrix p0 = 2.5 * Matrix::Identity(n, n);
    Matrix y = rng.normal_matrix(1, T);
    IndexVec z = {0, 1, 1, 2, 0, 0, 2, 1};
    MeasurementModel meas = MeasurementModel::shared(c, r);

    const Matrix logf = sequential_log_f_table(y, z, dyn, meas, p0);
    for (int t = 0; t < T; ++t) {
      Vector direct(L);
      for (int k = 0; k < L; ++k) {
        IndexVec zk = z;
        zk[t] = k;
        direct[k] = oracles::kalman_loglik_oracle(y, zk, dyn, c, r, p0);
      }
      // The weights and the likelihoods must differ by a k-independent shift.
      const Vector diff = logf.row(t).transpose() - direct;
      CHECK(diff.maxCoeff() - diff.minCoeff() < 1e-6);
    }
  }
  SUBCASE("uninformative observations reduce the weights to the prior factors") {
    const int T = 6, L = 2, n = 2;
    Rng rng(2010);
    auto dyn = std::vector<ModeDynamics>();
    for (int k = 0; k < L; ++k) {
      ModeDynamics d;
      d.A = (0.5 + 0.3 * k) * Matrix::Identity(n, n);
      d.Sigma = (1.0 + k) * Matrix::Identity(n, n);
      dyn.push_back(d);
    }
    Matrix c(1, n);
    c << 1.0, 0.0;
    Matrix r = 1e10 * Matrix::Identity(1, 1);
    Matrix p0 = Matrix::Identity(n, n);
    Matrix y = rng.normal_matrix(1, T);
    IndexVec z = {0, 1, 0, 1, 0, 1};
    const Matrix logf =
        sequential_log_f_table(y, z, dyn, MeasurementModel::shared(c, r), p0);
    for (int t = 0; t < T; ++t) {
      CHECK(logf.row(t).maxCoeff() - logf.row(t).minCoeff() < 1e-4);
    }
  }
}

TEST_SUITE_END();
