#include "slds/synthetic.hpp"

#include <cmath>

#include "slds/distributions.hpp"
#include "slds/linalg.hpp"

namespace slds {

namespace {

Matrix planar_rotation(int i, int j, double angle, double scale, double third, int third_axis) {
  Matrix a = Matrix::Zero(3, 3);
  const double c = std::cos(angle), s = std::sin(angle);
  a(i, i) = scale * c;
  a(i, j) = -scale * s;
  a(j, i) = scale * s;
  a(j, j) = scale * c;
  a(third_axis, third_axis) = third;
  return a;
}

ModeDynamics make_mode(Matrix a, Matrix sigma) {
  ModeDynamics d;
  d.A = std::move(a);
  d.Sigma = std::move(sigma);
  return d;
}

Matrix diag3(double a, double b, double c) {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << a, b, c;
  return m;
}

double spectral_radius(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) return 0.0;
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Scenario scenario_from_name(const std::string& name) {
  if (name == "var1-5mode") return Scenario::Var1FiveMode;
  if (name == "ar2-3mode") return Scenario::Ar2ThreeMode;
  if (name == "slds-3mode") return Scenario::SldsThreeMode;
  if (name == "slds-sparse-2mode") return Scenario::SldsSparseTwoMode;
  if (name == "mssv-switching-mean") return Scenario::MssvSwitchingMean;
  throw ConfigError("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Var1FiveMode: return "var1-5mode";
    case Scenario::Ar2ThreeMode: return "ar2-3mode";
    case Scenario::SldsThreeMode: return "slds-3mode";
    case Scenario::SldsSparseTwoMode: return "slds-sparse-2mode";
    case Scenario::MssvSwitchingMean: return "mssv-switching-mean";
  }
  throw ConfigError("unknown scenario");
}

std::vector<std::string> scenario_names() {
  return {"var1-5mode", "ar2-3mode", "slds-3mode", "slds-sparse-2mode", "mssv-switching-mean"};
}

IndexVec markov_modes(Eigen::Index T, int n_modes, double self_prob, Rng& rng) {
  IndexVec z(T);
  z[0] = rng.uniform_int(0, n_modes - 1);
  for (Eigen::Index t = 1; t < T; ++t) {
    if (n_modes == 1 || rng.bernoulli(self_prob)) {
      z[t] = z[t - 1];
    } else {
      const int step = rng.uniform_int(1, n_modes - 1);
      z[t] = (z[t - 1] + step) % n_modes;
    }
  }
  return z;
}

Matrix simulate_var(const std::vector<ModeDynamics>& dyn, const IndexVec& z,
                    const Matrix& context, Rng& rng) {
  const Eigen::Index T = static_cast<Eigen::Index>(z.size());
  const Eigen::Index d = dyn[0].Sigma.rows();
  const int r = static_cast<int>(dyn[0].A.cols() / std::max<Eigen::Index>(d, 1));
  Matrix y(d, T);
  auto obs = [&](Eigen::Index j) -> Vector {
    if (j >= 1) return y.col(j - 1);
    return context.col(-j);
  };
  for (Eigen::Index t = 1; t <= T; ++t) {
    const ModeDynamics& dk = dyn[z[t - 1]];
    Vector mean = Vector::Zero(d);
    if (r > 0) {
      Vector psibar(d * r);
      for (int i = 1; i <= r; ++i) psibar.segment((i - 1) * d, d) = obs(t - i);
      mean = dk.A * psibar;
    }
    if (dk.has_mu()) mean += dk.mu;
    y.col(t - 1) = sample_mvn(mean, dk.Sigma, rng);
  }
  return y;
}

std::pair<Matrix, Matrix> simulate_slds(const std::vector<ModeDynamics>& dyn,
                                        const IndexVec& z, const Matrix& c, const Matrix& r,
                                        const Matrix& p0, Rng& rng) {
  const Eigen::Index T = static_cast<Eigen::Index>(z.size());
  const Eigen::Index n = p0.rows();
  Matrix x(n, T);
  x.col(0) = sample_mvn(Vector::Zero(n), p0, rng);
  for (Eigen::Index t = 1; t < T; ++t) {
    const ModeDynamics& dk = dyn[z[t]];
    Vector mean = dk.A * x.col(t - 1);
    if (dk.has_mu()) mean += dk.mu;
    x.col(t) = sample_mvn(mean, dk.Sigma, rng);
  }
  Matrix y(c.rows(), T);
  for (Eigen::Index t = 0; t < T; ++t) {
    y.col(t) = sample_mvn(c * x.col(t), r, rng);
  }
  return {x, y};
}

SyntheticData generate_synthetic(Scenario scenario, Eigen::Index T, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 0x5eedULL);
  SyntheticData out;
  const Matrix i3 = Matrix::Identity(3, 3);

  switch (scenario) {
    case Scenario::Var1FiveMode: {
      out.family = ModelFamily::Ar;
      out.ar_order = 1;
      out.dyn = {
          make_mode(planar_rotation(0, 1, 0.30, 0.95, 0.85, 2), i3),
          make_mode(planar_rotation(0, 1, 1.40, 0.90, 0.30, 2), i3),
          make_mode(diag3(-0.85, 0.70, 0.40), i3),
          make_mode(planar_rotation(0, 2, 0.70, 0.93, 0.60, 1), i3),
          make_mode(diag3(0.20, -0.50, 0.92), i3),
      };
      out.z_true = markov_modes(T, 5, out.self_transition, rng);
      Matrix warm_context = Matrix::Zero(3, 1);
      IndexVec warm(50, out.z_true[0]);
      Matrix warm_y = simulate_var(out.dyn, warm, warm_context, rng);
      out.context = warm_y.rightCols(1);
      out.y = simulate_var(out.dyn, out.z_true, out.context, rng);
      break;
    }
    case Scenario::Ar2ThreeMode: {
      out.family = ModelFamily::Ar;
      out.ar_order = 2;
      Matrix s = Matrix::Identity(1, 1);
      auto coeffs = [](double a1, double a2) {
        Matrix a(1, 2);
        a << a1, a2;
        return a;
      };
      out.dyn = {
          make_mode(coeffs(1.8905, -0.9025), s),
          make_mode(coeffs(0.7712, -0.7225), s),
          make_mode(coeffs(-0.2000, 0.3500), s),
      };
      out.z_true = markov_modes(T, 3, out.self_transition, rng);
      Matrix warm_context = Matrix::Zero(1, 2);
      IndexVec warm(50, out.z_true[0]);
      Matrix warm_y = simulate_var(out.dyn, warm, warm_context, rng);
      out.context = warm_y.rightCols(2).rowwise().reverse();
      out.y = simulate_var(out.dyn, out.z_true, out.context, rng);
      break;
    }
    case Scenario::SldsThreeMode: {
      out.family = ModelFamily::Slds;
      out.state_dim = 3;
      out.C = i3;
      out.R = i3;
      out.dyn = {
          make_mode(planar_rotation(0, 1, 0.25, 0.97, 0.80, 2), i3),
          make_mode(planar_rotation(1, 2, 0.90, 0.92, 0.40, 0), i3),
          make_mode(diag3(-0.70, 0.85, 0.30), i3),
      };
      out.z_true = markov_modes(T, 3, out.self_transition, rng);
      auto [x, y] = simulate_slds(out.dyn, out.z_true, out.C, out.R, 4.0 * i3, rng);
      out.x = x;
      out.y = y;
      break;
    }
    case Scenario::SldsSparseTwoMode: {
      out.family = ModelFamily::Slds;
      out.state_dim = 3;
      Matrix a1(3, 3), a2(3, 3);
      a1 << 0.8, -0.2, 0.0,
           -0.2,  0.8, 0.0,
            0.0,  0.0, 0.0;
      a2 << -0.2, 0.0,  0.8,
             0.8, 0.0, -0.2,
             0.0, 0.0,  0.0;
      out.C = Matrix::Zero(2, 3);
      out.C.leftCols(2).setIdentity();
      out.R = Matrix::Identity(2, 2);
      out.dyn = {make_mode(a1, i3), make_mode(a2, i3)};
      out.z_true = markov_modes(T, 2, out.self_transition, rng);
      auto [x, y] = simulate_slds(out.dyn, out.z_true, out.C, out.R, 4.0 * i3, rng);
      out.x = x;
      out.y = y;
      break;
    }
    case Scenario::MssvSwitchingMean: {
      out.family = ModelFamily::SldsSharedA;
      out.state_dim = 1;
      out.C = Matrix::Identity(1, 1);
      out.R = 0.3 * Matrix::Identity(1, 1);
      Matrix a = 0.9 * Matrix::Identity(1, 1);
      Matrix s = 0.5 * Matrix::Identity(1, 1);
      const double means[4] = {-1.0, 0.8, -0.3, 1.2};
      for (double m : means) {
        ModeDynamics d = make_mode(a, s);
        d.mu = Vector::Constant(1, m);
        out.dyn.push_back(d);
      }
      // Deterministic regimes with three change points.
      out.z_true.assign(T, 0);
      for (Eigen::Index t = 0; t < T; ++t) {
        out.z_true[t] = static_cast<int>((4 * t) / T);
      }
      auto [x, y] =
          simulate_slds(out.dyn, out.z_true, out.C, out.R, 8.0 * Matrix::Identity(1, 1), rng);
      out.x = x;
      out.y = y;
      break;
    }
  }
  for (const auto& d : out.dyn) {
    if (spectral_radius(d.A) > 1.0) out.unstable_dynamics = true;
  }
  return out;
}

}  // namespace slds
