#ifndef SLDS_SYNTHETIC_HPP
#define SLDS_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "slds/dynamics.hpp"
#include "slds/model.hpp"
#include "slds/random.hpp"

namespace slds {

enum class Scenario {
  Var1FiveMode,      // 5-mode VAR(1), d = 3, 0.98 self-transition
  Ar2ThreeMode,      // 3-mode AR(2), d = 1
  SldsThreeMode,     // 3-mode SLDS, n = d = 3, C = I
  SldsSparseTwoMode, // 2-mode SLDS with sparse dynamic matrices, C = [I_2 0]
  MssvSwitchingMean, // shared scalar dynamics, switching mean, 3 change points
};

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);
std::vector<std::string> scenario_names();

struct SyntheticData {
  Matrix y;        // d x T
  Matrix context;  // d x r (AR scenarios)
  Matrix x;        // latent states for SLDS scenarios
  IndexVec z_true;
  std::vector<ModeDynamics> dyn;
  Matrix C;
  Matrix R;
  ModelFamily family = ModelFamily::Ar;
  int ar_order = 0;
  int state_dim = 0;
  double self_transition = 0.98;
  bool unstable_dynamics = false;  // spectral radius above one was requested
};

// Markov mode sequence with uniform initial mode, given self-transition
// probability and equal off-diagonal mass.
IndexVec markov_modes(Eigen::Index T, int n_modes, double self_prob, Rng& rng);

// Observations under a switching VAR given modes and r context columns.
Matrix simulate_var(const std::vector<ModeDynamics>& dyn, const IndexVec& z,
                    const Matrix& context, Rng& rng);

// Latent states and observations for an SLDS; x_1 ~ N(0, P0).
std::pair<Matrix, Matrix> simulate_slds(const std::vector<ModeDynamics>& dyn,
                                        const IndexVec& z, const Matrix& c, const Matrix& r,
                                        const Matrix& p0, Rng& rng);

SyntheticData generate_synthetic(Scenario scenario, Eigen::Index T, std::uint64_t seed);

}  // namespace slds

#endif  // SLDS_SYNTHETIC_HPP
