#ifndef SLDS_GIBBS_HPP
#define SLDS_GIBBS_HPP

#include <cstdint>
#include <vector>

#include "slds/model.hpp"
#include "slds/mode_sampler.hpp"
#include "slds/state_sampler.hpp"

namespace slds {

struct ChainState {
  IndexVec z;
  Matrix x;  // n x T for SLDS families, empty otherwise
  TransitionSet trans;
  std::vector<ModeDynamics> dyn;
  Matrix R;
  MeasurementMixture mix;
  std::vector<ArdState> ard;  // per mode, ARD prior only
  HdpHyper hyper;
};

struct TraceRecord {
  int iteration = 0;
  IndexVec z;
  int active_modes = 0;
  double log_joint = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
  Matrix ard_alphas;  // groups x L when ARD is active

  bool has_params = false;
  std::vector<ModeDynamics> dyn;
  Vector beta;
  Matrix pi;
  Matrix R;
};

struct SweepOptions {
  bool sequential = false;
  bool skip_beta_update = false;  // kernel-mutation hook for the joint test
};

// Number of modes owning more than `threshold` of the sequence.
int active_mode_count(const IndexVec& z, int L, double threshold = 0.01);

ChainState init_chain_state(const ModelConfig& config, const Dataset& data, Rng& rng);

// One full sweep: (SLDS) scheduled marginalized z step, blocked x, psi = x;
// blocked z; beta/pi/hyperparameter updates; dynamic parameters; R.
void gibbs_sweep(ChainState& state, const ModelConfig& config, const Dataset& data, Rng& rng,
                 const SweepOptions& options = {});

double log_joint(const ChainState& state, const ModelConfig& config, const Dataset& data);

TraceRecord make_trace_record(const ChainState& state, const ModelConfig& config,
                              const Dataset& data, int iteration);

// Independent chains, deterministic per (seed, chain index); traces follow the
// schedule's thinning. n_threads > 1 distributes chains without changing any
// draw.
std::vector<std::vector<TraceRecord>> run_chains(const ModelConfig& config,
                                                 const Dataset& data, int n_chains,
                                                 std::uint64_t seed, int n_threads = 1);

// Forward draw of a full joint sample (hyper, transitions, parameters, z, y)
// for the configured model; the dataset supplies the AR context.
struct ForwardDraw {
  ChainState state;
  Dataset data;
};
ForwardDraw sample_joint_from_prior(const ModelConfig& config, const Matrix& context,
                                    Eigen::Index T, Rng& rng);

// Resimulates the data given the current latents (successive-conditional step).
void resimulate_data(const ChainState& state, const ModelConfig& config, Dataset& data,
                     Rng& rng);

}  // namespace slds

#endif  // SLDS_GIBBS_HPP
