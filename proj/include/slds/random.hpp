#ifndef SLDS_RANDOM_HPP
#define SLDS_RANDOM_HPP

#include <cstdint>
#include <functional>
#include <random>

#include "slds/types.hpp"

namespace slds {

// Derives an independent substream seed from a master seed. Chains, the
// Geweke simulators, and scenario generators each get their own stream so
// parallel and serial execution produce identical draws.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream);

// Explicit RNG handle threaded through every sampler. All scalar samplers
// construct their std:: distribution per call so a draw is a pure function
// of the engine state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream keyed by id, derived from this generator's seed path.
  static Rng stream(std::uint64_t master, std::uint64_t id) {
    return Rng(substream_seed(master, id));
  }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  // Shape/rate parameterization: mean = shape / rate.
  double gamma(double shape, double rate);
  double beta(double a, double b);
  double chi_squared(double dof) { return gamma(0.5 * dof, 0.5); }
  bool bernoulli(double p) { return uniform() < p; }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  // Index draw from unnormalized log weights; -inf entries carry zero mass.
  int categorical_from_log(const Vector& log_w);
  // Index draw from unnormalized nonnegative weights.
  int categorical(const Vector& w);

  Vector normal_vector(Eigen::Index n);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Univariate slice sampler with step-out; log_density must be finite at x0.
// Used for the few non-conjugate scalar conditionals.
double slice_sample(const std::function<double(double)>& log_density, double x0,
                    double width, double lo, double hi, Rng& rng);

}  // namespace slds

#endif  // SLDS_RANDOM_HPP
