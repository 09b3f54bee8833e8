#include "slds/random.hpp"

#include <cmath>
#include <limits>

namespace slds {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream * 0xd1b54a32d192ed03ULL + 1));
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw ParameterError("gamma: shape and rate must be positive");
  }
  return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
}

double Rng::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ParameterError("beta: parameters must be positive");
  }
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

int Rng::categorical_from_log(const Vector& log_w) {
  const Eigen::Index n = log_w.size();
  if (n == 0) throw ParameterError("categorical_from_log: empty weight vector");
  const double m = log_w.maxCoeff();
  if (!std::isfinite(m)) {
    throw NumericalError("categorical_from_log: no finite weight");
  }
  Vector p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = std::isfinite(log_w[i]) ? std::exp(log_w[i] - m) : 0.0;
  }
  return categorical(p);
}

int Rng::categorical(const Vector& w) {
  const Eigen::Index n = w.size();
  if (n == 0) throw ParameterError("categorical: empty weight vector");
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("categorical: weights do not sum to a positive finite value");
  }
  double u = uniform() * total;
  for (Eigen::Index i = 0; i < n; ++i) {
    u -= w[i];
    if (u <= 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(n - 1);
}

Vector Rng::normal_vector(Eigen::Index n) {
  Vector v(n);
  std::normal_distribution<double> d(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(engine_);
  return v;
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  std::normal_distribution<double> d(0.0, 1.0);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = d(engine_);
  }
  return m;
}

double slice_sample(const std::function<double(double)>& log_density, double x0,
                    double width, double lo, double hi, Rng& rng) {
  const double f0 = log_density(x0);
  if (!std::isfinite(f0)) {
    throw NumericalError("slice_sample: log density not finite at initial point");
  }
  const double log_y = f0 + std::log(rng.uniform());

  double left = x0 - width * rng.uniform();
  double right = left + width;
  left = std::max(left, lo);
  right = std::min(right, hi);
  for (int i = 0; i < 64 && left > lo && log_density(left) > log_y; ++i) {
    left = std::max(left - width, lo);
  }
  for (int i = 0; i < 64 && right < hi && log_density(right) > log_y; ++i) {
    right = std::min(right + width, hi);
  }

  for (int i = 0; i < 256; ++i) {
    const double x = left + (right - left) * rng.uniform();
    if (log_density(x) > log_y) return x;
    if (x < x0) {
      left = x;
    } else {
      right = x;
    }
  }
  return x0;  // shrinkage exhausted; keeping the current point preserves invariance
}

}  // namespace slds
