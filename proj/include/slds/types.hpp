#ifndef SLDS_TYPES_HPP
#define SLDS_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace slds {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexVec = std::vector<int>;

// Invalid arguments or inconsistent dimensions supplied by a caller.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical operation failed beyond recovery (non-PD matrix after jitter,
// divergent filter, non-finite likelihood).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// File/serialization problems.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or contradictory run configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slds

#endif  // SLDS_TYPES_HPP
