#pragma once

#include <stdexcept>
#include <string>

namespace saddle {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainViolation : std::domain_error {
  using std::domain_error::domain_error;
};

struct GridTooCoarse : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when the potential vanishes strictly inside the well interval, so
// 1/sqrt(2G) is not integrable across the interior zero.
struct QuadratureSingularity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InversionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonDecreaseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigenConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedDomain : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace saddle
