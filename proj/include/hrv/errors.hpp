#pragma once

#include <stdexcept>
#include <string>

namespace hrv {

/// Operands live in spaces of different dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of the operation (zero vector for POLAR,
/// point on the removed cone, duplicate jump times, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A (point, cone) or (measure, set) pairing the library has no formula for.
class TypeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Request is well formed but deliberately not supported (non-homogeneous
/// metric for GPOLAR, brute-force Skorohod with too many jumps, ...).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Experiment or run configuration failed validation.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric routine refused or failed to produce a certified value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hrv
