#pragma once

#include <stdexcept>
#include <string>

namespace widelab {

/// Invalid user-supplied configuration. `key()` names the offending field
/// so the CLI can point at it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A layer variance K(l) that is not strictly positive while the activation
/// is non-constant: the limit covariance is not invertible.
class DegenerateKernel : public std::domain_error {
 public:
  DegenerateKernel(int layer, double value);

  int layer() const noexcept { return layer_; }
  double value() const noexcept { return value_; }

 private:
  int layer_;
  double value_;
};

}  // namespace widelab
