#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace decmdp {

/// Bad user input: unknown names, malformed config, violated preconditions.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rollout produced NaN/Inf or an inadmissible state.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step, const std::string& what)
      : std::runtime_error("blow-up at step " + std::to_string(step) + ": " + what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Numerical routine failed to converge or hit an undefined configuration.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace decmdp
