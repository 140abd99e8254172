#pragma once

#include <stdexcept>
#include <string>

namespace cohom {

/// Caller violated an API precondition (e.g. mixed elements of two groups).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input data (scenario, matrices, weights) failed validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation is not available for this kind of group.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The spectral gap hypothesis ||A|| < 1 fails or cannot be used.
class HypothesisViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-point iteration ran out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double observed_rate)
      : std::runtime_error(what), observed_rate_(observed_rate) {}
  double observed_rate() const noexcept { return observed_rate_; }

 private:
  double observed_rate_;
};

}  // namespace cohom
