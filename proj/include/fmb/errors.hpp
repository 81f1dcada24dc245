#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fmb {

/// Raised when inputs violate a documented precondition (CFL, grid coverage,
/// step-size bounds, parameter ranges).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a dispersion model is evaluated exactly on an undamped pole.
class PoleError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Raised when an integration produces non-finite values, breaks a conserved
/// quantity, or cannot resolve a spectrum from the recorded data.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericalBlowUp : public NumericalError {
public:
  explicit NumericalBlowUp(std::size_t step)
      : NumericalError("numerical blow-up at step " + std::to_string(step)),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

} // namespace fmb
