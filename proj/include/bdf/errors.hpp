#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bdf {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid spec, physical parameters or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a pointwise formula (p = 0, |p| > Λ, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive or fixed quadrature failed to reach its tolerance.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Objects built on different grids or lattices were combined.
class LatticeMismatch : public Error {
 public:
  using Error::Error;
};

/// Checkpoint file is malformed, truncated or belongs to another grid.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Radial discretization of the critical-coupling problem is not resolved.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Bisection bracket does not enclose a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Predictor fixed point of the midpoint integrator stopped contracting.
class StepFailure : public Error {
 public:
  using Error::Error;
};

struct ScfIterate {
  int iteration = 0;
  double delta_gamma = 0.0;
  double commutator = 0.0;
  double energy = 0.0;
  double mixing = 0.0;
};

/// The self-consistent iteration exhausted its budget. Carries the history.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<ScfIterate> history)
      : Error(what), history_(std::move(history)) {}

  const std::vector<ScfIterate>& history() const noexcept { return history_; }

 private:
  std::vector<ScfIterate> history_;
};

}  // namespace bdf
