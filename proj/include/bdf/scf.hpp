#pragma once

#include <string>
#include <vector>

#include "bdf/energy.hpp"
#include "bdf/errors.hpp"
#include "bdf/state.hpp"

namespace bdf {

struct ScfConfig {
  int max_iterations = 200;
  double mixing = 0.6;  // θ
  double tol_projector = 1e-9;
  double tol_commutator = 1e-8;
  /// Halvings of θ tried when a step would raise the energy.
  int max_redamping = 8;

  void validate() const;
};

struct ScfResult {
  OperatorKernel q;
  OperatorKernel gamma;
  int iterations = 0;
  EnergyBreakdown energy;
  std::vector<ScfIterate> residuals;
  /// Set when an eigenvalue of some 𝒟_{Q_n} fell within 1e-8 of zero.
  bool spectral_gap_warning = false;
  std::vector<std::string> warnings;
};

struct ScfResidual {
  double delta_gamma = 0.0;  // ‖γ_{n+1} − γ_n‖
  double commutator = 0.0;   // ‖[𝒟, γ_{n+1}]‖
};

ScfResidual scf_residuals(const OperatorKernel& gamma_n, const OperatorKernel& gamma_next,
                          const Eigen::MatrixXcd& mean_field);

/// Damped fixed-point iteration γ ← round((1 − θ)γ + θ 𝟙(𝒟_Q <= 0)), starting
/// from P⁰₋. Rounding sends eigenvalues of the mixed matrix to {0, 1} at ½.
/// Throws NonConvergence with the residual history.
ScfResult solve_ground_state(const ChargeDensity& nu, const Discretization& disc,
                             const ScfConfig& config);

/// Writes the residual history as CSV (iteration, delta_gamma, commutator,
/// energy, theta).
void write_residual_csv(const std::vector<ScfIterate>& history, std::ostream& out);

}  // namespace bdf
