#pragma once

#include <Eigen/Dense>

#include "bdf/state.hpp"

namespace bdf {

/// 𝒟_Q = 𝒟⁰ + Φ[ρ_Q] − Φ[ν] − R_Q with its summands kept for diagnostics.
struct MeanFieldOperator {
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXcd free;      // 𝒟⁰, block diagonal
  Eigen::MatrixXcd direct;    // Φ[ρ_Q]
  Eigen::MatrixXcd external;  // −Φ[ν]
  Eigen::MatrixXcd exchange;  // R_Q, entering with a minus sign

  OperatorKernel kernel(const GridPtr& grid) const { return {grid, matrix, true}; }
};

/// Φ with blocks K(p_i − p_j) ρ̂(p_i − p_j) I₂: multiplication by ρ ∗ |x|⁻¹
/// restricted to the cutoff space. Throws LatticeMismatch.
Eigen::MatrixXcd direct_potential(const ChargeDensity& rho, const Discretization& disc);

/// Density of [φ, Q] where φ is multiplication by the potential with cell
/// entries phi(d) = ⟨p + d|φ|p⟩, acting on all of L² rather than on the cutoff
/// space: rows of φQ and columns of Qφ run over grid + lattice. Evaluated on
/// the difference lattice. Vanishes identically; restricting φ to the ball
/// instead leaves boundary terms of the size of Q near |p| = Λ.
ChargeDensity commutator_density(const ChargeDensity& phi, const OperatorKernel& q,
                                 const Discretization& disc);

enum class ExchangeKernel { naive, blocked };

/// R with blocks (2π)⁻¹ Σ_k K(k) Q_{i−k, j−k}: the operator with kernel
/// Q(x, y)/|x − y|. The blocked kernel uses the SIMD table and OpenMP and
/// assumes nothing beyond what the naive loop does; for Hermitian Q it fills
/// half of the difference vectors and mirrors the rest.
Eigen::MatrixXcd exchange_operator(const OperatorKernel& q, const Discretization& disc,
                                   ExchangeKernel kernel = ExchangeKernel::blocked);

MeanFieldOperator assemble_mean_field(const OperatorKernel& q, const ChargeDensity& nu,
                                      const Discretization& disc,
                                      ExchangeKernel kernel = ExchangeKernel::blocked);

/// Same, with ρ_Q already computed.
MeanFieldOperator assemble_mean_field(const OperatorKernel& q, const ChargeDensity& rho_q,
                                      const ChargeDensity& nu, const Discretization& disc,
                                      ExchangeKernel kernel = ExchangeKernel::blocked);

}  // namespace bdf
