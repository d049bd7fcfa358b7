#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bdf/free_operators.hpp"
#include "bdf/momentum_grid.hpp"

namespace bdf {

/// Dense 2M × 2M operator on the grid. Row/column 2i + s is spinor component
/// s at grid point i. Entries are taken in the orthonormal cell basis, so the
/// block (i, j) holds δ² K̂(p_i, p_j) and traces and products need no extra
/// quadrature weights.
class OperatorKernel {
 public:
  OperatorKernel(GridPtr grid, Eigen::MatrixXcd matrix, bool hermitian);

  static OperatorKernel zero(GridPtr grid);
  static OperatorKernel identity(GridPtr grid);

  const GridPtr& grid() const noexcept { return grid_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  bool hermitian() const noexcept { return hermitian_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  auto spinor(std::size_t i, std::size_t j) const {
    return matrix_.block<2, 2>(2 * static_cast<Eigen::Index>(i), 2 * static_cast<Eigen::Index>(j));
  }

 private:
  GridPtr grid_;
  Eigen::MatrixXcd matrix_;
  bool hermitian_;
};

/// Fourier coefficients ρ̂(k) on a difference lattice.
class ChargeDensity {
 public:
  explicit ChargeDensity(LatticePtr lattice);
  ChargeDensity(LatticePtr lattice, Eigen::VectorXcd values);

  const LatticePtr& lattice() const noexcept { return lattice_; }
  const Eigen::VectorXcd& values() const noexcept { return values_; }
  Eigen::VectorXcd& values() noexcept { return values_; }
  std::complex<double> operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }

  /// max_k |ρ̂(−k) − conj ρ̂(k)|.
  double conjugation_defect() const;

  ChargeDensity& operator+=(const ChargeDensity& o);
  ChargeDensity& operator-=(const ChargeDensity& o);
  ChargeDensity& operator*=(double s);
  friend ChargeDensity operator+(ChargeDensity a, const ChargeDensity& b) { return a += b; }
  friend ChargeDensity operator-(ChargeDensity a, const ChargeDensity& b) { return a -= b; }
  friend ChargeDensity operator*(double s, ChargeDensity a) { return a *= s; }

 private:
  LatticePtr lattice_;
  Eigen::VectorXcd values_;
};

/// ∫ |k|⁻¹ dk over the unit square centred on integer site c.
double unit_cell_coulomb_integral(LatticeCoord c);

/// Coulomb weights K(k) = ∫_{cell(k)} |k'|⁻¹ dk' for every lattice site.
/// At k = 0 this is 4 ln(1 + √2) δ.
std::vector<double> coulomb_weights(const DifferenceLattice& lattice);

/// Everything that depends only on the grid and the physical parameters:
/// lattice, Coulomb weights, v_eff table, the free projector and 𝒟⁰.
class Discretization {
 public:
  Discretization(const GridSpec& spec, const PhysicalParams& params);

  const GridPtr& grid() const noexcept { return grid_; }
  const LatticePtr& lattice() const noexcept { return lattice_; }
  const PhysicalParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return grid_->size(); }
  Eigen::Index dim() const noexcept { return 2 * static_cast<Eigen::Index>(grid_->size()); }

  std::span<const double> coulomb() const noexcept { return coulomb_; }
  /// K(d) for any d in the box |d_x|, |d_y| <= reach, including sites that
  /// are not differences of grid points.
  double coulomb_at(LatticeCoord d) const noexcept {
    const int reach = lattice_->reach();
    return coulomb_box_[static_cast<std::size_t>(d.y + reach) * (2 * reach + 1) + (d.x + reach)];
  }
  std::span<const double> v_eff() const noexcept { return v_eff_; }
  /// v_eff(p_i)|p_i|, the eigenvalue of |𝒟⁰| at grid point i.
  std::span<const double> abs_free() const noexcept { return abs_free_; }
  /// Lattice index of p_i − p_j; row-major M × M.
  int pair_index(std::size_t i, std::size_t j) const noexcept { return pair_[i * size() + j]; }

  const Eigen::MatrixXcd& free_projector() const noexcept { return p_minus_; }
  const Eigen::MatrixXcd& free_operator() const noexcept { return d0_; }
  OperatorKernel free_sea() const { return {grid_, p_minus_, true}; }

 private:
  GridPtr grid_;
  LatticePtr lattice_;
  PhysicalParams params_;
  std::vector<double> coulomb_;
  std::vector<double> coulomb_box_;
  std::vector<double> v_eff_;
  std::vector<double> abs_free_;
  std::vector<int> pair_;
  Eigen::MatrixXcd p_minus_;
  Eigen::MatrixXcd d0_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

DiscretizationPtr make_discretization(const GridSpec& spec, const PhysicalParams& params);

enum class Sign { plus, minus };

/// P⁰_ε Q P⁰_ε′ with the pointwise free projectors.
OperatorKernel block(const OperatorKernel& q, Sign left, Sign right);

/// ρ̂(k) = (2π)⁻¹ Σ_{c_i − c_j = k} tr Q_ij.
ChargeDensity density(const OperatorKernel& q, LatticePtr lattice);
ChargeDensity density(const OperatorKernel& q);

/// D(ρ₁, ρ₂) = 2π Σ_k K(k) conj ρ̂₁(k) ρ̂₂(k). Throws LatticeMismatch.
std::complex<double> coulomb_inner(const ChargeDensity& a, const ChargeDensity& b);
double coulomb_norm(const ChargeDensity& rho);

struct StateNorms {
  double kinetic_trace_norm = 0.0;  // ‖|𝒟⁰|^{1/2}(Q⁺⁺ − Q⁻⁻)|𝒟⁰|^{1/2}‖_{𝔖¹}
  double hs_weighted_norm = 0.0;    // ‖|𝒟⁰|^{1/2} Q‖_{𝔖²}
  double coulomb_norm = 0.0;        // ‖ρ_Q‖_𝒞
  double y_norm() const noexcept { return kinetic_trace_norm + hs_weighted_norm + coulomb_norm; }
};

StateNorms norms(const OperatorKernel& q, const Discretization& disc);

/// γ = e^{iεH} P⁰₋ e^{−iεH} with H a seeded random Hermitian matrix, ‖H‖ = 1.
OperatorKernel random_admissible_state(const Discretization& disc, std::uint64_t seed,
                                       double strength);

/// ‖γ² − γ‖.
double projector_defect(const OperatorKernel& gamma);

}  // namespace bdf
