#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "bdf/momentum_grid.hpp"

namespace bdf {

struct PhysicalParams {
  double fermi_velocity = 1.1;  // v_F
  double cutoff = 1.0;          // Λ

  /// α = 1/v_F.
  double coupling() const noexcept { return 1.0 / fermi_velocity; }
  /// Throws ConfigError unless v_F > 0 and Λ > 0.
  void validate() const;
};

using SpinorMatrix = Eigen::Matrix2cd;

/// g(R) = (1/2π) ∫₀^π ∫₀^R cos θ · r / sqrt(r² − 2r cos θ + 1) dr dθ.
///
/// Folding θ onto [0, π/2] leaves a nonnegative integrand with a single
/// 1/distance singularity at (r, θ) = (1, 0); the tail r > 2 is integrated in
/// ln r, where it tends to a constant. Throws IntegrationError when adaptive
/// refinement exceeds depth 20, DomainError for R < 0 or tol <= 0.
double g_of_R(double R, double tol = 1e-10);

/// Memoized g_of_R at the default tolerance. Thread-safe.
double g_cached(double R);

/// v_F + g(Λ/|p|). Throws DomainError for p = 0 or |p| > Λ.
double v_eff(const Momentum& p, const PhysicalParams& params);

/// v_eff at every point of a grid, one g evaluation per distinct |p|.
std::vector<double> v_eff_table(const MomentumGrid& grid, const PhysicalParams& params);

/// σ·p = σ₁p₁ + σ₂p₂.
SpinorMatrix dirac_matrix(const Momentum& p);

/// P⁰₋(p) = ½(I − σ·p/|p|). Throws DomainError at p = 0.
SpinorMatrix free_sea_projector(const Momentum& p);

/// 𝒟̂⁰(p) = v_eff(p) σ·p.
SpinorMatrix mean_field_free_symbol(const Momentum& p, const PhysicalParams& params);

/// |𝒟̂⁰(p)|^{1/2} = sqrt(v_eff(p)|p|) I.
SpinorMatrix sqrt_abs_free_symbol(const Momentum& p, const PhysicalParams& params);

/// Translation-invariant chiral state f_ren(p) = c(|p|) σ·p̂, |c| <= ½.
class TranslationInvariantState {
 public:
  using Profile = std::function<double(double)>;

  /// Samples the profile on (0, cutoff] and throws DomainError when |c| > ½.
  TranslationInvariantState(Profile profile, double cutoff);

  /// f⁰_ren: c ≡ −½.
  static TranslationInvariantState free_sea(double cutoff);

  double coefficient(double r) const { return profile_(r); }
  SpinorMatrix at(const Momentum& p) const;
  double cutoff() const noexcept { return cutoff_; }

 private:
  Profile profile_;
  double cutoff_;
};

struct FreeEnergyTerms {
  double kinetic = 0.0;   // (2π)⁻² v_F ∫ tr(σ·p f) dp
  double exchange = 0.0;  // −(2π)⁻² ½ ∫ f̌/|x| dx, in momentum space
  double total() const noexcept { return kinetic + exchange; }
};

/// Energy per unit volume ℱ of a translation-invariant state, with both
/// integrals on a square-root mapped radial rule and the angular part
/// reduced to the m = 1 Coulomb channel. Throws IntegrationError when the
/// result at `radial_resolution` and half of it differ by more than 1e-3
/// relative (1e-10 absolute).
FreeEnergyTerms free_energy_terms(const TranslationInvariantState& state,
                                  const PhysicalParams& params, int radial_resolution = 200);

double free_energy_density(const TranslationInvariantState& state, const PhysicalParams& params,
                           int radial_resolution = 200);

}  // namespace bdf
