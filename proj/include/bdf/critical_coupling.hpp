#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <span>
#include <vector>

#include "bdf/quadrature.hpp"

namespace bdf {

/// One radial discretization of the channel problems on 𝔥₁ (Λ = 1):
///   A_m(a, b) = (2π)⁻¹ r_a G_m(a, b) r_b,   B(a, a) = W_a r_a² (v + g(1/r_a)).
class ChannelDiscretization {
 public:
  ChannelDiscretization(int radial_nodes, int m_max, int angular_points = 512);

  int nodes() const noexcept { return static_cast<int>(rule_.nodes.size()); }
  int m_max() const noexcept { return static_cast<int>(channels_.size()) - 1; }
  const quad::Rule1D& rule() const noexcept { return rule_; }
  std::span<const double> g_values() const noexcept { return g_; }

  /// Top generalized eigenvalue of channel m at Fermi velocity v.
  double top_eigenvalue(int m, double v) const;
  /// Same with v + g(1/|p|) replaced by 1: discrete best constant C in
  /// ∫|φ|²/|x| <= C ⟨φ, |p| φ⟩ restricted to channel m.
  double kato_eigenvalue(int m) const;

 private:
  double top_of(int m, const Eigen::VectorXd& scale) const;

  quad::Rule1D rule_;
  std::vector<double> g_;
  // (2π)⁻¹ G_m / sqrt(W_a W_b), so that only the diagonal (v + g) scaling
  // changes with v.
  std::vector<Eigen::MatrixXd> channels_;
};

struct HEstimate {
  double v_f = 0.0;
  double h = 0.0;
  int channel = 0;
  std::vector<double> per_channel;
  double h_coarse = 0.0;  // at half the radial nodes
};

/// h(v_F) with a resolution check against half the radial nodes.
class CriticalCouplingSolver {
 public:
  CriticalCouplingSolver(int radial_resolution, int m_max, int angular_points = 512);

  int radial_resolution() const noexcept { return fine_.nodes(); }
  int m_max() const noexcept { return fine_.m_max(); }
  const ChannelDiscretization& fine() const noexcept { return fine_; }
  const ChannelDiscretization& coarse() const noexcept { return coarse_; }

  /// Throws ResolutionError when the two resolutions differ by more than 1%.
  HEstimate estimate_h(double v_f) const;
  /// max_m C_m at the fine resolution.
  double kato_constant() const;

 private:
  ChannelDiscretization fine_;
  ChannelDiscretization coarse_;
};

HEstimate estimate_h(double v_f, int radial_resolution, int m_max);

struct VcEstimate {
  double v_c = 0.0;
  double alpha_c = 0.0;
  double lower = 0.0;  // bracket with h(lower) > 2 > h(upper)
  double upper = 0.0;
  int bisection_steps = 0;
  double h_at_v_c = 0.0;
  double slope = 0.0;  // (h(upper) − h(lower))/(upper − lower) at the end
};

/// Bisection of h(v) − 2 on [0.05, 2.5] down to a bracket of width tol_v.
/// Throws BracketError when h(0.05) < 2 or h(2.5) > 2.
VcEstimate estimate_v_c(const CriticalCouplingSolver& solver, double tol_v);
VcEstimate estimate_v_c(double tol_v, int radial_resolution, int m_max);

/// {v_F grid, h values, v_c, α_c, resolution metadata, channel table}.
nlohmann::json critical_report(const CriticalCouplingSolver& solver, const std::vector<double>& v_grid,
                               const VcEstimate& vc);

}  // namespace bdf
