#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace bdf::quad {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss–Legendre rule with n nodes on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

struct Rect {
  double x0, x1, y0, y1;
};

struct CubatureOptions {
  double abs_tol = 1e-9;
  int max_depth = 20;
  std::size_t max_cells = 400000;
  /// A point where the integrand may blow up like 1/distance. When it is a
  /// corner of an initial rectangle, the square at that corner is mapped onto
  /// two Duffy triangles, whose Jacobian cancels the blow-up.
  std::optional<std::pair<double, double>> singular_vertex;
};

struct CubatureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t cells = 0;
  int depth = 0;
};

/// Globally adaptive tensor Gauss–Legendre cubature over a union of
/// rectangles. The worst cell is quartered until the summed error estimate
/// falls below abs_tol. Throws IntegrationError past max_depth or max_cells.
CubatureResult adaptive_cubature(const std::function<double(double, double)>& f,
                                 const std::vector<Rect>& regions,
                                 const CubatureOptions& options);

/// Radial nodes on (0, cutoff] with a square-root map r = cutoff·t², t
/// Gauss–Legendre on [0, 1]. Concentrates nodes near r = 0.
Rule1D sqrt_mapped_radial_rule(int n, double cutoff);

/// Angular channels of the Coulomb kernel,
///   A_m(r, s) = ∫₀^{2π} cos(mφ) / sqrt(r² + s² − 2 r s cos φ) dφ.
///
/// The m = 0 part is the complete elliptic integral K; higher channels add a
/// bounded correction integrated by a periodic trapezoid rule. The logarithmic
/// singularity at r = s therefore never meets the fixed rule.
class CoulombChannels {
 public:
  explicit CoulombChannels(int m_max, int angular_points = 512);

  int m_max() const noexcept { return m_max_; }
  /// out[m] = A_m(r, s) for m = 0..m_max; requires r, s > 0 and r != s.
  void evaluate(double r, double s, double* out) const;
  double evaluate(int m, double r, double s) const;

  /// Constant c_m with A_m(r, s) = (2 ln(8 r) − c_m − 2 ln|r − s|)/r + o(1)
  /// as s → r.
  static double diagonal_constant(int m) noexcept;

 private:
  int m_max_;
  std::vector<double> base_;                  // 4 sin²(φ/2)
  std::vector<std::vector<double>> weights_;  // (cos mφ − 1)·Δφ, m >= 1
};

/// Symmetric Nyström matrices G_m with
///   Σ_ab U(r_a) G_m(a,b) U(r_b) ≈ ∫∫ U(r) A_m(r, s) U(s) dr ds
/// on a radial rule over (0, cutoff]. Off-diagonal entries are W_a W_b A_m;
/// diagonal entries absorb the logarithmic singularity by analytic
/// subtraction of −(2/r) ln|r − s|.
std::vector<Eigen::MatrixXd> coulomb_channel_matrices(const Rule1D& radial, double cutoff,
                                                      int m_max, int angular_points = 512);

}  // namespace bdf::quad
