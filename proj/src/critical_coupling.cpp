#include "bdf/critical_coupling.hpp"

#include <cmath>
#include <numbers>

#include "bdf/errors.hpp"
#include "bdf/free_operators.hpp"

namespace bdf {

ChannelDiscretization::ChannelDiscretization(int radial_nodes, int m_max, int angular_points) {
  if (radial_nodes < 8) throw DomainError("radial resolution must be >= 8");
  if (m_max < 0) throw DomainError("m_max must be >= 0");
  rule_ = quad::sqrt_mapped_radial_rule(radial_nodes, 1.0);
  g_.resize(radial_nodes);
  for (int a = 0; a < radial_nodes; ++a) g_[a] = g_cached(1.0 / rule_.nodes[a]);
  channels_ = quad::coulomb_channel_matrices(rule_, 1.0, m_max, angular_points);
  Eigen::VectorXd inv_sqrt_w(radial_nodes);
  for (int a = 0; a < radial_nodes; ++a) inv_sqrt_w[a] = 1.0 / std::sqrt(rule_.weights[a]);
  for (auto& c : channels_)
    c = (inv_sqrt_w.asDiagonal() * c * inv_sqrt_w.asDiagonal()) / (2.0 * std::numbers::pi);
}

double ChannelDiscretization::top_of(int m, const Eigen::VectorXd& scale) const {
  const Eigen::MatrixXd c = scale.asDiagonal() * channels_.at(m) * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double ChannelDiscretization::top_eigenvalue(int m, double v) const {
  Eigen::VectorXd scale(nodes());
  for (int a = 0; a < nodes(); ++a) scale[a] = 1.0 / std::sqrt(v + g_[a]);
  return top_of(m, scale);
}

double ChannelDiscretization::kato_eigenvalue(int m) const {
  return top_of(m, Eigen::VectorXd::Ones(nodes()));
}

CriticalCouplingSolver::CriticalCouplingSolver(int radial_resolution, int m_max, int angular_points)
    : fine_(radial_resolution, m_max, angular_points),
      coarse_(radial_resolution / 2, m_max, angular_points) {}

HEstimate CriticalCouplingSolver::estimate_h(double v_f) const {
  if (!(v_f > 0.0)) throw DomainError("estimate_h: v_F must be positive");
  HEstimate out;
  out.v_f = v_f;
  const int channels = fine_.m_max() + 1;
  out.per_channel.assign(channels, 0.0);
  std::vector<double> coarse(channels, 0.0);
#pragma omp parallel for schedule(static)
  for (int m = 0; m < channels; ++m) {
    out.per_channel[m] = fine_.top_eigenvalue(m, v_f);
    coarse[m] = coarse_.top_eigenvalue(m, v_f);
  }
  for (int m = 0; m < channels; ++m)
    if (out.per_channel[m] > out.h) {
      out.h = out.per_channel[m];
      out.channel = m;
    }
  for (double c : coarse) out.h_coarse = std::max(out.h_coarse, c);
  if (std::abs(out.h - out.h_coarse) > 0.01 * out.h)
    throw ResolutionError("h(" + std::to_string(v_f) + ") changes by more than 1% between " +
                          std::to_string(coarse_.nodes()) + " and " +
                          std::to_string(fine_.nodes()) + " radial nodes");
  return out;
}

double CriticalCouplingSolver::kato_constant() const {
  double best = 0.0;
  for (int m = 0; m <= fine_.m_max(); ++m) best = std::max(best, fine_.kato_eigenvalue(m));
  return best;
}

HEstimate estimate_h(double v_f, int radial_resolution, int m_max) {
  return CriticalCouplingSolver(radial_resolution, m_max).estimate_h(v_f);
}

VcEstimate estimate_v_c(const CriticalCouplingSolver& solver, double tol_v) {
  if (!(tol_v > 0.0)) throw DomainError("estimate_v_c: tol_v must be positive");
  double lo = 0.05, hi = 2.5;
  double h_lo = solver.estimate_h(lo).h;
  double h_hi = solver.estimate_h(hi).h;
  if (h_lo < 2.0 || h_hi > 2.0)
    throw BracketError("h − 2 does not change sign on [0.05, 2.5]: h(0.05) = " +
                       std::to_string(h_lo) + ", h(2.5) = " + std::to_string(h_hi));
  VcEstimate out;
  while (hi - lo > tol_v) {
    const double mid = 0.5 * (lo + hi);
    const double h = solver.estimate_h(mid).h;
    if (h > 2.0) {
      lo = mid;
      h_lo = h;
    } else {
      hi = mid;
      h_hi = h;
    }
    ++out.bisection_steps;
  }
  out.lower = lo;
  out.upper = hi;
  out.v_c = 0.5 * (lo + hi);
  out.alpha_c = 1.0 / out.v_c;
  out.h_at_v_c = solver.estimate_h(out.v_c).h;
  out.slope = (h_hi - h_lo) / (hi - lo);
  return out;
}

VcEstimate estimate_v_c(double tol_v, int radial_resolution, int m_max) {
  return estimate_v_c(CriticalCouplingSolver(radial_resolution, m_max), tol_v);
}

nlohmann::json critical_report(const CriticalCouplingSolver& solver,
                               const std::vector<double>& v_grid, const VcEstimate& vc) {
  nlohmann::json grid = nlohmann::json::array();
  nlohmann::json table = nlohmann::json::array();
  for (double v : v_grid) {
    const auto e = solver.estimate_h(v);
    grid.push_back({{"v_F", v}, {"h", e.h}, {"h_coarse", e.h_coarse}, {"channel", e.channel}});
    table.push_back({{"v_F", v}, {"per_channel", e.per_channel}});
  }
  return {{"v_F_grid", v_grid},
          {"h_values", grid},
          {"v_c", vc.v_c},
          {"alpha_c", vc.alpha_c},
          {"bracket", {vc.lower, vc.upper}},
          {"h_at_v_c", vc.h_at_v_c},
          {"bisection_steps", vc.bisection_steps},
          {"resolution",
           {{"radial_nodes", solver.radial_resolution()},
            {"coarse_radial_nodes", solver.coarse().nodes()},
            {"m_max", solver.m_max()},
            {"kato_constant_discrete", solver.kato_constant()}}},
          {"channel_table", table}};
}

}  // namespace bdf
