#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "bdf/state.hpp"

namespace bdf {

struct EnergyBreakdown {
  double kinetic = 0.0;   // tr(𝒟⁰Q)
  double external = 0.0;  // −D(ρ_Q, ν)
  double direct = 0.0;    // ½D(ρ_Q, ρ_Q)
  double exchange = 0.0;  // −½ tr(R_Q Q)
  double total = 0.0;
};

void to_json(nlohmann::json& j, const EnergyBreakdown& e);

/// tr(𝒟⁰Q). 𝒟⁰ commutes with P⁰±, so this equals the sandwiched
/// tr(|𝒟⁰|^{1/2}(Q⁺⁺ − Q⁻⁻)|𝒟⁰|^{1/2}).
double kinetic_energy(const OperatorKernel& q, const Discretization& disc);

EnergyBreakdown bdf_energy(const OperatorKernel& q, const ChargeDensity& nu,
                           const Discretization& disc);

/// Same, reusing ρ_Q and R_Q computed elsewhere (e.g. by mean-field assembly).
EnergyBreakdown bdf_energy(const OperatorKernel& q, const ChargeDensity& rho_q,
                           const Eigen::MatrixXcd& exchange, const ChargeDensity& nu,
                           const Discretization& disc);

/// 𝒢 = ℰ^φ(Q) + ½D(ν, ν).
double lyapunov(const OperatorKernel& q, const ChargeDensity& nu, const Discretization& disc);
double lyapunov(const EnergyBreakdown& e, const ChargeDensity& nu);

}  // namespace bdf
