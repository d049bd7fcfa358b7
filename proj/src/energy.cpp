#include "bdf/energy.hpp"

#include "bdf/mean_field.hpp"

namespace bdf {

void to_json(nlohmann::json& j, const EnergyBreakdown& e) {
  j = nlohmann::json{{"kinetic", e.kinetic},
                     {"external", e.external},
                     {"direct", e.direct},
                     {"exchange", e.exchange},
                     {"total", e.total}};
}

double kinetic_energy(const OperatorKernel& q, const Discretization& disc) {
  const auto& d0 = disc.free_operator();
  const auto& m = q.matrix();
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(disc.size()); ++i)
    acc += (d0.block<2, 2>(2 * i, 2 * i) * m.block<2, 2>(2 * i, 2 * i)).trace();
  return acc.real();
}

EnergyBreakdown bdf_energy(const OperatorKernel& q, const ChargeDensity& rho_q,
                           const Eigen::MatrixXcd& exchange, const ChargeDensity& nu,
                           const Discretization& disc) {
  EnergyBreakdown e;
  e.kinetic = kinetic_energy(q, disc);
  e.external = -coulomb_inner(rho_q, nu).real();
  e.direct = 0.5 * coulomb_inner(rho_q, rho_q).real();
  // tr(R Q) = Σ_ij R_ij Q_ji
  e.exchange = -0.5 * (exchange.transpose().cwiseProduct(q.matrix())).sum().real();
  e.total = e.kinetic + e.external + e.direct + e.exchange;
  return e;
}

EnergyBreakdown bdf_energy(const OperatorKernel& q, const ChargeDensity& nu,
                           const Discretization& disc) {
  const auto rho = density(q, disc.lattice());
  return bdf_energy(q, rho, exchange_operator(q, disc), nu, disc);
}

double lyapunov(const EnergyBreakdown& e, const ChargeDensity& nu) {
  return e.total + 0.5 * coulomb_inner(nu, nu).real();
}

double lyapunov(const OperatorKernel& q, const ChargeDensity& nu, const Discretization& disc) {
  return lyapunov(bdf_energy(q, nu, disc), nu);
}

}  // namespace bdf
