#include <cmath>

#include "bdf/critical_coupling.hpp"
#include "bdf/energy.hpp"
#include "bdf/linalg.hpp"
#include "bdf/mean_field.hpp"
#include "bdf/runner.hpp"

namespace bdf::runner {

void to_json(nlohmann::json& j, const CheckOutcome& c) {
  j = nlohmann::json{{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}};
}

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

std::vector<CheckOutcome> run_invariant_suite(const RunConfig& config) {
  std::vector<CheckOutcome> out;
  const auto upper = [&](std::string name, double value, double bound) {
    out.push_back({std::move(name), value <= bound, value, bound});
  };

  const auto disc = make_discretization(config.grid, config.params);
  const auto gamma = random_admissible_state(*disc, config.seed, config.check.strength);
  const OperatorKernel q(disc->grid(), gamma.matrix() - disc->free_projector(), true);
  const auto& qm = q.matrix();

  upper("projector_defect", projector_defect(gamma), 1e-10);

  const auto pp = block(q, Sign::plus, Sign::plus).matrix();
  const auto pm = block(q, Sign::plus, Sign::minus).matrix();
  const auto mp = block(q, Sign::minus, Sign::plus).matrix();
  const auto mm = block(q, Sign::minus, Sign::minus).matrix();
  upper("block_completeness", max_abs(pp + pm + mp + mm - qm), 1e-12);
  upper("block_adjoint", max_abs(pm - mp.adjoint()), 1e-12);

  const Eigen::MatrixXcd gap = pp - mm - qm * qm;
  upper("qpp_minus_qmm_dominates_q2", -linalg::eigvalsh(0.5 * (gap + gap.adjoint())).minCoeff(), 1e-10);

  const double kinetic = kinetic_energy(q, *disc);
  const auto norms_q = norms(q, *disc);
  upper("hs_norm_control", norms_q.hs_weighted_norm * norms_q.hs_weighted_norm - kinetic, 1e-8);
  upper("kinetic_nonnegative", -kinetic, 0.0);
  upper("trace_norm_dominates_trace", std::abs(kinetic) - norms_q.kinetic_trace_norm, 1e-10);

  Eigen::MatrixXcd free_comm =
      disc->free_operator() * disc->free_projector() - disc->free_projector() * disc->free_operator();
  upper("free_symbol_commutes_with_projector", max_abs(free_comm), 1e-14);

  double veff_gap = 0.0;
  const double floor_veff = config.params.fermi_velocity + g_cached(1.0);
  for (double v : disc->v_eff()) veff_gap = std::max(veff_gap, floor_veff - v);
  upper("veff_lower_bound", veff_gap, 1e-12);

  // Without a configured defect the bounds are exercised against a Gaussian
  // as wide as the grid resolves.
  GaussianDefect probe;
  probe.charge = 0.5;
  probe.width = std::min(2.0, 0.5 / config.grid.spacing());
  ExternalCharge ext = config.scenario.kind == ScenarioSpec::Kind::free_sea
                           ? ExternalCharge::static_defect(disc->lattice(), probe)
                           : make_external_charge(config.scenario, disc->lattice());
  const auto nu = ext.nu(config.scenario.kind == ScenarioSpec::Kind::ramped_defect
                             ? config.scenario.ramp_time
                             : 0.0);
  const auto rho = density(q, disc->lattice());
  const auto naive = exchange_operator(q, *disc, ExchangeKernel::naive);
  const auto blocked = exchange_operator(q, *disc, ExchangeKernel::blocked);
  upper("exchange_kernel_equivalence", max_abs(naive - blocked), 1e-10);

  const auto field = assemble_mean_field(q, rho, nu, *disc);
  upper("mean_field_hermitian", linalg::hermiticity_defect(field.matrix),
        1e-12 * std::max(1.0, max_abs(field.matrix)));

  // V′_Q: the interaction part with ν = 0.
  const Eigen::MatrixXcd v_prime = field.direct - field.exchange;
  const OperatorKernel comm(disc->grid(),
                            v_prime * disc->free_projector() - disc->free_projector() * v_prime, false);
  upper("commutator_pp_block_vanishes", max_abs(block(comm, Sign::plus, Sign::plus).matrix()), 1e-12);
  upper("commutator_mm_block_vanishes", max_abs(block(comm, Sign::minus, Sign::minus).matrix()), 1e-12);

  const Eigen::MatrixXcd phi = direct_potential(rho, *disc);
  ChargeDensity potential(disc->lattice());
  for (std::size_t k = 0; k < disc->lattice()->size(); ++k)
    potential.values()[static_cast<Eigen::Index>(k)] = disc->coulomb()[k] * rho[k];
  upper("density_of_potential_commutator",
        commutator_density(potential, q, *disc).values().cwiseAbs().maxCoeff(), 1e-12);

  const double d_rho = coulomb_inner(rho, rho).real();
  upper("direct_term_identity", std::abs((phi * qm).trace().real() - d_rho), 1e-8);
  upper("coulomb_positive", -d_rho, 0.0);

  const double x = (blocked.transpose().cwiseProduct(qm)).sum().real();
  upper("exchange_positive", -x, 0.0);

  Eigen::VectorXd abs_free(disc->dim());
  for (std::size_t i = 0; i < disc->size(); ++i) abs_free[2 * i] = abs_free[2 * i + 1] = disc->abs_free()[i];
  const double weighted_q2 = (abs_free.asDiagonal() * qm * qm).trace().real();
  const double v_f = config.params.fermi_velocity;
  const double hardy_constant =
      std::pow(std::tgamma(0.25), 2) / (4.0 * std::pow(std::tgamma(0.75), 2) * (v_f + g_cached(1.0)));
  upper("hardy_chain", weighted_q2 > 0 ? blocked.squaredNorm() / (hardy_constant * weighted_q2) : 0.0,
        1.01);

  const double h = CriticalCouplingSolver(config.check.critical_resolution, 2).estimate_h(v_f).h;
  const auto energy = bdf_energy(q, rho, blocked, nu, *disc);
  upper("exchange_kinetic_domination",
        kinetic > 0 ? std::abs(energy.exchange) / (0.5 * h * kinetic) : 0.0, 1.01);
  const double d_nu = coulomb_inner(nu, nu).real();
  upper("energy_lower_bound", -(energy.total + 0.5 * d_nu), 1e-8);
  const double g_functional = lyapunov(energy, nu);
  upper("coercivity",
        (1.0 - 0.5 * h) * kinetic + 0.5 * std::pow(coulomb_norm(rho - nu), 2) - g_functional, 1e-8);
  return out;
}

}  // namespace bdf::runner
