#include "bdf/scf.hpp"

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "bdf/linalg.hpp"
#include "bdf/mean_field.hpp"

namespace bdf {

void ScfConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("scf.max_iterations must be >= 1");
  if (!(mixing > 0.0 && mixing <= 1.0)) throw ConfigError("scf.mixing must lie in (0, 1]");
  if (!(tol_projector > 0.0) || !(tol_commutator > 0.0))
    throw ConfigError("scf tolerances must be positive");
  if (max_redamping < 0) throw ConfigError("scf.max_redamping must be >= 0");
}

ScfResidual scf_residuals(const OperatorKernel& gamma_n, const OperatorKernel& gamma_next,
                          const Eigen::MatrixXcd& mean_field) {
  if (!(gamma_n.grid()->spec() == gamma_next.grid()->spec()))
    throw LatticeMismatch("scf_residuals: iterates on different grids");
  const Eigen::MatrixXcd diff = gamma_next.matrix() - gamma_n.matrix();
  const Eigen::MatrixXcd& g = gamma_next.matrix();
  // i[𝒟, γ] is Hermitian when both are.
  const Eigen::MatrixXcd comm = std::complex<double>(0.0, 1.0) * (mean_field * g - g * mean_field);
  return {linalg::hermitian_norm(0.5 * (diff + diff.adjoint())),
          linalg::hermitian_norm(0.5 * (comm + comm.adjoint()))};
}

namespace {

constexpr double kGapWindow = 1e-8;

Eigen::MatrixXcd occupied_projector(const linalg::HermitianEigen& e, double threshold,
                                    bool inclusive) {
  Eigen::Index count = 0;
  while (count < e.values.size() &&
         (inclusive ? e.values[count] <= threshold : e.values[count] < threshold))
    ++count;
  const auto v = e.vectors.leftCols(count);
  return v * v.adjoint();
}

// Nearest projector to a Hermitian matrix with spectrum in [0, 1].
Eigen::MatrixXcd round_to_projector(const Eigen::MatrixXcd& mixed) {
  const auto e = linalg::eigh(0.5 * (mixed + mixed.adjoint()));
  Eigen::Index first = 0;
  while (first < e.values.size() && e.values[first] < 0.5) ++first;
  const auto v = e.vectors.rightCols(e.values.size() - first);
  return v * v.adjoint();
}

struct Iterate {
  Eigen::MatrixXcd gamma;
  OperatorKernel q;
  ChargeDensity rho;
  MeanFieldOperator field;
  EnergyBreakdown energy;
};

Iterate evaluate(Eigen::MatrixXcd gamma, const ChargeDensity& nu, const Discretization& disc) {
  OperatorKernel q(disc.grid(), gamma - disc.free_projector(), true);
  auto rho = density(q, disc.lattice());
  auto field = assemble_mean_field(q, rho, nu, disc);
  auto energy = bdf_energy(q, rho, field.exchange, nu, disc);
  return {std::move(gamma), std::move(q), std::move(rho), std::move(field), energy};
}

}  // namespace

ScfResult solve_ground_state(const ChargeDensity& nu, const Discretization& disc,
                             const ScfConfig& config) {
  config.validate();
  if (!nu.lattice()->same_as(*disc.lattice()))
    throw LatticeMismatch("solve_ground_state: external density on another lattice");

  std::vector<ScfIterate> history;
  std::vector<std::string> warnings;
  bool gap_warning = false;
  Iterate current = evaluate(disc.free_projector(), nu, disc);

  for (int it = 1; it <= config.max_iterations; ++it) {
    const auto spectrum = linalg::eigh(current.field.matrix);
    for (Eigen::Index k = 0; k < spectrum.values.size(); ++k)
      if (std::abs(spectrum.values[k]) < kGapWindow) {
        gap_warning = true;
        std::ostringstream msg;
        msg << "iteration " << it << ": eigenvalue " << spectrum.values[k]
            << " within 1e-8 of zero; occupied set includes (-1e-8, 0]";
        warnings.push_back(msg.str());
        break;
      }
    const Eigen::MatrixXcd target = occupied_projector(spectrum, 0.0, true);

    double theta = config.mixing;
    std::optional<Iterate> next;
    for (int attempt = 0; attempt <= config.max_redamping; ++attempt, theta *= 0.5) {
      Eigen::MatrixXcd mixed = (1.0 - theta) * current.gamma + theta * target;
      Iterate trial = evaluate(round_to_projector(mixed), nu, disc);
      const double slack = 1e-10 * std::abs(current.energy.total) + 1e-14;
      if (trial.energy.total <= current.energy.total + slack) {
        next = std::move(trial);
        break;
      }
    }
    if (!next)
      throw NonConvergence("SCF: no damping factor decreases the energy at iteration " +
                               std::to_string(it),
                           std::move(history));

    const auto res = scf_residuals(OperatorKernel(disc.grid(), current.gamma, true),
                                   OperatorKernel(disc.grid(), next->gamma, true),
                                   next->field.matrix);
    history.push_back({it, res.delta_gamma, res.commutator, next->energy.total, theta});
    current = std::move(*next);
    if (res.delta_gamma <= config.tol_projector && res.commutator <= config.tol_commutator) {
      return ScfResult{current.q,
                       OperatorKernel(disc.grid(), current.gamma, true),
                       it,
                       current.energy,
                       std::move(history),
                       gap_warning,
                       std::move(warnings)};
    }
  }
  throw NonConvergence("SCF: no convergence within " + std::to_string(config.max_iterations) +
                           " iterations",
                       std::move(history));
}

void write_residual_csv(const std::vector<ScfIterate>& history, std::ostream& out) {
  out << "iteration,delta_gamma,commutator,energy,theta\n";
  out << std::setprecision(17);
  for (const auto& h : history)
    out << h.iteration << ',' << h.delta_gamma << ',' << h.commutator << ',' << h.energy << ','
        << h.mixing << '\n';
}

}  // namespace bdf
