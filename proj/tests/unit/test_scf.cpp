#include <doctest.h>

#include <sstream>

#include "bdf/dynamics.hpp"
#include "bdf/errors.hpp"
#include "bdf/linalg.hpp"
#include "bdf/mean_field.hpp"
#include "bdf/scf.hpp"
#include "helpers.hpp"

using namespace bdf;
using namespace testing;

TEST_SUITE("scf") {

TEST_CASE("config validation") {
  ScfConfig c;
  CHECK_NOTHROW(c.validate());
  c.mixing = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.mixing = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.tol_commutator = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("residual examples") {
  const auto d = disc12();
  const auto p = d->free_sea();
  auto r = scf_residuals(p, p, d->free_operator());
  CHECK(r.delta_gamma == 0.0);
  CHECK(r.commutator < 1e-14);
  const auto q = perturbation(*d, 4, 0.3);
  const OperatorKernel g(d->grid(), q.matrix() + d->free_projector(), true);
  CHECK(scf_residuals(g, g, d->free_operator()).delta_gamma == 0.0);
  const OperatorKernel plus(d->grid(), Eigen::MatrixXcd::Identity(d->dim(), d->dim()) - d->free_projector(), true);
  CHECK(scf_residuals(p, plus, d->free_operator()).commutator < 1e-14);
}

TEST_CASE("free sea is the fixed point at nu = 0") {
  const auto d = disc12();
  const auto res = solve_ground_state(ChargeDensity(d->lattice()), *d, {});
  CHECK(res.iterations == 1);
  CHECK(linalg::operator_norm(res.q.matrix()) <= 1e-10);
  CHECK(max_abs(res.gamma.matrix() - d->free_projector()) <= 1e-10);
}

TEST_CASE("small Gaussian defect: bracketed energy, stationarity, regression value") {
  const auto d = disc12();
  const auto nu = ExternalCharge::static_defect(d->lattice(), {0.5, 2.0, {}}).nu(0.0);
  ScfConfig cfg;
  const auto res = solve_ground_state(nu, *d, cfg);
  const double dnu = coulomb_inner(nu, nu).real();
  CHECK(res.energy.total >= -0.5 * dnu);
  CHECK(res.energy.total <= 0.0);
  CHECK(projector_defect(res.gamma) <= cfg.tol_projector);
  const auto mf = assemble_mean_field(res.q, nu, *d);
  const Eigen::MatrixXcd comm = mf.matrix * res.gamma.matrix() - res.gamma.matrix() * mf.matrix;
  CHECK(linalg::operator_norm(comm) <= cfg.tol_commutator);
  // Regression value at n = 12, Λ = 1, v_F = 1.1.
  CHECK(res.energy.total == doctest::Approx(-0.00958207668).epsilon(1e-6));
  // Energies along the iteration never increase.
  for (std::size_t i = 1; i < res.residuals.size(); ++i)
    CHECK(res.residuals[i].energy <= res.residuals[i - 1].energy + 1e-10 * std::abs(res.residuals[i - 1].energy) + 1e-14);
}

TEST_CASE("exhausted budget raises with the history") {
  const auto d = disc12();
  const auto nu = ExternalCharge::static_defect(d->lattice(), {0.5, 2.0, {}}).nu(0.0);
  ScfConfig cfg;
  cfg.max_iterations = 3;
  try {
    solve_ground_state(nu, *d, cfg);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.history().size() == 3);
    std::ostringstream out;
    write_residual_csv(e.history(), out);
    const std::string csv = out.str();
    CHECK(csv.rfind("iteration,delta_gamma,commutator,energy,theta\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }
}

}
