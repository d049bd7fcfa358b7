#include <doctest.h>

#include <cmath>

#include "bdf/critical_coupling.hpp"
#include "bdf/dynamics.hpp"
#include "bdf/energy.hpp"
#include "bdf/linalg.hpp"
#include "bdf/mean_field.hpp"
#include "helpers.hpp"

using namespace bdf;
using namespace testing;

namespace {

ChargeDensity gaussian_nu(const Discretization& d, double z, double sigma, Point2 c) {
  return ExternalCharge::static_defect(d.lattice(), {z, sigma, c}).nu(0.0);
}

double h_at(double v) {
  static const CriticalCouplingSolver solver(200, 2);
  return solver.estimate_h(v).h;
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("Q = 0 has zero energy for any nu") {
  const auto d = disc12();
  const auto zero = OperatorKernel::zero(d->grid());
  const auto nu = gaussian_nu(*d, 0.7, 2.0, {0.5, -0.3});
  const auto e = bdf_energy(zero, nu, *d);
  CHECK(e.total == 0.0);
  CHECK(lyapunov(zero, ChargeDensity(d->lattice()), *d) == 0.0);
  CHECK(lyapunov(zero, nu, *d) == doctest::Approx(0.5 * coulomb_inner(nu, nu).real()));
}

TEST_CASE("breakdown sums exactly and has the right signs") {
  const auto d = disc12();
  const auto nu = gaussian_nu(*d, 0.3, 2.5, {});
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto q = perturbation(*d, 800 + s, 0.4);
    const auto e = bdf_energy(q, nu, *d);
    CHECK(e.total == e.kinetic + e.external + e.direct + e.exchange);
    CHECK(e.direct >= 0.0);
    CHECK(e.exchange <= 0.0);
    // The reuse overload gives the same numbers.
    const auto mf = assemble_mean_field(q, nu, *d);
    const auto e2 = bdf_energy(q, density(q, d->lattice()), mf.exchange, nu, *d);
    CHECK(e2.total == doctest::Approx(e.total).epsilon(1e-14));
  }
}

TEST_CASE("kinetic energy equals the sandwiched trace") {
  const auto d = disc12();
  Eigen::VectorXd root(d->dim());
  for (std::size_t i = 0; i < d->size(); ++i) root[2 * i] = root[2 * i + 1] = std::sqrt(d->abs_free()[i]);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto q = perturbation(*d, 900 + s, 0.5);
    const Eigen::MatrixXcd diff =
        block(q, Sign::plus, Sign::plus).matrix() - block(q, Sign::minus, Sign::minus).matrix();
    const double sandwiched = (root.asDiagonal() * diff * root.asDiagonal()).trace().real();
    CHECK(kinetic_energy(q, *d) == doctest::Approx(sandwiched).epsilon(1e-12));
  }
}

TEST_CASE("admissible states: operator inequality and HS control") {
  const auto d = disc12();
  Eigen::VectorXd root(d->dim());
  for (std::size_t i = 0; i < d->size(); ++i) root[2 * i] = root[2 * i + 1] = std::sqrt(d->abs_free()[i]);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto q = perturbation(*d, 1000 + s, 0.05 + 0.03 * static_cast<double>(s % 20));
    const Eigen::MatrixXcd gap = block(q, Sign::plus, Sign::plus).matrix() -
                                 block(q, Sign::minus, Sign::minus).matrix() - q.matrix() * q.matrix();
    CHECK(linalg::eigvalsh(0.5 * (gap + gap.adjoint())).minCoeff() >= -1e-10);
    const double hs = (root.asDiagonal() * q.matrix()).squaredNorm();
    CHECK(kinetic_energy(q, *d) >= hs - 1e-8);
  }
}

TEST_CASE("free-sea energy is positive away from Q = 0 above the critical velocity") {
  const auto d = disc12();
  const ChargeDensity none(d->lattice());
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto q = perturbation(*d, 1100 + s, 0.02 + 0.02 * static_cast<double>(s % 25));
    CHECK(bdf_energy(q, none, *d).total > 0.0);
  }
}

TEST_CASE("energy lower bound and coercivity on random states and defects") {
  const auto d = disc12();
  const double h = h_at(1.1);
  const Point2 centres[] = {{0, 0}, {1, 0}, {-0.5, 2}, {3, -1}, {0.2, 0.2}};
  const double charges[] = {0.1, 0.5, 1.0, 2.0, 4.0};
  for (int k = 0; k < 5; ++k) {
    const auto nu = gaussian_nu(*d, charges[k], 1.5 + 0.3 * k, centres[k]);
    const double dnu = coulomb_inner(nu, nu).real();
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto q = perturbation(*d, 1200 + 10 * k + s, 0.1 + 0.1 * static_cast<double>(s));
      const auto e = bdf_energy(q, nu, *d);
      CHECK(e.total >= -0.5 * dnu - 1e-8);
      const auto rho = density(q, d->lattice());
      const double bound = (1.0 - 0.5 * h) * e.kinetic + 0.5 * std::pow(coulomb_norm(rho - nu), 2);
      CHECK(lyapunov(e, nu) >= bound - 1e-8);
    }
  }
}

TEST_CASE("exchange is dominated by h/2 times the kinetic energy") {
  const auto d = disc12();
  const double h = h_at(1.1);
  const ChargeDensity none(d->lattice());
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto q = perturbation(*d, 1300 + s, 0.1 + 0.05 * static_cast<double>(s));
    const auto e = bdf_energy(q, none, *d);
    CHECK(-e.exchange <= 0.5 * h * e.kinetic * 1.01);
  }
}

}
