#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bdf/errors.hpp"
#include "bdf/linalg.hpp"
#include "bdf/mean_field.hpp"
#include "bdf/quadrature.hpp"
#include "helpers.hpp"

using namespace bdf;
using namespace testing;
using std::numbers::pi;

TEST_SUITE("state") {

TEST_CASE("operator kernels check Hermiticity and shape") {
  const auto d = disc12();
  Eigen::MatrixXcd m = random_hermitian(d->dim(), 1);
  CHECK_NOTHROW(OperatorKernel(d->grid(), m, true));
  m(0, 1) += 1.0;
  CHECK_THROWS(OperatorKernel(d->grid(), m, true));
  CHECK_THROWS(OperatorKernel(d->grid(), Eigen::MatrixXcd::Zero(3, 3), false));
}

TEST_CASE("blocks of the free sea and of the identity") {
  const auto d = disc12();
  const auto p = d->free_sea();
  CHECK(max_abs(block(p, Sign::minus, Sign::minus).matrix() - p.matrix()) < 1e-15);
  CHECK(max_abs(block(p, Sign::plus, Sign::plus).matrix()) < 1e-15);
  CHECK(max_abs(block(p, Sign::plus, Sign::minus).matrix()) < 1e-15);
  CHECK(max_abs(block(p, Sign::minus, Sign::plus).matrix()) < 1e-15);
  const auto id = OperatorKernel::identity(d->grid());
  CHECK(max_abs(block(id, Sign::plus, Sign::plus).matrix() + block(id, Sign::minus, Sign::minus).matrix() -
                id.matrix()) < 1e-15);
  const OperatorKernel h(d->grid(), random_hermitian(d->dim(), 2), true);
  CHECK(max_abs(block(h, Sign::plus, Sign::minus).matrix() -
                block(h, Sign::minus, Sign::plus).matrix().adjoint()) < 1e-14);
}

TEST_CASE("density examples") {
  const auto d = disc12();
  CHECK(density(OperatorKernel::zero(d->grid())).values().cwiseAbs().maxCoeff() == 0.0);
  // A traceless Fourier multiplier: the free Dirac symbol.
  const OperatorKernel mult(d->grid(), d->free_operator(), true);
  CHECK(density(mult, d->lattice()).values().cwiseAbs().maxCoeff() < 1e-14);
  // Hermitian Q gives a conjugation-symmetric density.
  CHECK(density(perturbation(*d, 3, 0.4), d->lattice()).conjugation_defect() < 1e-15);
}

TEST_CASE("density of a commutator with a convolution potential vanishes") {
  const auto d = disc12();
  const auto rho = random_density(d->lattice(), 4);
  ChargeDensity potential(d->lattice());
  for (std::size_t k = 0; k < d->lattice()->size(); ++k)
    potential.values()[static_cast<Eigen::Index>(k)] = d->coulomb()[k] * rho[k];
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const OperatorKernel q(d->grid(), random_hermitian(d->dim(), seed), true);
    CHECK(commutator_density(potential, q, *d).values().cwiseAbs().maxCoeff() < 1e-12);
  }
  // The restriction of the extended products to the grid is the cutoff
  // potential matrix; what distinguishes the two is the rows leaving the ball.
  const OperatorKernel q(d->grid(), random_hermitian(d->dim(), 9), true);
  const Eigen::MatrixXcd phi = direct_potential(rho, *d);
  const OperatorKernel projected(d->grid(), phi * q.matrix() - q.matrix() * phi, false);
  CHECK(density(projected, d->lattice()).values().cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("Coulomb inner product") {
  const auto d = disc12();
  const auto a = random_density(d->lattice(), 5);
  const auto b = random_density(d->lattice(), 6);
  CHECK(std::abs(coulomb_inner(a, ChargeDensity(d->lattice()))) == 0.0);
  CHECK(std::abs(coulomb_inner(a, b) - std::conj(coulomb_inner(b, a))) < 1e-12);
  const auto lin = coulomb_inner(a, 2.0 * a + b);
  CHECK(std::abs(lin - (2.0 * coulomb_inner(a, a) + coulomb_inner(a, b))) < 1e-10);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto r = random_density(d->lattice(), 100 + s);
    CHECK(coulomb_inner(r, r).real() >= 0.0);
  }
  const auto other = make_discretization({1.0, 8, true}, {1.1, 1.0});
  CHECK_THROWS_AS(coulomb_inner(a, ChargeDensity(other->lattice())), LatticeMismatch);
}

TEST_CASE("unit cell Coulomb integral") {
  // ∫_{[−½,½]²} |k|⁻¹ = 4 ln(1 + √2).
  CHECK(unit_cell_coulomb_integral({0, 0}) == doctest::Approx(4.0 * std::log(1.0 + std::sqrt(2.0))));
  // Away from the origin, a tensor Gauss rule is an independent oracle.
  const auto rule = quad::gauss_legendre(20, -0.5, 0.5);
  for (LatticeCoord c : {LatticeCoord{1, 0}, LatticeCoord{2, -3}, LatticeCoord{7, 7}}) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      for (std::size_t j = 0; j < rule.nodes.size(); ++j)
        s += rule.weights[i] * rule.weights[j] / std::hypot(c.x + rule.nodes[i], c.y + rule.nodes[j]);
    CHECK(unit_cell_coulomb_integral(c) == doctest::Approx(s).epsilon(1e-10));
  }
}

TEST_CASE("Gaussian Coulomb norm against the radial oracle") {
  // Oracle: 2π·2π∫₀^∞ e^{−σ²k²} dk by Gauss-Legendre on a truncated range;
  // closed form 2π^{5/2}/σ.
  const auto d = make_discretization({1.0, 32, true}, {1.1, 1.0});
  for (double sigma : {8.0, 10.0, 16.0}) {
    const auto rule = quad::gauss_legendre(200, 0.0, 10.0 / sigma);
    double oracle = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      oracle += rule.weights[i] * std::exp(-sigma * sigma * rule.nodes[i] * rule.nodes[i]);
    oracle *= 4.0 * pi * pi;
    CHECK(oracle == doctest::Approx(2.0 * std::pow(pi, 2.5) / sigma).epsilon(1e-12));

    ChargeDensity rho(d->lattice());
    for (std::size_t k = 0; k < d->lattice()->size(); ++k) {
      const auto q = d->lattice()->momentum(k);
      rho.values()[static_cast<Eigen::Index>(k)] = std::exp(-0.5 * sigma * sigma * (q.x * q.x + q.y * q.y));
    }
    CHECK(std::abs(coulomb_inner(rho, rho).real() - oracle) / oracle < 0.02);
  }
}

TEST_CASE("state norms") {
  const auto d = disc12();
  const auto zero = norms(OperatorKernel::zero(d->grid()), *d);
  CHECK(zero.y_norm() == 0.0);
  // Pure off-diagonal Q: no kinetic trace norm but a positive HS part.
  const OperatorKernel h(d->grid(), random_hermitian(d->dim(), 7), true);
  const OperatorKernel off(d->grid(),
                           block(h, Sign::plus, Sign::minus).matrix() + block(h, Sign::minus, Sign::plus).matrix(),
                           true);
  const auto n_off = norms(off, *d);
  CHECK(n_off.kinetic_trace_norm < 1e-12);
  CHECK(n_off.hs_weighted_norm > 0.0);
  Eigen::VectorXd root(d->dim());
  for (std::size_t i = 0; i < d->size(); ++i) root[2 * i] = root[2 * i + 1] = std::sqrt(d->abs_free()[i]);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const OperatorKernel q(d->grid(), random_hermitian(d->dim(), 1000 + s), true);
    const auto n = norms(q, *d);
    CHECK(n.kinetic_trace_norm >= 0.0);
    CHECK(n.hs_weighted_norm >= 0.0);
    CHECK(n.coulomb_norm >= 0.0);
    CHECK(n.y_norm() == doctest::Approx(n.kinetic_trace_norm + n.hs_weighted_norm + n.coulomb_norm));
    const Eigen::MatrixXcd diff =
        block(q, Sign::plus, Sign::plus).matrix() - block(q, Sign::minus, Sign::minus).matrix();
    const double tr = (root.asDiagonal() * diff * root.asDiagonal()).trace().real();
    CHECK(n.kinetic_trace_norm >= std::abs(tr) - 1e-10);
  }
}

TEST_CASE("random admissible states") {
  const auto d = disc12();
  const auto id = random_admissible_state(*d, 3, 0.0);
  CHECK(max_abs(id.matrix() - d->free_projector()) < 1e-15);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto g = random_admissible_state(*d, s, 0.7);
    CHECK(projector_defect(g) <= 1e-10);
    const auto ev = linalg::eigvalsh(g.matrix());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      CHECK(std::min(std::abs(ev[i]), std::abs(ev[i] - 1.0)) <= 1e-10);
  }
  const auto a = random_admissible_state(*d, 8, 0.3);
  const auto b = random_admissible_state(*d, 8, 0.3);
  CHECK(a.matrix() == b.matrix());
}

TEST_CASE("projector defect examples") {
  const auto d = disc12();
  CHECK(projector_defect(d->free_sea()) < 1e-15);
  const OperatorKernel half(d->grid(), 0.5 * Eigen::MatrixXcd::Identity(d->dim(), d->dim()), true);
  CHECK(projector_defect(half) == doctest::Approx(0.25));
}

TEST_CASE("discretization requires the offset grid") {
  CHECK_THROWS_AS(make_discretization({1.0, 12, false}, {1.1, 1.0}), ConfigError);
  CHECK_THROWS_AS(make_discretization({1.0, 12, true}, {1.1, 2.0}), ConfigError);
}

}
