#pragma once

#include <random>

#include "bdf/state.hpp"

namespace testing {

inline bdf::DiscretizationPtr disc12() {
  static const auto d = bdf::make_discretization({1.0, 12, true}, {1.1, 1.0});
  return d;
}

inline bdf::OperatorKernel perturbation(const bdf::Discretization& disc, std::uint64_t seed, double eps) {
  const auto gamma = bdf::random_admissible_state(disc, seed, eps);
  return {disc.grid(), gamma.matrix() - disc.free_projector(), true};
}

inline Eigen::MatrixXcd random_hermitian(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  return 0.5 * (a + a.adjoint());
}

// Conjugation-symmetric random density on a lattice.
inline bdf::ChargeDensity random_density(const bdf::LatticePtr& lattice, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  bdf::ChargeDensity rho(lattice);
  for (std::size_t k = 0; k < lattice->size(); ++k) {
    const auto minus = static_cast<std::size_t>(lattice->negated(k));
    if (minus < k) continue;
    const std::complex<double> v = minus == k ? std::complex<double>(g(rng), 0.0)
                                              : std::complex<double>(g(rng), g(rng));
    rho.values()[static_cast<Eigen::Index>(k)] = v;
    rho.values()[static_cast<Eigen::Index>(minus)] = std::conj(v);
  }
  return rho;
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
