#include <doctest.h>

#include <random>
#include <vector>

#include "bdf/mean_field.hpp"
#include "bdf/simd/kernels.hpp"

using namespace bdf;

namespace {

std::vector<simd::Isa> available() {
  std::vector<simd::Isa> out;
  for (auto isa : {simd::Isa::scalar, simd::Isa::avx2, simd::Isa::neon})
    if (simd::isa_supported(isa)) out.push_back(isa);
  return out;
}

struct IsaGuard {
  explicit IsaGuard(simd::Isa isa) { simd::set_isa_override(isa); }
  ~IsaGuard() { simd::set_isa_override(std::nullopt); }
};

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("every variant matches the scalar reference on ragged lengths") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto& ref = simd::kernels_for(simd::Isa::scalar);
  for (auto isa : available()) {
    CAPTURE(simd::isa_name(isa));
    const auto& k = simd::kernels_for(isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 31u, 64u, 257u}) {
      std::vector<double> x(n), y(n), base(n), w(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = u(rng);
        y[i] = u(rng);
        base[i] = 1.0 + u(rng) * 0.9;
        w[i] = u(rng);
      }
      auto y_ref = y, y_var = y;
      ref.axpy(0.37, x.data(), y_ref.data(), n);
      k.axpy(0.37, x.data(), y_var.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y_var[i] == doctest::Approx(y_ref[i]).epsilon(1e-15));
      CHECK(k.dot(x.data(), y.data(), n) ==
            doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(1e-13).scale(1.0));
      CHECK(k.inv_sqrt_dot(0.2, base.data(), w.data(), n) ==
            doctest::Approx(ref.inv_sqrt_dot(0.2, base.data(), w.data(), n)).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("unsupported variants are refused") {
  for (auto isa : {simd::Isa::avx2, simd::Isa::neon})
    if (!simd::isa_supported(isa)) CHECK_THROWS_AS(simd::kernels_for(isa), std::invalid_argument);
}

TEST_CASE("blocked exchange agrees across variants") {
  const auto disc = make_discretization({1.0, 12, true}, {1.1, 1.0});
  const auto gamma = random_admissible_state(*disc, 5, 0.4);
  const OperatorKernel q(disc->grid(), gamma.matrix() - disc->free_projector(), true);
  Eigen::MatrixXcd ref;
  {
    IsaGuard guard(simd::Isa::scalar);
    ref = exchange_operator(q, *disc, ExchangeKernel::blocked);
  }
  for (auto isa : available()) {
    IsaGuard guard(isa);
    CHECK(simd::active_isa() == isa);
    const auto r = exchange_operator(q, *disc, ExchangeKernel::blocked);
    CHECK((r - ref).cwiseAbs().maxCoeff() < 1e-14);
  }
}

}
