#include <cmath>

#include "bdf/simd/kernels.hpp"

namespace bdf::simd::detail {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double inv_sqrt_dot(double shift, const double* base, const double* weight, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += weight[i] / std::sqrt(shift + base[i]);
  return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

constexpr KernelTable kTable{&axpy, &inv_sqrt_dot, &dot};

}  // namespace

const KernelTable& scalar_table() noexcept { return kTable; }

}  // namespace bdf::simd::detail
