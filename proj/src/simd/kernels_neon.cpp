#include <arm_neon.h>

#include <cmath>

#include "bdf/simd/kernels.hpp"

namespace bdf::simd::detail {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    vst1q_f64(y + i + 2, vfmaq_f64(vld1q_f64(y + i + 2), va, vld1q_f64(x + i + 2)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double inv_sqrt_dot(double shift, const double* base, const double* weight, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(shift);
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t r0 = vsqrtq_f64(vaddq_f64(vs, vld1q_f64(base + i)));
    const float64x2_t r1 = vsqrtq_f64(vaddq_f64(vs, vld1q_f64(base + i + 2)));
    acc0 = vaddq_f64(acc0, vdivq_f64(vld1q_f64(weight + i), r0));
    acc1 = vaddq_f64(acc1, vdivq_f64(vld1q_f64(weight + i + 2), r1));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += weight[i] / std::sqrt(shift + base[i]);
  return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

constexpr KernelTable kTable{&axpy, &inv_sqrt_dot, &dot};

}  // namespace

const KernelTable* neon_table() noexcept { return &kTable; }

}  // namespace bdf::simd::detail
