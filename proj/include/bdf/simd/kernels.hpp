#pragma once

// Data-parallel inner loops used by the Coulomb assemblies.
//
// Every kernel has a portable scalar reference and, where the target allows,
// an AVX2+FMA (x86-64) or NEON (aarch64) variant. The variant is picked once at
// runtime from CPU features; BDF_SIMD=scalar in the environment forces the
// reference path. Variants agree with the reference up to summation order.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace bdf::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum_i weight[i] / sqrt(shift + base[i]); shift + base[i] > 0
  double (*inv_sqrt_dot)(double shift, const double* base, const double* weight, std::size_t n);
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
};

std::string_view isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;

/// Best supported ISA, unless overridden.
Isa active_isa() noexcept;
/// Forces an ISA for the current process (tests, benchmarks). nullopt restores
/// automatic selection. Throws std::invalid_argument for unsupported ISAs.
void set_isa_override(std::optional<Isa> isa);

const KernelTable& kernels() noexcept;
/// Table of a specific ISA. Throws std::invalid_argument when unsupported.
const KernelTable& kernels_for(Isa isa);

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  kernels().axpy(a, x.data(), y.data(), x.size());
}

inline double inv_sqrt_dot(double shift, std::span<const double> base,
                           std::span<const double> weight) {
  return kernels().inv_sqrt_dot(shift, base.data(), weight.data(), base.size());
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  return kernels().dot(x.data(), y.data(), x.size());
}

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not compiled in
const KernelTable* neon_table() noexcept;  // nullptr when not compiled in
}  // namespace detail

}  // namespace bdf::simd
