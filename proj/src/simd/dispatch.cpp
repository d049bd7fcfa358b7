#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "bdf/simd/kernels.hpp"

namespace bdf::simd {

namespace detail {
#if !defined(BDF_HAVE_AVX2)
const KernelTable* avx2_table() noexcept { return nullptr; }
#endif
#if !defined(BDF_HAVE_NEON)
const KernelTable* neon_table() noexcept { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() noexcept {
#if defined(BDF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() noexcept {
  if (const char* env = std::getenv("BDF_SIMD"); env && std::strcmp(env, "scalar") == 0)
    return Isa::scalar;
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<const KernelTable*> g_active{nullptr};
std::atomic<int> g_active_isa{-1};

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Isa::neon: return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("SIMD variant not available: " + std::string(isa_name(isa)));
  switch (isa) {
    case Isa::avx2: return *detail::avx2_table();
    case Isa::neon: return *detail::neon_table();
    case Isa::scalar: break;
  }
  return detail::scalar_table();
}

Isa active_isa() noexcept {
  int cur = g_active_isa.load(std::memory_order_acquire);
  if (cur < 0) {
    cur = static_cast<int>(detect());
    g_active_isa.store(cur, std::memory_order_release);
  }
  return static_cast<Isa>(cur);
}

void set_isa_override(std::optional<Isa> isa) {
  const Isa chosen = isa ? *isa : detect();
  const KernelTable& table = kernels_for(chosen);
  g_active_isa.store(static_cast<int>(chosen), std::memory_order_release);
  g_active.store(&table, std::memory_order_release);
}

const KernelTable& kernels() noexcept {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    const Isa isa = active_isa();
    t = isa_supported(isa) ? &kernels_for(isa) : &detail::scalar_table();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

}  // namespace bdf::simd
