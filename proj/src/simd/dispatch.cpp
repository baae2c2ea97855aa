#include "aerialsim/simd/kernels.hpp"

#include "aerialsim/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace aerialsim::simd {

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

Isa isa_from_env(Isa fallback) {
  const char* v = std::getenv("AERIALSIM_ISA");
  if (v == nullptr) return fallback;
  const std::string s(v);
  if (s == "scalar") return Isa::scalar;
  if (s == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  if (s == "neon" && isa_supported(Isa::neon)) return Isa::neon;
  return fallback;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(AERIALSIM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(AERIALSIM_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) throw Error("kernel ISA '" + std::string(to_string(isa)) + "' unavailable");
  switch (isa) {
#if defined(AERIALSIM_HAVE_AVX2)
    case Isa::avx2: return detail::kAvx2Table;
#endif
#if defined(AERIALSIM_HAVE_NEON)
    case Isa::neon: return detail::kNeonTable;
#endif
    default: return detail::kScalarTable;
  }
}

const KernelTable& kernels() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = &kernels_for(isa_from_env(detected_isa()));
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void set_active_isa(Isa isa) { g_active.store(&kernels_for(isa), std::memory_order_release); }

}  // namespace aerialsim::simd
