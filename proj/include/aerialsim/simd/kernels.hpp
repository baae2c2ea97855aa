#pragma once

// Data-parallel inner loops with one scalar reference implementation and
// vectorized variants (AVX2 on x86-64, NEON on AArch64) picked at runtime.
//
// Every variant performs the same IEEE operations in the same order (no FMA
// contraction), so results are bitwise identical across variants. The
// equivalence tests depend on that.

#include <cstddef>
#include <string_view>

namespace aerialsim::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

enum class MotorIntegrator { euler, rk4 };

/// Four triangles in structure-of-arrays form: vertex 0 and the two edges
/// e1 = v1 - v0, e2 = v2 - v0. Unused slots have face = -1 and zero edges.
struct alignas(32) TriangleBlock4 {
  double v0x[4], v0y[4], v0z[4];
  double e1x[4], e1y[4], e1z[4];
  double e2x[4], e2y[4], e2z[4];
  int face[4];
};

struct Ray {
  double ox, oy, oz;
  double dx, dy, dz;
  double t_min, t_max;
};

/// Per-lane intersection result; t = +inf for no hit inside [t_min, t_max].
/// (u, v) are the weights of v1 and v2.
struct alignas(32) BlockHits {
  double t[4];
  double u[4];
  double v[4];
};

struct KernelTable {
  Isa isa;

  /// One step of dr/dt = (ref - r) / tau, tau = tau_inc if ref >= r else
  /// tau_dec (chosen at step start), result clamped to [0, rpm_max].
  void (*motor_step)(double* rpm, const double* rpm_ref, const double* tau_inc, const double* tau_dec,
                     const double* rpm_max, std::size_t count, double dt, MotorIntegrator method);

  /// thrust[i] = c_f[i] * rpm[i]^2
  void (*motor_thrust)(const double* rpm, const double* c_f, double* thrust, std::size_t count);

  /// rpm[i] = clamp(sqrt(max(thrust[i], 0) / c_f[i]), 0, rpm_max[i]); returns
  /// how many inputs were negative.
  std::size_t (*thrust_to_rpm)(const double* thrust, const double* c_f, const double* rpm_max, double* rpm,
                               std::size_t count);

  /// Moller-Trumbore against the four triangles of a block.
  void (*intersect_block)(const TriangleBlock4& block, const Ray& ray, BlockHits& out);
};

bool isa_supported(Isa isa);

/// Best ISA the running CPU supports.
Isa detected_isa();

/// Table for a specific ISA; throws if the CPU or build lacks it.
const KernelTable& kernels_for(Isa isa);

/// Process-wide active table. Defaults to detected_isa(), overridable with the
/// AERIALSIM_ISA environment variable (scalar | avx2 | neon) or set_active_isa().
const KernelTable& kernels();
void set_active_isa(Isa isa);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(AERIALSIM_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(AERIALSIM_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace aerialsim::simd
