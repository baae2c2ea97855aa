// AVX2 kernels, 4 doubles per lane group. Built with -mavx2 and without FMA;
// operand order of min/max mirrors std::min/std::max in the scalar reference
// so signed zeros and NaNs propagate identically.

#include "aerialsim/simd/kernels.hpp"

#include <immintrin.h>

#include <limits>

namespace aerialsim::simd {

namespace {

// std::max(x, 0.0) == (x < 0) ? 0 : x  ==  _mm256_max_pd(0, x)
inline __m256d clamp_rpm(__m256d x, __m256d hi) {
  const __m256d lo = _mm256_max_pd(_mm256_setzero_pd(), x);
  return _mm256_min_pd(hi, lo);
}

void motor_step_avx2(double* rpm, const double* rpm_ref, const double* tau_inc, const double* tau_dec,
                     const double* rpm_max, std::size_t count, double dt, MotorIntegrator method) {
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d vhalf = _mm256_set1_pd(0.5 * dt);
  const __m256d vsixth = _mm256_set1_pd(dt / 6.0);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d r = _mm256_loadu_pd(rpm + i);
    const __m256d ref = _mm256_loadu_pd(rpm_ref + i);
    const __m256d rising = _mm256_cmp_pd(ref, r, _CMP_GE_OQ);
    const __m256d tau = _mm256_blendv_pd(_mm256_loadu_pd(tau_dec + i), _mm256_loadu_pd(tau_inc + i), rising);
    __m256d next;
    if (method == MotorIntegrator::euler) {
      next = _mm256_add_pd(r, _mm256_mul_pd(vdt, _mm256_div_pd(_mm256_sub_pd(ref, r), tau)));
    } else {
      const __m256d k1 = _mm256_div_pd(_mm256_sub_pd(ref, r), tau);
      const __m256d k2 = _mm256_div_pd(_mm256_sub_pd(ref, _mm256_add_pd(r, _mm256_mul_pd(vhalf, k1))), tau);
      const __m256d k3 = _mm256_div_pd(_mm256_sub_pd(ref, _mm256_add_pd(r, _mm256_mul_pd(vhalf, k2))), tau);
      const __m256d k4 = _mm256_div_pd(_mm256_sub_pd(ref, _mm256_add_pd(r, _mm256_mul_pd(vdt, k3))), tau);
      __m256d sum = _mm256_add_pd(k1, _mm256_mul_pd(two, k2));
      sum = _mm256_add_pd(sum, _mm256_mul_pd(two, k3));
      sum = _mm256_add_pd(sum, k4);
      next = _mm256_add_pd(r, _mm256_mul_pd(vsixth, sum));
    }
    _mm256_storeu_pd(rpm + i, clamp_rpm(next, _mm256_loadu_pd(rpm_max + i)));
  }
  if (i < count) {
    detail::kScalarTable.motor_step(rpm + i, rpm_ref + i, tau_inc + i, tau_dec + i, rpm_max + i, count - i, dt,
                                    method);
  }
}

void motor_thrust_avx2(const double* rpm, const double* c_f, double* thrust, std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d r = _mm256_loadu_pd(rpm + i);
    _mm256_storeu_pd(thrust + i, _mm256_mul_pd(_mm256_loadu_pd(c_f + i), _mm256_mul_pd(r, r)));
  }
  if (i < count) detail::kScalarTable.motor_thrust(rpm + i, c_f + i, thrust + i, count - i);
}

std::size_t thrust_to_rpm_avx2(const double* thrust, const double* c_f, const double* rpm_max, double* rpm,
                               std::size_t count) {
  std::size_t negatives = 0;
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d u = _mm256_loadu_pd(thrust + i);
    negatives += static_cast<std::size_t>(__builtin_popcount(
        static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(u, zero, _CMP_LT_OQ)))));
    const __m256d s = _mm256_sqrt_pd(_mm256_div_pd(_mm256_max_pd(zero, u), _mm256_loadu_pd(c_f + i)));
    _mm256_storeu_pd(rpm + i, _mm256_min_pd(_mm256_loadu_pd(rpm_max + i), s));
  }
  if (i < count) negatives += detail::kScalarTable.thrust_to_rpm(thrust + i, c_f + i, rpm_max + i, rpm + i, count - i);
  return negatives;
}

inline __m256d dot3(__m256d ax, __m256d ay, __m256d az, __m256d bx, __m256d by, __m256d bz) {
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ax, bx), _mm256_mul_pd(ay, by)), _mm256_mul_pd(az, bz));
}

void intersect_block_avx2(const TriangleBlock4& b, const Ray& ray, BlockHits& out) {
  const __m256d dx = _mm256_set1_pd(ray.dx), dy = _mm256_set1_pd(ray.dy), dz = _mm256_set1_pd(ray.dz);
  const __m256d e1x = _mm256_load_pd(b.e1x), e1y = _mm256_load_pd(b.e1y), e1z = _mm256_load_pd(b.e1z);
  const __m256d e2x = _mm256_load_pd(b.e2x), e2y = _mm256_load_pd(b.e2y), e2z = _mm256_load_pd(b.e2z);

  const __m256d px = _mm256_sub_pd(_mm256_mul_pd(dy, e2z), _mm256_mul_pd(dz, e2y));
  const __m256d py = _mm256_sub_pd(_mm256_mul_pd(dz, e2x), _mm256_mul_pd(dx, e2z));
  const __m256d pz = _mm256_sub_pd(_mm256_mul_pd(dx, e2y), _mm256_mul_pd(dy, e2x));
  const __m256d det = dot3(e1x, e1y, e1z, px, py, pz);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
  __m256d ok = _mm256_cmp_pd(_mm256_and_pd(det, abs_mask), _mm256_set1_pd(1e-300), _CMP_GT_OQ);
  const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), det);

  const __m256d tx = _mm256_sub_pd(_mm256_set1_pd(ray.ox), _mm256_load_pd(b.v0x));
  const __m256d ty = _mm256_sub_pd(_mm256_set1_pd(ray.oy), _mm256_load_pd(b.v0y));
  const __m256d tz = _mm256_sub_pd(_mm256_set1_pd(ray.oz), _mm256_load_pd(b.v0z));
  const __m256d u = _mm256_mul_pd(dot3(tx, ty, tz, px, py, pz), inv);

  const __m256d qx = _mm256_sub_pd(_mm256_mul_pd(ty, e1z), _mm256_mul_pd(tz, e1y));
  const __m256d qy = _mm256_sub_pd(_mm256_mul_pd(tz, e1x), _mm256_mul_pd(tx, e1z));
  const __m256d qz = _mm256_sub_pd(_mm256_mul_pd(tx, e1y), _mm256_mul_pd(ty, e1x));
  const __m256d v = _mm256_mul_pd(dot3(dx, dy, dz, qx, qy, qz), inv);
  const __m256d t = _mm256_mul_pd(dot3(e2x, e2y, e2z, qx, qy, qz), inv);

  const __m256d zero = _mm256_setzero_pd();
  ok = _mm256_and_pd(ok, _mm256_cmp_pd(u, zero, _CMP_GE_OQ));
  ok = _mm256_and_pd(ok, _mm256_cmp_pd(v, zero, _CMP_GE_OQ));
  ok = _mm256_and_pd(ok, _mm256_cmp_pd(_mm256_add_pd(u, v), _mm256_set1_pd(1.0), _CMP_LE_OQ));
  ok = _mm256_and_pd(ok, _mm256_cmp_pd(t, _mm256_set1_pd(ray.t_min), _CMP_GE_OQ));
  ok = _mm256_and_pd(ok, _mm256_cmp_pd(t, _mm256_set1_pd(ray.t_max), _CMP_LE_OQ));
  const __m128i faces = _mm_loadu_si128(reinterpret_cast<const __m128i*>(b.face));
  const __m256d used = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpgt_epi32(faces, _mm_set1_epi32(-1))));
  ok = _mm256_and_pd(ok, used);

  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  _mm256_store_pd(out.t, _mm256_blendv_pd(inf, t, ok));
  _mm256_store_pd(out.u, _mm256_blendv_pd(zero, u, ok));
  _mm256_store_pd(out.v, _mm256_blendv_pd(zero, v, ok));
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{Isa::avx2, motor_step_avx2, motor_thrust_avx2, thrust_to_rpm_avx2,
                             intersect_block_avx2};
}  // namespace detail

}  // namespace aerialsim::simd
