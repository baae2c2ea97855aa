// NEON kernels (AArch64), 2 doubles per lane group. Same operation order as
// the scalar reference. min/max are compare + select so signed zeros and NaNs
// follow std::min/std::max.

#include "aerialsim/simd/kernels.hpp"

#include <arm_neon.h>

#include <limits>

namespace aerialsim::simd {

namespace {

// (x < 0) ? 0 : x, then (hi < y) ? hi : y
inline float64x2_t clamp_rpm(float64x2_t x, float64x2_t hi) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t lo = vbslq_f64(vcltq_f64(x, zero), zero, x);
  return vbslq_f64(vcltq_f64(hi, lo), hi, lo);
}

void motor_step_neon(double* rpm, const double* rpm_ref, const double* tau_inc, const double* tau_dec,
                     const double* rpm_max, std::size_t count, double dt, MotorIntegrator method) {
  const float64x2_t vdt = vdupq_n_f64(dt);
  const float64x2_t vhalf = vdupq_n_f64(0.5 * dt);
  const float64x2_t vsixth = vdupq_n_f64(dt / 6.0);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    const float64x2_t r = vld1q_f64(rpm + i);
    const float64x2_t ref = vld1q_f64(rpm_ref + i);
    const float64x2_t tau = vbslq_f64(vcgeq_f64(ref, r), vld1q_f64(tau_inc + i), vld1q_f64(tau_dec + i));
    float64x2_t next;
    if (method == MotorIntegrator::euler) {
      next = vaddq_f64(r, vmulq_f64(vdt, vdivq_f64(vsubq_f64(ref, r), tau)));
    } else {
      const float64x2_t k1 = vdivq_f64(vsubq_f64(ref, r), tau);
      const float64x2_t k2 = vdivq_f64(vsubq_f64(ref, vaddq_f64(r, vmulq_f64(vhalf, k1))), tau);
      const float64x2_t k3 = vdivq_f64(vsubq_f64(ref, vaddq_f64(r, vmulq_f64(vhalf, k2))), tau);
      const float64x2_t k4 = vdivq_f64(vsubq_f64(ref, vaddq_f64(r, vmulq_f64(vdt, k3))), tau);
      float64x2_t sum = vaddq_f64(k1, vmulq_f64(two, k2));
      sum = vaddq_f64(sum, vmulq_f64(two, k3));
      sum = vaddq_f64(sum, k4);
      next = vaddq_f64(r, vmulq_f64(vsixth, sum));
    }
    vst1q_f64(rpm + i, clamp_rpm(next, vld1q_f64(rpm_max + i)));
  }
  if (i < count) {
    detail::kScalarTable.motor_step(rpm + i, rpm_ref + i, tau_inc + i, tau_dec + i, rpm_max + i, count - i, dt,
                                    method);
  }
}

void motor_thrust_neon(const double* rpm, const double* c_f, double* thrust, std::size_t count) {
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    const float64x2_t r = vld1q_f64(rpm + i);
    vst1q_f64(thrust + i, vmulq_f64(vld1q_f64(c_f + i), vmulq_f64(r, r)));
  }
  if (i < count) detail::kScalarTable.motor_thrust(rpm + i, c_f + i, thrust + i, count - i);
}

std::size_t thrust_to_rpm_neon(const double* thrust, const double* c_f, const double* rpm_max, double* rpm,
                               std::size_t count) {
  std::size_t negatives = 0;
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    const float64x2_t u = vld1q_f64(thrust + i);
    const uint64x2_t neg = vcltq_f64(u, zero);
    negatives += (vgetq_lane_u64(neg, 0) ? 1 : 0) + (vgetq_lane_u64(neg, 1) ? 1 : 0);
    const float64x2_t s = vsqrtq_f64(vdivq_f64(vbslq_f64(neg, zero, u), vld1q_f64(c_f + i)));
    const float64x2_t hi = vld1q_f64(rpm_max + i);
    vst1q_f64(rpm + i, vbslq_f64(vcltq_f64(hi, s), hi, s));
  }
  if (i < count) negatives += detail::kScalarTable.thrust_to_rpm(thrust + i, c_f + i, rpm_max + i, rpm + i, count - i);
  return negatives;
}

inline float64x2_t dot3(float64x2_t ax, float64x2_t ay, float64x2_t az, float64x2_t bx, float64x2_t by,
                        float64x2_t bz) {
  return vaddq_f64(vaddq_f64(vmulq_f64(ax, bx), vmulq_f64(ay, by)), vmulq_f64(az, bz));
}

void intersect_block_neon(const TriangleBlock4& b, const Ray& ray, BlockHits& out) {
  const float64x2_t dx = vdupq_n_f64(ray.dx), dy = vdupq_n_f64(ray.dy), dz = vdupq_n_f64(ray.dz);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t inf = vdupq_n_f64(std::numeric_limits<double>::infinity());
  for (int h = 0; h < 4; h += 2) {
    const float64x2_t e1x = vld1q_f64(b.e1x + h), e1y = vld1q_f64(b.e1y + h), e1z = vld1q_f64(b.e1z + h);
    const float64x2_t e2x = vld1q_f64(b.e2x + h), e2y = vld1q_f64(b.e2y + h), e2z = vld1q_f64(b.e2z + h);
    const float64x2_t px = vsubq_f64(vmulq_f64(dy, e2z), vmulq_f64(dz, e2y));
    const float64x2_t py = vsubq_f64(vmulq_f64(dz, e2x), vmulq_f64(dx, e2z));
    const float64x2_t pz = vsubq_f64(vmulq_f64(dx, e2y), vmulq_f64(dy, e2x));
    const float64x2_t det = dot3(e1x, e1y, e1z, px, py, pz);
    uint64x2_t ok = vcgtq_f64(vabsq_f64(det), vdupq_n_f64(1e-300));
    const float64x2_t inv = vdivq_f64(one, det);
    const float64x2_t tx = vsubq_f64(vdupq_n_f64(ray.ox), vld1q_f64(b.v0x + h));
    const float64x2_t ty = vsubq_f64(vdupq_n_f64(ray.oy), vld1q_f64(b.v0y + h));
    const float64x2_t tz = vsubq_f64(vdupq_n_f64(ray.oz), vld1q_f64(b.v0z + h));
    const float64x2_t u = vmulq_f64(dot3(tx, ty, tz, px, py, pz), inv);
    const float64x2_t qx = vsubq_f64(vmulq_f64(ty, e1z), vmulq_f64(tz, e1y));
    const float64x2_t qy = vsubq_f64(vmulq_f64(tz, e1x), vmulq_f64(tx, e1z));
    const float64x2_t qz = vsubq_f64(vmulq_f64(tx, e1y), vmulq_f64(ty, e1x));
    const float64x2_t v = vmulq_f64(dot3(dx, dy, dz, qx, qy, qz), inv);
    const float64x2_t t = vmulq_f64(dot3(e2x, e2y, e2z, qx, qy, qz), inv);
    ok = vandq_u64(ok, vcgeq_f64(u, zero));
    ok = vandq_u64(ok, vcgeq_f64(v, zero));
    ok = vandq_u64(ok, vcleq_f64(vaddq_f64(u, v), one));
    ok = vandq_u64(ok, vcgeq_f64(t, vdupq_n_f64(ray.t_min)));
    ok = vandq_u64(ok, vcleq_f64(t, vdupq_n_f64(ray.t_max)));
    const uint64x2_t used = {b.face[h] >= 0 ? ~0ULL : 0ULL, b.face[h + 1] >= 0 ? ~0ULL : 0ULL};
    ok = vandq_u64(ok, used);
    vst1q_f64(out.t + h, vbslq_f64(ok, t, inf));
    vst1q_f64(out.u + h, vbslq_f64(ok, u, zero));
    vst1q_f64(out.v + h, vbslq_f64(ok, v, zero));
  }
}

}  // namespace

namespace detail {
const KernelTable kNeonTable{Isa::neon, motor_step_neon, motor_thrust_neon, thrust_to_rpm_neon,
                             intersect_block_neon};
}  // namespace detail

}  // namespace aerialsim::simd
