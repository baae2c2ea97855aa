// Scalar reference kernels. The vector variants must match these bit for bit.

#include "aerialsim/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aerialsim::simd {

namespace {

void motor_step_scalar(double* rpm, const double* rpm_ref, const double* tau_inc, const double* tau_dec,
                       const double* rpm_max, std::size_t count, double dt, MotorIntegrator method) {
  const double half_dt = 0.5 * dt;
  const double sixth_dt = dt / 6.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = rpm[i];
    const double ref = rpm_ref[i];
    const double tau = ref >= r ? tau_inc[i] : tau_dec[i];
    double next;
    if (method == MotorIntegrator::euler) {
      next = r + dt * ((ref - r) / tau);
    } else {
      const double k1 = (ref - r) / tau;
      const double k2 = (ref - (r + half_dt * k1)) / tau;
      const double k3 = (ref - (r + half_dt * k2)) / tau;
      const double k4 = (ref - (r + dt * k3)) / tau;
      next = r + sixth_dt * (((k1 + 2.0 * k2) + 2.0 * k3) + k4);
    }
    rpm[i] = std::min(std::max(next, 0.0), rpm_max[i]);
  }
}

void motor_thrust_scalar(const double* rpm, const double* c_f, double* thrust, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) thrust[i] = c_f[i] * (rpm[i] * rpm[i]);
}

std::size_t thrust_to_rpm_scalar(const double* thrust, const double* c_f, const double* rpm_max, double* rpm,
                                 std::size_t count) {
  std::size_t negatives = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (thrust[i] < 0.0) ++negatives;
    const double u = std::max(thrust[i], 0.0);
    rpm[i] = std::min(std::sqrt(u / c_f[i]), rpm_max[i]);
  }
  return negatives;
}

void intersect_block_scalar(const TriangleBlock4& b, const Ray& ray, BlockHits& out) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    out.t[k] = kInf;
    out.u[k] = 0.0;
    out.v[k] = 0.0;
    // pvec = dir x e2
    const double px = ray.dy * b.e2z[k] - ray.dz * b.e2y[k];
    const double py = ray.dz * b.e2x[k] - ray.dx * b.e2z[k];
    const double pz = ray.dx * b.e2y[k] - ray.dy * b.e2x[k];
    const double det = (b.e1x[k] * px + b.e1y[k] * py) + b.e1z[k] * pz;
    if (!(std::abs(det) > 1e-300)) continue;
    const double inv = 1.0 / det;
    const double tx = ray.ox - b.v0x[k];
    const double ty = ray.oy - b.v0y[k];
    const double tz = ray.oz - b.v0z[k];
    const double u = ((tx * px + ty * py) + tz * pz) * inv;
    // qvec = tvec x e1
    const double qx = ty * b.e1z[k] - tz * b.e1y[k];
    const double qy = tz * b.e1x[k] - tx * b.e1z[k];
    const double qz = tx * b.e1y[k] - ty * b.e1x[k];
    const double v = ((ray.dx * qx + ray.dy * qy) + ray.dz * qz) * inv;
    const double t = ((b.e2x[k] * qx + b.e2y[k] * qy) + b.e2z[k] * qz) * inv;
    const bool inside = u >= 0.0 && v >= 0.0 && (u + v) <= 1.0 && t >= ray.t_min && t <= ray.t_max;
    if (inside && b.face[k] >= 0) {
      out.t[k] = t;
      out.u[k] = u;
      out.v[k] = v;
    }
  }
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Isa::scalar, motor_step_scalar, motor_thrust_scalar, thrust_to_rpm_scalar,
                               intersect_block_scalar};
}  // namespace detail

}  // namespace aerialsim::simd
