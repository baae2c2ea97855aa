#include "aerialsim/imu.hpp"

#include "aerialsim/errors.hpp"
#include "aerialsim/state_store.hpp"

namespace aerialsim {

namespace {

Vec3 draw(CounterRng& rng, const Vec3& sigma) {
  return Vec3(sample_normal(rng, sigma.x()), sample_normal(rng, sigma.y()), sample_normal(rng, sigma.z()));
}

}  // namespace

Vec3 specific_force(const Vec3& net_force_world, const Mat3& R, double mass, double gravity) {
  return R.transpose() * (net_force_world / mass + gravity * Vec3::UnitZ());
}

ImuSample sample_imu(const Vec3& net_force_world, const Vec3& omega_body, const Mat3& R, double mass, double gravity,
                     Eigen::Ref<Vec3> accel_bias, Eigen::Ref<Vec3> gyro_bias, const ImuParams& params,
                     CounterRng& rng) {
  accel_bias += draw(rng, params.sigma_accel_bias);
  gyro_bias += draw(rng, params.sigma_gyro_bias);
  const Vec3 n_a = draw(rng, params.sigma_accel);
  const Vec3 n_g = draw(rng, params.sigma_gyro);
  const Mat3 to_sensor = params.mount.transpose();
  ImuSample s;
  s.accel = to_sensor * specific_force(net_force_world, R, mass, gravity) + accel_bias + n_a;
  s.gyro = to_sensor * omega_body + gyro_bias + n_g;
  return s;
}

ImuParams configure_mounting(const ImuParams& params, const Mat3& mount, const std::array<Range, 3>& rpy_ranges,
                             CounterRng* rng) {
  if (!(mount.transpose() * mount - Mat3::Identity()).isZero(1e-9) || mount.determinant() < 0.0) {
    throw ValidationError("mount", "must be a rotation matrix");
  }
  for (const auto& r : rpy_ranges) {
    if (!(r.lo <= r.hi)) throw ValidationError("mount_randomization", "range must satisfy lo <= hi");
  }
  ImuParams out = params;
  out.mount = mount;
  if (rng) {
    const double roll = sample_uniform(*rng, rpy_ranges[0].lo, rpy_ranges[0].hi);
    const double pitch = sample_uniform(*rng, rpy_ranges[1].lo, rpy_ranges[1].hi);
    const double yaw = sample_uniform(*rng, rpy_ranges[2].lo, rpy_ranges[2].hi);
    out.mount = mount * rot_from_rpy(roll, pitch, yaw);
  }
  return out;
}

void sample_imu_batch(StateStore& store, std::span<const Vec3> net_forces_world, const RobotConfig& robot,
                      std::span<ImuSample> out, std::size_t begin, std::size_t end) {
  for (std::size_t e = begin; e < end; ++e) {
    out[e] = sample_imu(net_forces_world[e], store.angular_velocity(e), store.rotation(e), robot.mass, robot.gravity,
                        store.accel_bias(e), store.gyro_bias(e), robot.imu, store.rng_streams[e]);
  }
}

}  // namespace aerialsim
