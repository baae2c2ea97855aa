#pragma once

// Accelerometer and gyroscope model with white noise and a discrete-time
// bias random walk. Biases and noise live in the sensor frame.

#include "aerialsim/config.hpp"
#include "aerialsim/math.hpp"
#include "aerialsim/rng.hpp"

#include <array>
#include <cstddef>
#include <span>

namespace aerialsim {

class StateStore;

struct ImuSample {
  Vec3 accel = Vec3::Zero();  // m/s^2, sensor frame
  Vec3 gyro = Vec3::Zero();   // rad/s, sensor frame
};

/// Specific force in the body frame: R^T (F_net / m + g e3).
Vec3 specific_force(const Vec3& net_force_world, const Mat3& R, double mass, double gravity);

/// Advances both biases by one random-walk step, then returns
///   accel = mount^T a_true + b_a + n_a,  gyro = mount^T Omega + b_g + n_g.
/// Draw order per call: b_a (xyz), b_g (xyz), n_a (xyz), n_g (xyz); a zero
/// sigma consumes no draw.
ImuSample sample_imu(const Vec3& net_force_world, const Vec3& omega_body, const Mat3& R, double mass, double gravity,
                     Eigen::Ref<Vec3> accel_bias, Eigen::Ref<Vec3> gyro_bias, const ImuParams& params,
                     CounterRng& rng);

/// Returns `params` with mount = mount * Rz(yaw) Ry(pitch) Rx(roll), the
/// angles drawn from `rpy_ranges` (roll, pitch, yaw) when an rng is given.
/// Throws ValidationError if `mount` is not orthonormal.
ImuParams configure_mounting(const ImuParams& params, const Mat3& mount, const std::array<Range, 3>& rpy_ranges = {},
                             CounterRng* rng = nullptr);

/// Samples env rows [begin, end) using each env's rng stream and bias rows.
void sample_imu_batch(StateStore& store, std::span<const Vec3> net_forces_world, const RobotConfig& robot,
                      std::span<ImuSample> out, std::size_t begin, std::size_t end);

}  // namespace aerialsim
