#pragma once

// Env-major batched simulation state. Every array has leading dimension
// num_envs and is mutated in place by exactly one phase at a time; inside a
// phase each worker touches only its own env rows.

#include "aerialsim/config.hpp"
#include "aerialsim/math.hpp"
#include "aerialsim/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace aerialsim {

struct ResetSpec {
  /// Per-axis uniform ranges around `position_center` (m).
  std::array<Range, 3> position{};
  Vec3 position_center = Vec3::Zero();
  /// Roll, pitch, yaw uniform ranges (rad).
  std::array<Range, 3> attitude{};
  std::array<Range, 3> velocity{};
  std::array<Range, 3> angular_rate{};
  /// Fixed initial RPM for every motor; ignored when hover_trim is set.
  double initial_rpm = 0.0;
  bool hover_trim = false;

  void validate() const;
};

struct StoreOptions {
  std::uint64_t seed = 0;
  /// Upper bound on num_envs * bytes-per-env.
  std::size_t memory_budget_bytes = std::size_t{8} << 30;
  std::size_t action_width = 0;
  /// Global index of row 0; row e draws from the stream of env first_env_index + e.
  std::size_t first_env_index = 0;
};

class StateStore {
 public:
  StateStore(std::size_t num_envs, std::size_t num_motors, const StoreOptions& options);

  std::size_t num_envs() const { return num_envs_; }
  std::size_t num_motors() const { return num_motors_; }
  std::size_t action_width() const { return action_width_; }
  std::uint64_t seed() const { return seed_; }

  /// Bytes of state owned per environment.
  static std::size_t bytes_per_env(std::size_t num_motors, std::size_t action_width);

  Eigen::Map<Vec3> position(std::size_t e) { return Eigen::Map<Vec3>(&positions[3 * e]); }
  Eigen::Map<const Vec3> position(std::size_t e) const { return Eigen::Map<const Vec3>(&positions[3 * e]); }
  Eigen::Map<Quat> orientation(std::size_t e) { return Eigen::Map<Quat>(&orientations[4 * e]); }
  Eigen::Map<const Quat> orientation(std::size_t e) const { return Eigen::Map<const Quat>(&orientations[4 * e]); }
  Eigen::Map<Vec3> linear_velocity(std::size_t e) { return Eigen::Map<Vec3>(&linear_velocities[3 * e]); }
  Eigen::Map<const Vec3> linear_velocity(std::size_t e) const {
    return Eigen::Map<const Vec3>(&linear_velocities[3 * e]);
  }
  Eigen::Map<Vec3> angular_velocity(std::size_t e) { return Eigen::Map<Vec3>(&angular_velocities[3 * e]); }
  Eigen::Map<const Vec3> angular_velocity(std::size_t e) const {
    return Eigen::Map<const Vec3>(&angular_velocities[3 * e]);
  }
  Eigen::Map<Vec3> accel_bias(std::size_t e) { return Eigen::Map<Vec3>(&imu_bias_accel[3 * e]); }
  Eigen::Map<Vec3> gyro_bias(std::size_t e) { return Eigen::Map<Vec3>(&imu_bias_gyro[3 * e]); }
  Eigen::Map<const Vec3> accel_bias(std::size_t e) const { return Eigen::Map<const Vec3>(&imu_bias_accel[3 * e]); }
  Eigen::Map<const Vec3> gyro_bias(std::size_t e) const { return Eigen::Map<const Vec3>(&imu_bias_gyro[3 * e]); }

  std::span<double> rpm(std::size_t e) { return {&motor_rpm[num_motors_ * e], num_motors_}; }
  std::span<const double> rpm(std::size_t e) const { return {&motor_rpm[num_motors_ * e], num_motors_}; }
  std::span<double> rpm_setpoint(std::size_t e) { return {&motor_rpm_ref[num_motors_ * e], num_motors_}; }
  std::span<double> previous_action(std::size_t e) {
    return {previous_actions.data() + action_width_ * e, action_width_};
  }
  std::span<const double> previous_action(std::size_t e) const {
    return {previous_actions.data() + action_width_ * e, action_width_};
  }

  Mat3 rotation(std::size_t e) const { return quat_to_rot(orientation(e)); }

  /// Re-dimensions the previous-action block (zeroed).
  void set_action_width(std::size_t width);

  // Raw env-major arrays.
  std::vector<double> positions;          // N x 3, world
  std::vector<double> orientations;       // N x 4, scalar-first, body -> world
  std::vector<double> linear_velocities;  // N x 3, world
  std::vector<double> angular_velocities; // N x 3, body
  std::vector<double> motor_rpm;          // N x n
  std::vector<double> motor_rpm_ref;      // N x n
  std::vector<double> previous_actions;   // N x a
  std::vector<double> imu_bias_accel;     // N x 3
  std::vector<double> imu_bias_gyro;      // N x 3
  std::vector<std::int64_t> episode_step; // N
  std::vector<CounterRng> rng_streams;    // N

 private:
  std::size_t num_envs_;
  std::size_t num_motors_;
  std::size_t action_width_;
  std::uint64_t seed_;
};

/// Zeroed store with identity orientations and per-env rng streams keyed by
/// base_seed ^ (first_env_index + row). Throws CapacityError past the memory budget.
StateStore allocate(std::size_t num_envs, const RobotConfig& robot, const StoreOptions& options = {});

/// Resets the listed rows from their own rng streams; other rows are untouched.
void reset_envs(StateStore& store, std::span<const std::size_t> env_ids, const ResetSpec& spec,
                const RobotConfig& robot);

/// Divides each quaternion by its norm. Throws DegenerateQuaternionError if a
/// norm is <= 0.5 (or not finite); norms >= 1.5 are rejected the same way.
void renormalize_orientations(StateStore& store);
void renormalize_orientations(StateStore& store, std::size_t begin, std::size_t end);

/// Motor speed giving total thrust m*g shared equally along +z.
double hover_rpm(const RobotConfig& robot);

}  // namespace aerialsim
