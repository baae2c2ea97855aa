#include "aerialsim/state_store.hpp"

#include "aerialsim/errors.hpp"

#include <cmath>
#include <string>

namespace aerialsim {

void ResetSpec::validate() const {
  const char* names[] = {"position", "attitude", "velocity", "angular_rate"};
  const std::array<Range, 3>* groups[] = {&position, &attitude, &velocity, &angular_rate};
  for (int g = 0; g < 4; ++g) {
    for (const auto& r : *groups[g]) {
      if (!(r.lo <= r.hi)) throw ValidationError(names[g], "range must satisfy lo <= hi");
    }
  }
  if (!(initial_rpm >= 0.0)) throw ValidationError("initial_rpm", "must be >= 0");
}

StateStore::StateStore(std::size_t num_envs, std::size_t num_motors, const StoreOptions& options)
    : positions(3 * num_envs, 0.0),
      orientations(4 * num_envs, 0.0),
      linear_velocities(3 * num_envs, 0.0),
      angular_velocities(3 * num_envs, 0.0),
      motor_rpm(num_motors * num_envs, 0.0),
      motor_rpm_ref(num_motors * num_envs, 0.0),
      previous_actions(options.action_width * num_envs, 0.0),
      imu_bias_accel(3 * num_envs, 0.0),
      imu_bias_gyro(3 * num_envs, 0.0),
      episode_step(num_envs, 0),
      rng_streams(num_envs),
      num_envs_(num_envs),
      num_motors_(num_motors),
      action_width_(options.action_width),
      seed_(options.seed) {
  for (std::size_t e = 0; e < num_envs; ++e) {
    orientations[4 * e] = 1.0;
    rng_streams[e] = CounterRng::for_env(options.seed, options.first_env_index + e);
  }
}

std::size_t StateStore::bytes_per_env(std::size_t num_motors, std::size_t action_width) {
  return sizeof(double) * (3 + 4 + 3 + 3 + 2 * num_motors + action_width + 3 + 3) + sizeof(std::int64_t) +
         sizeof(CounterRng);
}

void StateStore::set_action_width(std::size_t width) {
  action_width_ = width;
  previous_actions.assign(width * num_envs_, 0.0);
}

StateStore allocate(std::size_t num_envs, const RobotConfig& robot, const StoreOptions& options) {
  if (num_envs < 1) throw ValidationError("num_envs", "must be >= 1");
  const std::size_t per_env = StateStore::bytes_per_env(robot.motors.size(), options.action_width);
  if (num_envs > options.memory_budget_bytes / per_env) {
    throw CapacityError("state for " + std::to_string(num_envs) + " envs exceeds the memory budget of " +
                        std::to_string(options.memory_budget_bytes) + " bytes");
  }
  return StateStore(num_envs, robot.motors.size(), options);
}

double hover_rpm(const RobotConfig& robot) {
  double vertical = 0.0;
  for (const auto& m : robot.motors) vertical += m.thrust_constant * m.thrust_axis.z();
  if (vertical <= 0.0) return 0.0;
  return std::sqrt(robot.mass * robot.gravity / vertical);
}

void reset_envs(StateStore& store, std::span<const std::size_t> env_ids, const ResetSpec& spec,
                const RobotConfig& robot) {
  spec.validate();
  for (std::size_t e : env_ids) {
    if (e >= store.num_envs()) throw IndexError("env index " + std::to_string(e) + " out of range");
  }
  const double trim = spec.hover_trim ? hover_rpm(robot) : spec.initial_rpm;
  for (std::size_t e : env_ids) {
    CounterRng& rng = store.rng_streams[e];
    Vec3 p, rpy, v, w;
    for (int i = 0; i < 3; ++i) p[i] = spec.position_center[i] + sample_uniform(rng, spec.position[i].lo, spec.position[i].hi);
    for (int i = 0; i < 3; ++i) rpy[i] = sample_uniform(rng, spec.attitude[i].lo, spec.attitude[i].hi);
    for (int i = 0; i < 3; ++i) v[i] = sample_uniform(rng, spec.velocity[i].lo, spec.velocity[i].hi);
    for (int i = 0; i < 3; ++i) w[i] = sample_uniform(rng, spec.angular_rate[i].lo, spec.angular_rate[i].hi);
    store.position(e) = p;
    store.orientation(e) = rpy.isZero(0.0) ? identity_quat() : quat_from_rpy(rpy[0], rpy[1], rpy[2]);
    store.linear_velocity(e) = v;
    store.angular_velocity(e) = w;
    for (auto& r : store.rpm(e)) r = trim;
    for (auto& r : store.rpm_setpoint(e)) r = trim;
    for (auto& a : store.previous_action(e)) a = 0.0;
    store.accel_bias(e).setZero();
    store.gyro_bias(e).setZero();
    store.episode_step[e] = 0;
  }
}

void renormalize_orientations(StateStore& store, std::size_t begin, std::size_t end) {
  for (std::size_t e = begin; e < end; ++e) {
    auto q = store.orientation(e);
    const double n = q.norm();
    if (!(n > 0.5 && n < 1.5)) {
      throw DegenerateQuaternionError("orientation of env " + std::to_string(e) + " has norm " + std::to_string(n));
    }
    q /= n;
  }
}

void renormalize_orientations(StateStore& store) { renormalize_orientations(store, 0, store.num_envs()); }

}  // namespace aerialsim
