#pragma once

// Motor-level interface: thrust <-> RPM conversion and first-order RPM
// dynamics with separate spin-up / spin-down time constants.

#include "aerialsim/config.hpp"
#include "aerialsim/simd/kernels.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace aerialsim {

using simd::MotorIntegrator;

/// r_ref = sqrt(u / c_f) clamped to [0, rpm_max]; negative thrusts map to 0
/// and bump *negative_count when given.
double thrust_to_rpm(double thrust, const MotorSpec& spec, std::size_t* negative_count = nullptr);

/// One integration step of dr/dt = (r_ref - r) / tau.
double step_motor(double rpm, double rpm_ref, const MotorSpec& spec, double dt, MotorIntegrator method);

struct MotorForces {
  std::vector<double> thrusts;  // N, along each motor's thrust axis
  std::vector<double> torques;  // N*m, -d * c_tau * u, along each thrust axis
};

MotorForces motor_forces(std::span<const double> rpm, std::span<const MotorSpec> specs);

/// Motor parameters tiled over num_envs so whole env ranges go through the
/// batched kernels in one call.
class MotorBank {
 public:
  MotorBank(std::span<const MotorSpec> specs, std::size_t num_envs);

  std::size_t motors_per_env() const { return per_env_; }

  /// Advances rpm rows [env_begin, env_end) toward rpm_ref.
  void step(std::span<double> rpm, std::span<const double> rpm_ref, std::size_t env_begin, std::size_t env_end,
            double dt, MotorIntegrator method) const;

  /// Writes c_f r^2 for rows [env_begin, env_end).
  void thrusts(std::span<const double> rpm, std::span<double> out, std::size_t env_begin, std::size_t env_end) const;

  /// Converts thrust setpoints to RPM setpoints for rows [env_begin, env_end);
  /// returns the number of negative inputs clamped to zero.
  std::size_t setpoints_from_thrust(std::span<const double> thrust, std::span<double> rpm_ref,
                                    std::size_t env_begin, std::size_t env_end) const;

 private:
  std::size_t per_env_;
  std::vector<double> tau_inc_, tau_dec_, rpm_max_, c_f_;
};

}  // namespace aerialsim
