#include "aerialsim/motors.hpp"

#include "aerialsim/errors.hpp"

namespace aerialsim {

double thrust_to_rpm(double thrust, const MotorSpec& spec, std::size_t* negative_count) {
  double rpm = 0.0;
  const std::size_t neg =
      simd::detail::kScalarTable.thrust_to_rpm(&thrust, &spec.thrust_constant, &spec.rpm_max, &rpm, 1);
  if (negative_count) *negative_count += neg;
  return rpm;
}

double step_motor(double rpm, double rpm_ref, const MotorSpec& spec, double dt, MotorIntegrator method) {
  if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
  simd::detail::kScalarTable.motor_step(&rpm, &rpm_ref, &spec.tau_inc, &spec.tau_dec, &spec.rpm_max, 1, dt, method);
  return rpm;
}

MotorForces motor_forces(std::span<const double> rpm, std::span<const MotorSpec> specs) {
  MotorForces out;
  out.thrusts.resize(specs.size());
  out.torques.resize(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const double u = specs[k].thrust_constant * (rpm[k] * rpm[k]);
    out.thrusts[k] = u;
    out.torques[k] = -specs[k].direction * specs[k].torque_coefficient * u;
  }
  return out;
}

MotorBank::MotorBank(std::span<const MotorSpec> specs, std::size_t num_envs) : per_env_(specs.size()) {
  const std::size_t total = per_env_ * num_envs;
  tau_inc_.resize(total);
  tau_dec_.resize(total);
  rpm_max_.resize(total);
  c_f_.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    const MotorSpec& m = specs[i % per_env_];
    tau_inc_[i] = m.tau_inc;
    tau_dec_[i] = m.tau_dec;
    rpm_max_[i] = m.rpm_max;
    c_f_[i] = m.thrust_constant;
  }
}

void MotorBank::step(std::span<double> rpm, std::span<const double> rpm_ref, std::size_t env_begin,
                     std::size_t env_end, double dt, MotorIntegrator method) const {
  const std::size_t b = env_begin * per_env_;
  const std::size_t n = (env_end - env_begin) * per_env_;
  simd::kernels().motor_step(rpm.data() + b, rpm_ref.data() + b, tau_inc_.data() + b, tau_dec_.data() + b,
                             rpm_max_.data() + b, n, dt, method);
}

void MotorBank::thrusts(std::span<const double> rpm, std::span<double> out, std::size_t env_begin,
                        std::size_t env_end) const {
  const std::size_t b = env_begin * per_env_;
  const std::size_t n = (env_end - env_begin) * per_env_;
  simd::kernels().motor_thrust(rpm.data() + b, c_f_.data() + b, out.data() + b, n);
}

std::size_t MotorBank::setpoints_from_thrust(std::span<const double> thrust, std::span<double> rpm_ref,
                                             std::size_t env_begin, std::size_t env_end) const {
  const std::size_t b = env_begin * per_env_;
  const std::size_t n = (env_end - env_begin) * per_env_;
  return simd::kernels().thrust_to_rpm(thrust.data() + b, c_f_.data() + b, rpm_max_.data() + b,
                                       rpm_ref.data() + b, n);
}

}  // namespace aerialsim
