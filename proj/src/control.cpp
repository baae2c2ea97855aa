#include "aerialsim/control.hpp"

#include "aerialsim/errors.hpp"
#include "aerialsim/state_store.hpp"

#include <Eigen/SVD>

#include <string>

namespace aerialsim {

AllocationMatrix build_allocation(std::span<const MotorSpec> motors) {
  if (motors.empty()) throw ValidationError("motors", "at least one motor required");
  const auto n = static_cast<Eigen::Index>(motors.size());
  AllocationMatrix a;
  a.B.resize(6, n);
  a.u_max.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const MotorSpec& m = motors[static_cast<std::size_t>(k)];
    a.B.col(k).head<3>() = m.thrust_axis;
    a.B.col(k).tail<3>() = m.position.cross(m.thrust_axis) - m.direction * m.torque_coefficient * m.thrust_axis;
    a.u_max[k] = m.max_thrust();
  }

  const Eigen::JacobiSVD<MatX> svd(a.B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& s = svd.singularValues();
  const double cutoff = 1e-10 * (s.size() > 0 ? s[0] : 0.0);
  VecX s_inv = VecX::Zero(s.size());
  a.rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) {
      s_inv[i] = 1.0 / s[i];
      ++a.rank;
    }
  }
  a.B_pinv = svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
  return a;
}

VecX allocate_unclamped(const Vec6& wrench, const AllocationMatrix& alloc) { return alloc.B_pinv * wrench; }

VecX allocate(const Vec6& wrench, const AllocationMatrix& alloc) {
  VecX u = allocate_unclamped(wrench, alloc);
  for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = std::min(std::max(u[k], 0.0), alloc.u_max[k]);
  return u;
}

Vec3 attitude_error(const Mat3& R, const Mat3& R_d) {
  return 0.5 * vee(R_d.transpose() * R - R.transpose() * R_d);
}

Vec3 rate_error(const Vec3& omega, const Vec3& omega_d, const Mat3& R, const Mat3& R_d) {
  return omega - R.transpose() * (R_d * omega_d);
}

Vec3 body_torque(const Vec3& e_R, const Vec3& e_omega, const Vec3& omega, const Mat3& inertia,
                 const ControlGains& gains) {
  return -gains.k_R.cwiseProduct(e_R) - gains.k_omega.cwiseProduct(e_omega) + omega.cross(inertia * omega);
}

Vec3 desired_force(const Vec3& e_x, const Vec3& e_v, const Vec3& accel_d, double mass, double gravity,
                   const ControlGains& gains) {
  return gains.k_x.cwiseProduct(e_x) + gains.k_v.cwiseProduct(e_v) + mass * gravity * Vec3::UnitZ() +
         mass * accel_d;
}

double position_thrust(const Vec3& e_x, const Vec3& e_v, const Vec3& accel_d, const Mat3& R, double mass,
                       double gravity, const ControlGains& gains) {
  return desired_force(e_x, e_v, accel_d, mass, gravity, gains).dot(R.col(2));
}

namespace {

Mat3 orientation_from_force(const Vec3& force, double yaw_d) {
  const double norm = force.norm();
  if (!(norm > 1e-8)) throw SingularHeadingError("desired force vanishes; thrust direction undefined");
  const Vec3 b3 = force / norm;
  const Vec3 heading(std::cos(yaw_d), std::sin(yaw_d), 0.0);
  const Vec3 c = b3.cross(heading);
  const double cn = c.norm();
  if (cn < 1e-6) throw SingularHeadingError("thrust axis parallel to the heading vector");
  const Vec3 b2 = c / cn;
  Mat3 R_d;
  R_d.col(0) = b2.cross(b3);
  R_d.col(1) = b2;
  R_d.col(2) = b3;
  return R_d;
}

}  // namespace

Mat3 desired_orientation(const Vec3& e_x, const Vec3& e_v, const Vec3& accel_d, double yaw_d, double mass,
                         double gravity, const ControlGains& gains) {
  return orientation_from_force(desired_force(e_x, e_v, accel_d, mass, gravity, gains), yaw_d);
}

ControlCommand ControlCommand::position_setpoint(const Vec3& p, double yaw) {
  ControlCommand c;
  c.mode = ControlMode::position;
  c.position = p;
  c.yaw = yaw;
  return c;
}

ControlCommand ControlCommand::velocity_setpoint(const Vec3& v, double yaw_rate) {
  ControlCommand c;
  c.mode = ControlMode::velocity;
  c.velocity = v;
  c.yaw_rate = yaw_rate;
  return c;
}

ControlCommand ControlCommand::acceleration_setpoint(const Vec3& a, double yaw_rate) {
  ControlCommand c;
  c.mode = ControlMode::acceleration;
  c.acceleration = a;
  c.yaw_rate = yaw_rate;
  return c;
}

ControlCommand ControlCommand::attitude_thrust(const Mat3& R_d, double thrust) {
  ControlCommand c;
  c.mode = ControlMode::attitude_thrust;
  c.attitude = R_d;
  c.thrust = thrust;
  return c;
}

ControlCommand ControlCommand::rate_thrust(const Vec3& omega_d, double thrust) {
  ControlCommand c;
  c.mode = ControlMode::rate_thrust;
  c.body_rate = omega_d;
  c.thrust = thrust;
  return c;
}

ControlCommand ControlCommand::body_wrench(const Vec6& w) {
  ControlCommand c;
  c.mode = ControlMode::body_wrench;
  c.wrench = w;
  return c;
}

ControlCommand ControlCommand::motor_command(const VecX& thrusts) {
  ControlCommand c;
  c.mode = ControlMode::motor;
  c.motor_thrusts = thrusts;
  return c;
}

Vec6 geometric_wrench(const Vec3& e_x, const Vec3& e_v, const Vec3& accel_d, double yaw_d, const Vec3& omega_d,
                      const VehicleState& state, const RobotConfig& robot) {
  const Vec3 force = desired_force(e_x, e_v, accel_d, robot.mass, robot.gravity, robot.gains);
  const Mat3 R_d = orientation_from_force(force, yaw_d);
  const double f = force.dot(state.rotation.col(2));
  const Vec3 e_R = attitude_error(state.rotation, R_d);
  const Vec3 e_w = rate_error(state.omega, omega_d, state.rotation, R_d);
  Vec6 w;
  w << 0.0, 0.0, f, body_torque(e_R, e_w, state.omega, robot.inertia, robot.gains);
  return w;
}

namespace {

Vec6 thrust_and_torque(double thrust, const Vec3& torque) {
  Vec6 w;
  w << 0.0, 0.0, thrust, torque;
  return w;
}

}  // namespace

Vec6 compute_wrench(const VehicleState& state, const ControlCommand& cmd, const RobotConfig& robot,
                    const AllocationMatrix& alloc) {
  const Vec3 zero = Vec3::Zero();
  const double yaw = yaw_of(state.rotation);
  switch (cmd.mode) {
    case ControlMode::position:
      return geometric_wrench(cmd.position - state.position, zero - state.velocity, zero, cmd.yaw, zero, state,
                              robot);
    case ControlMode::velocity:
      return geometric_wrench(zero, cmd.velocity - state.velocity, zero, yaw, Vec3(0.0, 0.0, cmd.yaw_rate), state,
                              robot);
    case ControlMode::acceleration:
      return geometric_wrench(zero, zero, cmd.acceleration, yaw, Vec3(0.0, 0.0, cmd.yaw_rate), state, robot);
    case ControlMode::attitude_thrust: {
      const Vec3 e_R = attitude_error(state.rotation, cmd.attitude);
      const Vec3 e_w = rate_error(state.omega, zero, state.rotation, cmd.attitude);
      return thrust_and_torque(cmd.thrust, body_torque(e_R, e_w, state.omega, robot.inertia, robot.gains));
    }
    case ControlMode::rate_thrust: {
      const Vec3 e_R = attitude_error(state.rotation, state.rotation);
      const Vec3 e_w = rate_error(state.omega, cmd.body_rate, state.rotation, state.rotation);
      return thrust_and_torque(cmd.thrust, body_torque(e_R, e_w, state.omega, robot.inertia, robot.gains));
    }
    case ControlMode::body_wrench:
      return cmd.wrench;
    case ControlMode::motor:
      if (cmd.motor_thrusts.size() != alloc.B.cols())
        throw ValidationError("motor_thrusts", "width must equal motor count");
      return alloc.B * cmd.motor_thrusts;
  }
  return Vec6::Zero();
}

VehicleState vehicle_state(const StateStore& store, std::size_t env) {
  return VehicleState{store.position(env), store.rotation(env), store.linear_velocity(env),
                      store.angular_velocity(env)};
}

void run_controller(const StateStore& store, std::span<const ControlCommand> commands, const RobotConfig& robot,
                    const AllocationMatrix& alloc, std::span<Vec6> wrenches, std::span<std::uint8_t> singular,
                    std::size_t begin, std::size_t end) {
  for (std::size_t e = begin; e < end; ++e) {
    if (commands[e].mode != robot.control_mode && commands[e].mode != ControlMode::body_wrench &&
        commands[e].mode != ControlMode::motor) {
      throw ValidationError("control_mode", "command mode '" + std::string(to_string(commands[e].mode)) +
                                                "' does not match robot mode '" +
                                                std::string(to_string(robot.control_mode)) + "'");
    }
    try {
      wrenches[e] = compute_wrench(vehicle_state(store, e), commands[e], robot, alloc);
      singular[e] = 0;
    } catch (const SingularHeadingError&) {
      singular[e] = 1;
    }
  }
}

}  // namespace aerialsim
