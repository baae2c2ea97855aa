#pragma once

// Geometric multirotor controllers at every abstraction level and the
// pseudoinverse control allocation from body wrench to motor thrusts.
//
// Sign conventions: e_x = x_d - x and e_v = v_d - v (world frame), so the
// collective thrust f = (k_x e_x + k_v e_v + m g e3 + m xdd_d) . R e3 grows
// when the vehicle sits below its setpoint.

#include "aerialsim/config.hpp"
#include "aerialsim/math.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace aerialsim {

class StateStore;

struct AllocationMatrix {
  Eigen::Matrix<double, 6, Eigen::Dynamic> B;
  Eigen::Matrix<double, Eigen::Dynamic, 6> B_pinv;
  int rank = 0;
  /// Per-motor thrust ceiling c_f * rpm_max^2.
  VecX u_max;
};

/// W = B U with column k = [axis_k; pos_k x axis_k - d_k c_tau axis_k].
/// B+ from an SVD with singular values below 1e-10 * sigma_max dropped.
AllocationMatrix build_allocation(std::span<const MotorSpec> motors);

/// B+ W without clamping (the least-squares solution).
VecX allocate_unclamped(const Vec6& wrench, const AllocationMatrix& alloc);

/// B+ W clamped per motor to [0, u_max].
VecX allocate(const Vec6& wrench, const AllocationMatrix& alloc);

/// e_R = 1/2 (R_d^T R - R^T R_d)^vee
Vec3 attitude_error(const Mat3& R, const Mat3& R_d);

/// e_Omega = Omega - R^T R_d Omega_d
Vec3 rate_error(const Vec3& omega, const Vec3& omega_d, const Mat3& R, const Mat3& R_d);

/// M = -k_R e_R - k_Omega e_Omega + Omega x J Omega (elementwise gains).
Vec3 body_torque(const Vec3& e_R, const Vec3& e_omega, const Vec3& omega, const Mat3& inertia,
                 const ControlGains& gains);

/// Desired force vector k_x e_x + k_v e_v + m g e3 + m xdd_d (world frame).
Vec3 desired_force(const Vec3& e_x, const Vec3& e_v, const Vec3& accel_d, double mass, double gravity,
                   const ControlGains& gains);

/// Collective thrust f = desired_force . R e3.
double position_thrust(const Vec3& e_x, const Vec3& e_v, const Vec3& accel_d, const Mat3& R, double mass,
                       double gravity, const ControlGains& gains);

/// R_d = [b2 x b3, b2, b3] (columns) with b3 along the desired force and b2
/// orthogonal to the heading (cos yaw, sin yaw, 0). Throws
/// SingularHeadingError when the force vanishes or is parallel to the heading.
Mat3 desired_orientation(const Vec3& e_x, const Vec3& e_v, const Vec3& accel_d, double yaw_d, double mass,
                         double gravity, const ControlGains& gains);

/// Tagged command; which fields are read depends on `mode`.
struct ControlCommand {
  ControlMode mode = ControlMode::position;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
  Mat3 attitude = Mat3::Identity();
  double thrust = 0.0;
  Vec3 body_rate = Vec3::Zero();
  Vec6 wrench = Vec6::Zero();
  VecX motor_thrusts;

  static ControlCommand position_setpoint(const Vec3& p, double yaw);
  static ControlCommand velocity_setpoint(const Vec3& v, double yaw_rate);
  static ControlCommand acceleration_setpoint(const Vec3& a, double yaw_rate);
  static ControlCommand attitude_thrust(const Mat3& R_d, double thrust);
  static ControlCommand rate_thrust(const Vec3& omega_d, double thrust);
  static ControlCommand body_wrench(const Vec6& w);
  static ControlCommand motor_command(const VecX& thrusts);
};

struct VehicleState {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  Vec3 velocity = Vec3::Zero();  // world
  Vec3 omega = Vec3::Zero();     // body
};

/// Shared core of the position / velocity / acceleration controllers.
Vec6 geometric_wrench(const Vec3& e_x, const Vec3& e_v, const Vec3& accel_d, double yaw_d, const Vec3& omega_d,
                      const VehicleState& state, const RobotConfig& robot);

/// Body wrench [f_x f_y f_z M_x M_y M_z] for one vehicle. Motor-mode
/// commands are not wrenches; they yield B * U_ref.
Vec6 compute_wrench(const VehicleState& state, const ControlCommand& cmd, const RobotConfig& robot,
                    const AllocationMatrix& alloc);

VehicleState vehicle_state(const StateStore& store, std::size_t env);

/// Batched controller over env rows [begin, end). Envs whose desired
/// orientation is singular keep their previous entry in `wrenches` and get
/// singular[e] = 1; all others get singular[e] = 0.
void run_controller(const StateStore& store, std::span<const ControlCommand> commands, const RobotConfig& robot,
                    const AllocationMatrix& alloc, std::span<Vec6> wrenches, std::span<std::uint8_t> singular,
                    std::size_t begin, std::size_t end);

}  // namespace aerialsim
