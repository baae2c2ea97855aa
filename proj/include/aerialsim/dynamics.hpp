#pragma once

// Rigid-body 6-DOF integration under motor wrenches, gravity and body-frame
// drag, plus bounding-sphere collision flags.

#include "aerialsim/config.hpp"
#include "aerialsim/math.hpp"
#include "aerialsim/state_store.hpp"
#include "aerialsim/world_mesh.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace aerialsim {

struct Wrench {
  Vec3 force = Vec3::Zero();   // N
  Vec3 torque = Vec3::Zero();  // N*m, body frame

  Vec6 stacked() const {
    Vec6 w;
    w << force, torque;
    return w;
  }
  static Wrench from(const Vec6& w) { return Wrench{w.head<3>(), w.tail<3>()}; }
};

struct RigidBodyParams {
  double mass = 1.0;
  Mat3 inertia = Mat3::Identity();
  Mat3 inertia_inv = Mat3::Identity();
  double gravity = 9.81;
  Vec3 drag_linear = Vec3::Zero();
  Vec3 drag_quadratic = Vec3::Zero();
  double collision_radius = 0.2;
  /// Any |p| component, |v| or |Omega| above this flags divergence.
  double divergence_limit = 1e6;

  static RigidBodyParams from(const RobotConfig& robot);
};

/// Body wrench of motors spinning at `rpm`: force = sum u_k axis_k,
/// torque = sum pos_k x u_k axis_k - d_k c_tau u_k axis_k.
Wrench aggregate_motor_wrench(std::span<const double> rpm, std::span<const MotorSpec> motors);

/// Same as aggregate_motor_wrench with thrusts u_k given directly.
Wrench aggregate_from_thrusts(std::span<const double> thrusts, std::span<const MotorSpec> motors);

/// force = -C1 * v - C2 * |v| * v (elementwise), torque = 0.
Wrench drag_wrench(const Vec3& v_body, const RigidBodyParams& params);

/// Advances one env by semi-implicit Euler:
///   v += dt (R (F + drag) / m - g e3);  p += dt v
///   Omega += dt J^-1 (M - Omega x J Omega);  q = normalize(q * exp(dt Omega))
/// Writes R (F + drag) - m g e3 to *net_force_world when given. Returns false
/// (state left as integrated) when the result is non-finite or past the
/// divergence limit.
bool step_rigid_body(StateStore& store, std::size_t env, const Wrench& wrench_body, const RigidBodyParams& params,
                     double dt, Vec3* net_force_world = nullptr);

/// Batched form over env rows [begin, end). Throws DivergenceError naming the
/// first diverged env.
void step_rigid_body(StateStore& store, std::span<const Wrench> wrenches_body, const RigidBodyParams& params,
                     double dt, std::size_t begin, std::size_t end);

/// collided[e] = 1 iff the closest triangle of worlds[e] is within `radius`
/// of the robot center, or the center lies outside `bounds` (skipped when
/// bounds is empty). An empty `worlds` span means no obstacles.
void check_collisions(const StateStore& store, std::span<const WorldMesh> worlds, double radius, const Aabb& bounds,
                      std::span<std::uint8_t> collided, std::size_t begin, std::size_t end);

}  // namespace aerialsim
