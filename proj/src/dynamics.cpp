#include "aerialsim/dynamics.hpp"

#include "aerialsim/errors.hpp"

#include <cmath>
#include <string>

namespace aerialsim {

RigidBodyParams RigidBodyParams::from(const RobotConfig& robot) {
  RigidBodyParams p;
  p.mass = robot.mass;
  p.inertia = robot.inertia;
  p.inertia_inv = robot.inertia.inverse();
  p.gravity = robot.gravity;
  p.drag_linear = robot.drag_linear;
  p.drag_quadratic = robot.drag_quadratic;
  p.collision_radius = robot.collision_radius;
  return p;
}

Wrench aggregate_from_thrusts(std::span<const double> thrusts, std::span<const MotorSpec> motors) {
  Wrench w;
  for (std::size_t k = 0; k < motors.size(); ++k) {
    const MotorSpec& m = motors[k];
    const Vec3 f = thrusts[k] * m.thrust_axis;
    w.force += f;
    w.torque += m.position.cross(f) + (-m.direction * m.torque_coefficient * thrusts[k]) * m.thrust_axis;
  }
  return w;
}

Wrench aggregate_motor_wrench(std::span<const double> rpm, std::span<const MotorSpec> motors) {
  Wrench w;
  for (std::size_t k = 0; k < motors.size(); ++k) {
    const MotorSpec& m = motors[k];
    const double u = m.thrust_constant * (rpm[k] * rpm[k]);
    const Vec3 f = u * m.thrust_axis;
    w.force += f;
    w.torque += m.position.cross(f) + (-m.direction * m.torque_coefficient * u) * m.thrust_axis;
  }
  return w;
}

Wrench drag_wrench(const Vec3& v_body, const RigidBodyParams& params) {
  Wrench w;
  w.force = -params.drag_linear.cwiseProduct(v_body) -
            params.drag_quadratic.cwiseProduct(v_body.cwiseAbs().cwiseProduct(v_body));
  return w;
}

bool step_rigid_body(StateStore& store, std::size_t env, const Wrench& wrench_body, const RigidBodyParams& params,
                     double dt, Vec3* net_force_world) {
  auto p = store.position(env);
  auto q = store.orientation(env);
  auto v = store.linear_velocity(env);
  auto omega = store.angular_velocity(env);

  const Mat3 R = quat_to_rot(q);
  const Vec3 force_body = wrench_body.force + drag_wrench(R.transpose() * v, params).force;
  const Vec3 net = R * force_body - params.mass * params.gravity * Vec3::UnitZ();
  if (net_force_world) *net_force_world = net;

  v += dt * (net / params.mass);
  p += dt * v;
  const Vec3 j_omega = params.inertia * omega;
  omega += dt * (params.inertia_inv * (wrench_body.torque - omega.cross(j_omega)));
  const Quat next = quat_mul(q, quat_exp(dt * omega));
  const double n = next.norm();
  if (!(n > 0.5 && n < 1.5)) return false;
  q = next / n;

  const double lim = params.divergence_limit;
  const bool finite = p.allFinite() && v.allFinite() && omega.allFinite();
  return finite && p.cwiseAbs().maxCoeff() <= lim && v.norm() <= lim && omega.norm() <= lim;
}

void step_rigid_body(StateStore& store, std::span<const Wrench> wrenches_body, const RigidBodyParams& params,
                     double dt, std::size_t begin, std::size_t end) {
  if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
  for (std::size_t e = begin; e < end; ++e) {
    if (!step_rigid_body(store, e, wrenches_body[e], params, dt)) {
      throw DivergenceError("rigid-body state of env " + std::to_string(e) + " diverged");
    }
  }
}

void check_collisions(const StateStore& store, std::span<const WorldMesh> worlds, double radius, const Aabb& bounds,
                      std::span<std::uint8_t> collided, std::size_t begin, std::size_t end) {
  const bool check_bounds = !bounds.empty();
  for (std::size_t e = begin; e < end; ++e) {
    const Vec3 p = store.position(e);
    bool hit = check_bounds && ((p.array() < bounds.lo.array()).any() || (p.array() > bounds.hi.array()).any());
    if (!hit && !worlds.empty()) hit = worlds[e].closest_distance(p) <= radius;
    collided[e] = hit ? 1 : 0;
  }
}

}  // namespace aerialsim
