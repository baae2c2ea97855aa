#pragma once

// Small fixed-size geometry helpers shared by every module.
//
// Conventions:
//   * quaternions are scalar-first (w, x, y, z) and rotate body -> world;
//   * skew(a) * b == a.cross(b), vee() is its inverse;
//   * world frame is z-up, gravity along -z.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace aerialsim {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Scalar-first unit quaternion stored as a plain 4-vector (w, x, y, z).
using Quat = Vec4;

inline Quat identity_quat() { return Quat(1.0, 0.0, 0.0, 0.0); }

inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

inline Vec3 vee(const Mat3& s) { return Vec3(s(2, 1), s(0, 2), s(1, 0)); }

/// Hamilton product p ⊗ q.
inline Quat quat_mul(const Quat& p, const Quat& q) {
  return Quat(p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
              p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
              p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
              p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]);
}

inline Quat quat_conj(const Quat& q) { return Quat(q[0], -q[1], -q[2], -q[3]); }

/// Exponential map of a rotation vector (axis * angle) to a unit quaternion.
inline Quat quat_exp(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-12) {
    // second-order series keeps the result unit-norm to rounding
    return Quat(1.0 - angle * angle / 8.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
  }
  const double s = std::sin(0.5 * angle) / angle;
  return Quat(std::cos(0.5 * angle), s * rotvec.x(), s * rotvec.y(), s * rotvec.z());
}

inline Mat3 quat_to_rot(const Quat& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
       2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
       2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return r;
}

inline Quat rot_to_quat(const Mat3& r) {
  const Eigen::Quaterniond q(r);
  Quat out(q.w(), q.x(), q.y(), q.z());
  if (out[0] < 0.0) out = -out;
  return out.normalized();
}

inline Vec3 rotate(const Quat& q, const Vec3& v) { return quat_to_rot(q) * v; }

inline Mat3 rot_x(double a) {
  Mat3 r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}

inline Mat3 rot_y(double a) {
  Mat3 r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}

inline Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

/// Intrinsic Z-Y-X (yaw, pitch, roll) composition: R = Rz(yaw) Ry(pitch) Rx(roll).
inline Mat3 rot_from_rpy(double roll, double pitch, double yaw) {
  return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

inline Quat quat_from_rpy(double roll, double pitch, double yaw) {
  return rot_to_quat(rot_from_rpy(roll, pitch, yaw));
}

/// Inverse of rot_from_rpy; returns (roll, pitch, yaw).
inline Vec3 rpy_from_rot(const Mat3& r) {
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return Vec3(roll, pitch, yaw);
}

inline double yaw_of(const Mat3& r) { return std::atan2(r(1, 0), r(0, 0)); }

/// Rigid transform: x_world = position + rotation * x_local.
struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();

  Vec3 apply(const Vec3& p) const { return position + rotation * p; }
  Pose compose(const Pose& inner) const {
    return Pose{position + rotation * inner.position, rotation * inner.rotation};
  }
};

}  // namespace aerialsim
