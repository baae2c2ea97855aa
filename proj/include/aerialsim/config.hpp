#pragma once

// Robot, environment, sensor and task configuration documents.
//
// Documents are JSON objects. Units are SI throughout and angles are radians.
// Loading validates every invariant and throws ParseError for malformed text
// or ValidationError naming the offending field.

#include "aerialsim/math.hpp"
#include "aerialsim/sensor_types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace aerialsim {

enum class ControlMode {
  position,
  velocity,
  acceleration,
  attitude_thrust,
  rate_thrust,
  body_wrench,
  motor,
};

std::string_view to_string(ControlMode mode);
ControlMode control_mode_from_string(std::string_view name);

/// Per-axis controller weights. Values are used as-is by the controllers;
/// defaults_for() returns the mass/inertia-scaled tuning.
struct ControlGains {
  Vec3 k_x = Vec3::Zero();
  Vec3 k_v = Vec3::Zero();
  Vec3 k_R = Vec3::Zero();
  Vec3 k_omega = Vec3::Zero();

  static ControlGains defaults_for(double mass, const Mat3& inertia);

  friend bool operator==(const ControlGains&, const ControlGains&) = default;
};

struct MotorSpec {
  Vec3 position = Vec3::Zero();       // m, body frame
  Vec3 thrust_axis = Vec3::UnitZ();   // unit, body frame
  int direction = 1;                  // +1 / -1
  double thrust_constant = 0.0;       // N / RPM^2
  double torque_coefficient = 0.0;    // m
  double tau_inc = 0.02;              // s
  double tau_dec = 0.04;              // s
  double rpm_max = 20000.0;

  double max_thrust() const { return thrust_constant * rpm_max * rpm_max; }

  friend bool operator==(const MotorSpec&, const MotorSpec&) = default;
};

/// IMU noise model. Every sigma is a per-sample standard deviation.
struct ImuParams {
  Vec3 sigma_accel = Vec3::Zero();
  Vec3 sigma_gyro = Vec3::Zero();
  Vec3 sigma_accel_bias = Vec3::Zero();
  Vec3 sigma_gyro_bias = Vec3::Zero();
  /// Sensor orientation in the body frame; measurements are mount^T * v_body.
  Mat3 mount = Mat3::Identity();
  /// Keep every k-th physics substep sample.
  int decimation = 1;

  /// Named illustrative presets: "vn100_like", "bmi085_like". Values are
  /// invented placeholders, not datasheet figures.
  static ImuParams preset(std::string_view name, double dt);

  friend bool operator==(const ImuParams&, const ImuParams&) = default;
};

struct RobotConfig {
  std::string name = "robot";
  double mass = 1.0;
  Mat3 inertia = Mat3::Identity();
  std::vector<MotorSpec> motors;
  Vec3 drag_linear = Vec3::Zero();
  Vec3 drag_quadratic = Vec3::Zero();
  double collision_radius = 0.2;
  double gravity = 9.81;
  ControlMode control_mode = ControlMode::position;
  ControlGains gains;
  ImuParams imu;

  friend bool operator==(const RobotConfig&, const RobotConfig&) = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct EnvironmentConfig {
  Vec3 bounds_min = Vec3(-10, -10, 0);
  Vec3 bounds_max = Vec3(10, 10, 10);
  std::vector<std::string> obstacle_assets;  // paths as written; empty places unit cubes
  int obstacle_count = 0;
  /// x, y, z (m), roll, pitch, yaw (rad).
  std::array<Range, 6> pose_randomization{};
  Range scale_randomization{1.0, 1.0};
  std::uint64_t seed = 0;
  /// Directory the document was loaded from; relative asset paths resolve against it.
  std::filesystem::path base_dir;

  std::filesystem::path asset_path(std::size_t i) const;

  friend bool operator==(const EnvironmentConfig& a, const EnvironmentConfig& b) {
    return a.bounds_min == b.bounds_min && a.bounds_max == b.bounds_max &&
           a.obstacle_assets == b.obstacle_assets && a.obstacle_count == b.obstacle_count &&
           a.pose_randomization == b.pose_randomization &&
           a.scale_randomization == b.scale_randomization && a.seed == b.seed;
  }
};

enum class SensorType { camera, lidar };

struct SensorConfig {
  SensorType type = SensorType::camera;
  CameraModel camera;
  LidarPattern lidar;
  /// 0 disables stereo-shadow masking.
  double stereo_baseline = 0.0;

  friend bool operator==(const SensorConfig& a, const SensorConfig& b) {
    if (a.type != b.type || a.stereo_baseline != b.stereo_baseline) return false;
    return a.type == SensorType::camera ? a.camera == b.camera : a.lidar == b.lidar;
  }
};

RobotConfig parse_robot_config(std::string_view text);
RobotConfig load_robot_config(const std::filesystem::path& path);
std::string serialize(const RobotConfig& cfg);

EnvironmentConfig parse_environment_config(std::string_view text,
                                           const std::filesystem::path& base_dir = {});
EnvironmentConfig load_environment_config(const std::filesystem::path& path);
std::string serialize(const EnvironmentConfig& cfg);

SensorConfig parse_sensor_config(std::string_view text);
SensorConfig load_sensor_config(const std::filesystem::path& path);
std::string serialize(const SensorConfig& cfg);

void validate(const RobotConfig& cfg);
void validate(const EnvironmentConfig& cfg);
void validate(const SensorConfig& cfg);

/// Planar X-configuration quadrotor used by tests, benchmarks and the CLI defaults.
RobotConfig make_quadrotor_config();

/// Octorotor with motors on two planes and tilted thrust axes (fully actuated).
RobotConfig make_tilted_octorotor_config();

std::string read_text_file(const std::filesystem::path& path);

}  // namespace aerialsim
