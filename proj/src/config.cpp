#include "aerialsim/config.hpp"

#include "aerialsim/errors.hpp"
#include "json_util.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace aerialsim {

using namespace json_util;

namespace {

constexpr std::array<const char*, 6> kPoseAxes = {"x", "y", "z", "roll", "pitch", "yaw"};

}  // namespace

std::string_view to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::position: return "position";
    case ControlMode::velocity: return "velocity";
    case ControlMode::acceleration: return "acceleration";
    case ControlMode::attitude_thrust: return "attitude_thrust";
    case ControlMode::rate_thrust: return "rate_thrust";
    case ControlMode::body_wrench: return "body_wrench";
    case ControlMode::motor: return "motor";
  }
  return "position";
}

ControlMode control_mode_from_string(std::string_view name) {
  for (auto m : {ControlMode::position, ControlMode::velocity, ControlMode::acceleration,
                 ControlMode::attitude_thrust, ControlMode::rate_thrust, ControlMode::body_wrench,
                 ControlMode::motor}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("control_mode", "unknown mode '" + std::string(name) + "'");
}

ControlGains ControlGains::defaults_for(double mass, const Mat3& inertia) {
  ControlGains g;
  g.k_x = Vec3::Constant(6.0 * mass);
  g.k_v = Vec3::Constant(4.0 * mass);
  g.k_R = 100.0 * inertia.diagonal();
  g.k_omega = 20.0 * inertia.diagonal();
  return g;
}

ImuParams ImuParams::preset(std::string_view name, double dt) {
  // Continuous-time densities converted to per-sample sigmas: sigma = density / sqrt(dt)
  // for white noise and density * sqrt(dt) for the bias random walk.
  ImuParams p;
  const double rt = std::sqrt(dt);
  if (name == "vn100_like") {
    p.sigma_accel = Vec3::Constant(1.4e-3 / rt);
    p.sigma_gyro = Vec3::Constant(6.1e-5 / rt);
    p.sigma_accel_bias = Vec3::Constant(8.0e-5 * rt);
    p.sigma_gyro_bias = Vec3::Constant(3.9e-6 * rt);
  } else if (name == "bmi085_like") {
    p.sigma_accel = Vec3::Constant(1.6e-3 / rt);
    p.sigma_gyro = Vec3::Constant(2.6e-4 / rt);
    p.sigma_accel_bias = Vec3::Constant(4.0e-4 * rt);
    p.sigma_gyro_bias = Vec3::Constant(2.0e-5 * rt);
  } else {
    throw ValidationError("imu.preset", "unknown preset '" + std::string(name) + "'");
  }
  return p;
}

std::filesystem::path EnvironmentConfig::asset_path(std::size_t i) const {
  const std::filesystem::path p(obstacle_assets.at(i));
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Robot

void validate(const RobotConfig& cfg) {
  if (!(cfg.mass > 0.0) || !std::isfinite(cfg.mass)) throw ValidationError("mass", "must be > 0");
  if (!cfg.inertia.isApprox(cfg.inertia.transpose(), 1e-12))
    throw ValidationError("inertia", "must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cfg.inertia, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) throw ValidationError("inertia", "must be positive definite");
  if (cfg.motors.empty()) throw ValidationError("motors", "at least one motor required");
  if (!(cfg.collision_radius > 0.0)) throw ValidationError("collision_radius", "must be > 0");
  if (!(cfg.gravity >= 0.0)) throw ValidationError("gravity", "must be >= 0");
  require_nonnegative(cfg.drag_linear, "drag_linear");
  require_nonnegative(cfg.drag_quadratic, "drag_quadratic");
  require_nonnegative(cfg.gains.k_x, "gains.k_x");
  require_nonnegative(cfg.gains.k_v, "gains.k_v");
  require_nonnegative(cfg.gains.k_R, "gains.k_R");
  require_nonnegative(cfg.gains.k_omega, "gains.k_omega");
  for (std::size_t i = 0; i < cfg.motors.size(); ++i) {
    const auto& m = cfg.motors[i];
    const std::string f = "motors[" + std::to_string(i) + "].";
    if (std::abs(m.thrust_axis.norm() - 1.0) > 1e-9) throw ValidationError(f + "thrust_axis", "must be unit norm");
    if (m.direction != 1 && m.direction != -1) throw ValidationError(f + "direction", "must be +1 or -1");
    if (!(m.thrust_constant > 0.0)) throw ValidationError(f + "thrust_constant", "must be > 0");
    if (!(m.torque_coefficient >= 0.0)) throw ValidationError(f + "torque_coefficient", "must be >= 0");
    if (!(m.tau_inc > 0.0)) throw ValidationError(f + "tau_inc", "must be > 0");
    if (!(m.tau_dec > 0.0)) throw ValidationError(f + "tau_dec", "must be > 0");
    if (!(m.rpm_max > 0.0)) throw ValidationError(f + "rpm_max", "must be > 0");
  }
  const auto& imu = cfg.imu;
  for (const auto* v : {&imu.sigma_accel, &imu.sigma_gyro, &imu.sigma_accel_bias, &imu.sigma_gyro_bias})
    require_nonnegative(*v, "imu");
  if (!(imu.mount.transpose() * imu.mount).isApprox(Mat3::Identity(), 1e-9))
    throw ValidationError("imu.mount", "must be orthonormal");
  if (imu.decimation < 1) throw ValidationError("imu.decimation", "must be >= 1");
}

RobotConfig parse_robot_config(std::string_view text) {
  const json doc = parse_document(text);
  RobotConfig cfg;
  try {
    if (auto it = doc.find("name"); it != doc.end()) cfg.name = it->get<std::string>();
    cfg.mass = as_number(require(doc, "mass"), "mass");
    cfg.inertia = inertia_from_json(require(doc, "inertia"));
    cfg.drag_linear = vec3_or(doc, "drag_linear", Vec3::Zero());
    cfg.drag_quadratic = vec3_or(doc, "drag_quadratic", Vec3::Zero());
    cfg.collision_radius = as_number(require(doc, "collision_radius"), "collision_radius");
    cfg.gravity = number_or(doc, "gravity", 9.81);
    if (auto it = doc.find("control_mode"); it != doc.end())
      cfg.control_mode = control_mode_from_string(it->get<std::string>());

    const json& motors = require(doc, "motors");
    if (!motors.is_array()) throw ValidationError("motors", "expected an array");
    for (std::size_t i = 0; i < motors.size(); ++i) {
      const json& m = motors[i];
      const std::string f = "motors[" + std::to_string(i) + "].";
      MotorSpec spec;
      spec.position = as_vec3(require(m, "position"), f + "position");
      spec.thrust_axis = vec3_or(m, "thrust_axis", Vec3::UnitZ());
      spec.direction = static_cast<int>(as_number(require(m, "direction"), f + "direction"));
      spec.thrust_constant = as_number(require(m, "thrust_constant"), f + "thrust_constant");
      spec.torque_coefficient = number_or(m, "torque_coefficient", 0.0);
      spec.tau_inc = as_number(require(m, "tau_inc"), f + "tau_inc");
      spec.tau_dec = as_number(require(m, "tau_dec"), f + "tau_dec");
      spec.rpm_max = as_number(require(m, "rpm_max"), f + "rpm_max");
      cfg.motors.push_back(spec);
    }

    cfg.gains = ControlGains::defaults_for(cfg.mass, cfg.inertia);
    if (auto it = doc.find("gains"); it != doc.end()) {
      cfg.gains.k_x = vec3_or(*it, "k_x", cfg.gains.k_x);
      cfg.gains.k_v = vec3_or(*it, "k_v", cfg.gains.k_v);
      cfg.gains.k_R = vec3_or(*it, "k_R", cfg.gains.k_R);
      cfg.gains.k_omega = vec3_or(*it, "k_omega", cfg.gains.k_omega);
    }

    if (auto it = doc.find("imu"); it != doc.end()) {
      const json& imu = *it;
      if (auto p = imu.find("preset"); p != imu.end())
        cfg.imu = ImuParams::preset(p->get<std::string>(), number_or(imu, "preset_dt", 0.005));
      cfg.imu.sigma_accel = vec3_or(imu, "sigma_accel", cfg.imu.sigma_accel);
      cfg.imu.sigma_gyro = vec3_or(imu, "sigma_gyro", cfg.imu.sigma_gyro);
      cfg.imu.sigma_accel_bias = vec3_or(imu, "sigma_accel_bias", cfg.imu.sigma_accel_bias);
      cfg.imu.sigma_gyro_bias = vec3_or(imu, "sigma_gyro_bias", cfg.imu.sigma_gyro_bias);
      if (auto m = imu.find("mount"); m != imu.end()) cfg.imu.mount = rotation_from_json(*m, "imu.mount");
      cfg.imu.decimation = static_cast<int>(number_or(imu, "decimation", 1));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed robot config: ") + e.what());
  }
  cfg.inertia = (0.5 * (cfg.inertia + cfg.inertia.transpose())).eval();
  validate(cfg);
  return cfg;
}

RobotConfig load_robot_config(const std::filesystem::path& path) {
  return parse_robot_config(read_text_file(path));
}

std::string serialize(const RobotConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["mass"] = cfg.mass;
  const Mat3& j = cfg.inertia;
  doc["inertia"] = json::array({j(0, 0), j(0, 1), j(0, 2), j(1, 1), j(1, 2), j(2, 2)});
  doc["drag_linear"] = to_json(cfg.drag_linear);
  doc["drag_quadratic"] = to_json(cfg.drag_quadratic);
  doc["collision_radius"] = cfg.collision_radius;
  doc["gravity"] = cfg.gravity;
  doc["control_mode"] = std::string(to_string(cfg.control_mode));
  json motors = json::array();
  for (const auto& m : cfg.motors) {
    motors.push_back(json{{"position", to_json(m.position)},
                          {"thrust_axis", to_json(m.thrust_axis)},
                          {"direction", m.direction},
                          {"thrust_constant", m.thrust_constant},
                          {"torque_coefficient", m.torque_coefficient},
                          {"tau_inc", m.tau_inc},
                          {"tau_dec", m.tau_dec},
                          {"rpm_max", m.rpm_max}});
  }
  doc["motors"] = motors;
  doc["gains"] = json{{"k_x", to_json(cfg.gains.k_x)},
                      {"k_v", to_json(cfg.gains.k_v)},
                      {"k_R", to_json(cfg.gains.k_R)},
                      {"k_omega", to_json(cfg.gains.k_omega)}};
  doc["imu"] = json{{"sigma_accel", to_json(cfg.imu.sigma_accel)},
                    {"sigma_gyro", to_json(cfg.imu.sigma_gyro)},
                    {"sigma_accel_bias", to_json(cfg.imu.sigma_accel_bias)},
                    {"sigma_gyro_bias", to_json(cfg.imu.sigma_gyro_bias)},
                    {"mount", mat3_to_json(cfg.imu.mount)},
                    {"decimation", cfg.imu.decimation}};
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Environment

void validate(const EnvironmentConfig& cfg) {
  for (int i = 0; i < 3; ++i) {
    if (!(cfg.bounds_min[i] < cfg.bounds_max[i])) throw ValidationError("bounds", "box must be non-degenerate");
  }
  if (cfg.obstacle_count < 0) throw ValidationError("obstacle_count", "must be >= 0");
  for (std::size_t i = 0; i < kPoseAxes.size(); ++i)
    require_range(cfg.pose_randomization[i], std::string("pose_randomization.") + kPoseAxes[i]);
  require_range(cfg.scale_randomization, "scale_randomization");
  if (!(cfg.scale_randomization.lo > 0.0)) throw ValidationError("scale_randomization", "scales must be > 0");
}

EnvironmentConfig parse_environment_config(std::string_view text, const std::filesystem::path& base_dir) {
  const json doc = parse_document(text);
  EnvironmentConfig cfg;
  cfg.base_dir = base_dir;
  try {
    const json& bounds = require(doc, "bounds");
    cfg.bounds_min = as_vec3(require(bounds, "min"), "bounds.min");
    cfg.bounds_max = as_vec3(require(bounds, "max"), "bounds.max");
    if (auto it = doc.find("obstacle_assets"); it != doc.end()) {
      if (!it->is_array()) throw ValidationError("obstacle_assets", "expected an array of paths");
      for (const auto& p : *it) cfg.obstacle_assets.push_back(p.get<std::string>());
    }
    cfg.obstacle_count = static_cast<int>(number_or(doc, "obstacle_count", 0));
    if (auto it = doc.find("pose_randomization"); it != doc.end()) {
      for (std::size_t i = 0; i < kPoseAxes.size(); ++i) {
        if (auto a = it->find(kPoseAxes[i]); a != it->end())
          cfg.pose_randomization[i] = as_range(*a, std::string("pose_randomization.") + kPoseAxes[i]);
      }
    }
    if (auto it = doc.find("scale_randomization"); it != doc.end())
      cfg.scale_randomization = as_range(*it, "scale_randomization");
    if (auto it = doc.find("seed"); it != doc.end()) cfg.seed = it->get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed environment config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

EnvironmentConfig load_environment_config(const std::filesystem::path& path) {
  return parse_environment_config(read_text_file(path), path.parent_path());
}

std::string serialize(const EnvironmentConfig& cfg) {
  json doc;
  doc["bounds"] = json{{"min", to_json(cfg.bounds_min)}, {"max", to_json(cfg.bounds_max)}};
  doc["obstacle_assets"] = cfg.obstacle_assets;
  doc["obstacle_count"] = cfg.obstacle_count;
  json pr;
  for (std::size_t i = 0; i < kPoseAxes.size(); ++i) pr[kPoseAxes[i]] = to_json(cfg.pose_randomization[i]);
  doc["pose_randomization"] = pr;
  doc["scale_randomization"] = to_json(cfg.scale_randomization);
  doc["seed"] = cfg.seed;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Sensors

CameraModel CameraModel::from_fov(int width, int height, double hfov_rad, double t_min, double t_max) {
  CameraModel cam;
  cam.width = width;
  cam.height = height;
  cam.fx = 0.5 * width / std::tan(0.5 * hfov_rad);
  cam.fy = cam.fx;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.t_min = t_min;
  cam.t_max = t_max;
  cam.pose_in_body.rotation = forward_camera_rotation();
  return cam;
}

LidarPattern LidarPattern::uniform(int azimuth_count, double az_min, double az_max, int elevation_count,
                                   double el_min, double el_max, double t_min, double t_max) {
  LidarPattern p;
  auto fill = [](std::vector<double>& out, int count, double lo, double hi) {
    out.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  };
  fill(p.azimuths, azimuth_count, az_min, az_max);
  fill(p.elevations, elevation_count, el_min, el_max);
  p.t_min = t_min;
  p.t_max = t_max;
  return p;
}

void validate(const SensorConfig& cfg) {
  if (!(cfg.stereo_baseline >= 0.0)) throw ValidationError("stereo_baseline", "must be >= 0");
  if (cfg.type == SensorType::camera) {
    const auto& c = cfg.camera;
    if (c.width <= 0 || c.height <= 0) throw ValidationError("resolution", "must be positive");
    if (!(c.fx > 0.0) || !(c.fy > 0.0)) throw ValidationError("focal", "must be positive");
    if (!(c.t_min < c.t_max) || c.t_min < 0.0) throw ValidationError("range", "need 0 <= t_min < t_max");
  } else {
    const auto& l = cfg.lidar;
    if (l.azimuths.empty()) throw ValidationError("azimuth", "needs at least one sample");
    if (l.elevations.empty()) throw ValidationError("elevation", "needs at least one sample");
    if (!(l.t_min < l.t_max) || l.t_min < 0.0) throw ValidationError("range", "need 0 <= t_min < t_max");
  }
}

SensorConfig parse_sensor_config(std::string_view text) {
  const json doc = parse_document(text);
  SensorConfig cfg;
  try {
    const std::string type = require(doc, "type").get<std::string>();
    cfg.stereo_baseline = number_or(doc, "stereo_baseline", 0.0);
    Range limits{0.1, 10.0};
    if (auto it = doc.find("range"); it != doc.end()) limits = as_range(*it, "range");
    if (type == "camera") {
      cfg.type = SensorType::camera;
      const auto res = as_numbers(require(doc, "resolution"), "resolution");
      if (res.size() != 2) throw ValidationError("resolution", "expected [width, height]");
      const int w = static_cast<int>(res[0]);
      const int h = static_cast<int>(res[1]);
      if (auto fov = doc.find("hfov"); fov != doc.end()) {
        cfg.camera = CameraModel::from_fov(w, h, as_number(*fov, "hfov"), limits.lo, limits.hi);
      } else {
        const auto f = as_numbers(require(doc, "focal"), "focal");
        if (f.size() != 2) throw ValidationError("focal", "expected [fx, fy]");
        cfg.camera = CameraModel::from_fov(w, h, 1.0, limits.lo, limits.hi);
        cfg.camera.fx = f[0];
        cfg.camera.fy = f[1];
      }
      if (auto pp = doc.find("principal_point"); pp != doc.end()) {
        const auto c = as_numbers(*pp, "principal_point");
        if (c.size() != 2) throw ValidationError("principal_point", "expected [cx, cy]");
        cfg.camera.cx = c[0];
        cfg.camera.cy = c[1];
      }
      if (auto p = doc.find("pose"); p != doc.end())
        cfg.camera.pose_in_body = pose_from_json(*p, "pose", cfg.camera.pose_in_body);
    } else if (type == "lidar") {
      cfg.type = SensorType::lidar;
      auto read_axis = [&](const char* key, std::vector<double>& out) {
        const json& axis = require(doc, key);
        if (axis.is_array()) {
          out = as_numbers(axis, key);
        } else {
          const int n = static_cast<int>(as_number(require(axis, "count"), key));
          const double lo = as_number(require(axis, "min"), key);
          const double hi = as_number(require(axis, "max"), key);
          if (n <= 0) throw ValidationError(key, "count must be positive");
          if (!(lo <= hi)) throw ValidationError(key, "range must satisfy min <= max");
          // full circles skip the duplicated endpoint
          const bool wrap = std::abs((hi - lo) - 2.0 * std::numbers::pi) < 1e-9;
          out.resize(static_cast<std::size_t>(n));
          const int div = wrap ? n : std::max(1, n - 1);
          for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / div;
        }
      };
      read_axis("azimuth", cfg.lidar.azimuths);
      read_axis("elevation", cfg.lidar.elevations);
      cfg.lidar.t_min = limits.lo;
      cfg.lidar.t_max = limits.hi;
      if (auto p = doc.find("pose"); p != doc.end())
        cfg.lidar.pose_in_body = pose_from_json(*p, "pose", cfg.lidar.pose_in_body);
    } else {
      throw ValidationError("type", "expected 'camera' or 'lidar'");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed sensor config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

SensorConfig load_sensor_config(const std::filesystem::path& path) {
  return parse_sensor_config(read_text_file(path));
}

std::string serialize(const SensorConfig& cfg) {
  json doc;
  doc["stereo_baseline"] = cfg.stereo_baseline;
  if (cfg.type == SensorType::camera) {
    const auto& c = cfg.camera;
    doc["type"] = "camera";
    doc["resolution"] = json::array({c.width, c.height});
    doc["focal"] = json::array({c.fx, c.fy});
    doc["principal_point"] = json::array({c.cx, c.cy});
    doc["range"] = json::array({c.t_min, c.t_max});
    doc["pose"] = pose_to_json(c.pose_in_body);
  } else {
    const auto& l = cfg.lidar;
    doc["type"] = "lidar";
    doc["azimuth"] = l.azimuths;
    doc["elevation"] = l.elevations;
    doc["range"] = json::array({l.t_min, l.t_max});
    doc["pose"] = pose_to_json(l.pose_in_body);
  }
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Reference airframes

RobotConfig make_quadrotor_config() {
  RobotConfig cfg;
  cfg.name = "quad_x";
  cfg.mass = 1.2;
  cfg.inertia = Vec3(0.012, 0.012, 0.022).asDiagonal();
  cfg.drag_linear = Vec3(0.05, 0.05, 0.05);
  cfg.drag_quadratic = Vec3(0.01, 0.01, 0.01);
  cfg.collision_radius = 0.2;
  const double arm = 0.15 / std::sqrt(2.0);
  const std::array<Vec3, 4> pos = {Vec3(arm, -arm, 0), Vec3(-arm, arm, 0), Vec3(arm, arm, 0), Vec3(-arm, -arm, 0)};
  const std::array<int, 4> dir = {1, 1, -1, -1};
  for (std::size_t i = 0; i < 4; ++i) {
    MotorSpec m;
    m.position = pos[i];
    m.direction = dir[i];
    m.thrust_constant = 2.0e-8;
    m.torque_coefficient = 0.016;
    m.tau_inc = 0.02;
    m.tau_dec = 0.04;
    m.rpm_max = 20000.0;
    cfg.motors.push_back(m);
  }
  cfg.gains = ControlGains::defaults_for(cfg.mass, cfg.inertia);
  return cfg;
}

RobotConfig make_tilted_octorotor_config() {
  RobotConfig cfg;
  cfg.name = "octo_tilted";
  cfg.mass = 2.0;
  cfg.inertia = Vec3(0.04, 0.04, 0.07).asDiagonal();
  cfg.collision_radius = 0.35;
  cfg.control_mode = ControlMode::body_wrench;
  const double radius = 0.25;
  const double tilt = 0.5;  // rad, alternating sideways tilt
  for (int i = 0; i < 8; ++i) {
    const double yaw = std::numbers::pi / 4.0 * i + std::numbers::pi / 8.0;
    MotorSpec m;
    const double z = (i % 2 == 0) ? 0.05 : -0.05;
    m.position = Vec3(radius * std::cos(yaw), radius * std::sin(yaw), z);
    const Vec3 tangent(-std::sin(yaw), std::cos(yaw), 0.0);
    const double s = (i % 2 == 0) ? 1.0 : -1.0;
    m.thrust_axis = (std::cos(tilt) * Vec3::UnitZ() + s * std::sin(tilt) * tangent).normalized();
    m.direction = (i % 2 == 0) ? 1 : -1;
    m.thrust_constant = 2.0e-8;
    m.torque_coefficient = 0.016;
    m.tau_inc = 0.02;
    m.tau_dec = 0.04;
    m.rpm_max = 22000.0;
    cfg.motors.push_back(m);
  }
  cfg.gains = ControlGains::defaults_for(cfg.mass, cfg.inertia);
  return cfg;
}

}  // namespace aerialsim
