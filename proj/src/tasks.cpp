#include "aerialsim/tasks.hpp"

#include "aerialsim/errors.hpp"
#include "aerialsim/parallel.hpp"
#include "aerialsim/scene.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace aerialsim {

using namespace json_util;

namespace {

constexpr int kMaxPlacementTries = 10000;

ControlMode control_mode_for(ActionMode mode) {
  switch (mode) {
    case ActionMode::position: return ControlMode::position;
    case ActionMode::velocity: return ControlMode::velocity;
    case ActionMode::acceleration: return ControlMode::acceleration;
    case ActionMode::motor: return ControlMode::motor;
  }
  return ControlMode::position;
}

std::array<Range, 3> ranges_from_json(const json& v, const std::string& field) {
  std::array<Range, 3> out{};
  if (v.is_object()) {
    const char* axes[] = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i) {
      if (auto it = v.find(axes[i]); it != v.end()) out[static_cast<std::size_t>(i)] = as_range(*it, field + "." + axes[i]);
    }
    return out;
  }
  if (!v.is_array() || v.size() != 3) throw ValidationError(field, "expected three [lo, hi] ranges");
  for (std::size_t i = 0; i < 3; ++i) out[i] = as_range(v[i], field);
  return out;
}

ResetSpec reset_from_json(const json& v, ResetSpec spec) {
  if (auto it = v.find("position"); it != v.end()) spec.position = ranges_from_json(*it, "reset.position");
  spec.position_center = vec3_or(v, "position_center", spec.position_center);
  if (auto it = v.find("attitude"); it != v.end()) spec.attitude = ranges_from_json(*it, "reset.attitude");
  if (auto it = v.find("velocity"); it != v.end()) spec.velocity = ranges_from_json(*it, "reset.velocity");
  if (auto it = v.find("angular_rate"); it != v.end()) spec.angular_rate = ranges_from_json(*it, "reset.angular_rate");
  spec.initial_rpm = number_or(v, "initial_rpm", spec.initial_rpm);
  if (auto it = v.find("hover_trim"); it != v.end()) spec.hover_trim = it->get<bool>();
  return spec;
}

std::array<Range, 3> symmetric(double a, double b, double c) { return {Range{-a, a}, Range{-b, b}, Range{-c, c}}; }

}  // namespace

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::position_setpoint: return "position_setpoint";
    case TaskKind::motor_control: return "motor_control";
    case TaskKind::navigation: return "navigation";
  }
  return "position_setpoint";
}

std::string_view to_string(ActionMode mode) {
  switch (mode) {
    case ActionMode::position: return "position";
    case ActionMode::velocity: return "velocity";
    case ActionMode::acceleration: return "acceleration";
    case ActionMode::motor: return "motor";
  }
  return "velocity";
}

TaskKind task_kind_from_string(std::string_view name) {
  for (TaskKind k : {TaskKind::position_setpoint, TaskKind::motor_control, TaskKind::navigation}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("task", "unknown task '" + std::string(name) + "'");
}

ActionMode action_mode_from_string(std::string_view name) {
  for (ActionMode m : {ActionMode::position, ActionMode::velocity, ActionMode::acceleration, ActionMode::motor}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("action_mode", "unknown action mode '" + std::string(name) + "'");
}

TaskConfig TaskConfig::defaults(TaskKind kind) {
  TaskConfig cfg;
  cfg.kind = kind;
  cfg.reset.position = symmetric(1.0, 1.0, 0.5);
  cfg.reset.position_center = Vec3(0.0, 0.0, 2.0);
  cfg.reset.attitude = symmetric(0.2, 0.2, std::numbers::pi);
  cfg.reset.hover_trim = true;
  switch (kind) {
    case TaskKind::position_setpoint:
      cfg.action_mode = ActionMode::velocity;
      break;
    case TaskKind::motor_control:
      cfg.action_mode = ActionMode::motor;
      break;
    case TaskKind::navigation: {
      cfg.action_mode = ActionMode::velocity;
      cfg.normalized_actions = true;
      cfg.reset.attitude = symmetric(0.0, 0.0, std::numbers::pi);
      SensorConfig cam;
      cam.type = SensorType::camera;
      cam.camera = CameraModel::from_fov(32, 24, std::numbers::pi / 2.0, 0.1, 10.0);
      cam.camera.pose_in_body.position = Vec3(0.1, 0.0, 0.0);
      cfg.sensor = cam;
      break;
    }
  }
  return cfg;
}

void TaskConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
  if (substeps < 1) throw ValidationError("substeps", "must be >= 1");
  if (episode_length < 1) throw ValidationError("episode_length", "must be >= 1");
  if (render_decimation < 1) throw ValidationError("render_decimation", "must be >= 1");
  if ((kind == TaskKind::motor_control) != (action_mode == ActionMode::motor)) {
    throw ValidationError("action_mode", "motor actions belong to the motor_control task only");
  }
  reset.validate();
  for (const auto& r : goal_range) {
    if (!(r.lo <= r.hi)) throw ValidationError("goal.range", "range must satisfy lo <= hi");
  }
  if (!(bounds.velocity >= 0.0 && bounds.acceleration >= 0.0 && bounds.yaw_rate >= 0.0)) {
    throw ValidationError("bounds", "must be >= 0");
  }
  if (kind == TaskKind::navigation) {
    if (!sensor || sensor->type != SensorType::camera) throw ValidationError("sensor", "navigation needs a camera");
    if (sensor->camera.width < Task::kDepthCols || sensor->camera.height < Task::kDepthRows ||
        sensor->camera.width % Task::kDepthCols != 0 || sensor->camera.height % Task::kDepthRows != 0) {
      throw ValidationError("sensor.resolution", "navigation camera must be a multiple of 16 x 12");
    }
    if (!(min_goal_distance >= 0.0) || !(spawn_clearance >= 0.0) || !(spawn_margin >= 0.0)) {
      throw ValidationError("navigation", "distances must be >= 0");
    }
  }
  if (sensor) aerialsim::validate(*sensor);
}

TaskConfig parse_task_config(std::string_view text) {
  const json doc = parse_document(text);
  TaskConfig cfg;
  try {
    cfg = TaskConfig::defaults(task_kind_from_string(require(doc, "task").get<std::string>()));
    if (auto it = doc.find("action_mode"); it != doc.end()) cfg.action_mode = action_mode_from_string(it->get<std::string>());
    if (auto it = doc.find("normalized_actions"); it != doc.end()) cfg.normalized_actions = it->get<bool>();
    cfg.episode_length = static_cast<int>(number_or(doc, "episode_length", cfg.episode_length));
    cfg.dt = number_or(doc, "dt", cfg.dt);
    cfg.substeps = static_cast<int>(number_or(doc, "substeps", cfg.substeps));
    if (auto it = doc.find("motor_integrator"); it != doc.end()) {
      const auto name = it->get<std::string>();
      if (name == "euler") cfg.motor_integrator = MotorIntegrator::euler;
      else if (name == "rk4") cfg.motor_integrator = MotorIntegrator::rk4;
      else throw ValidationError("motor_integrator", "expected euler or rk4");
    }
    if (auto it = doc.find("reward"); it != doc.end()) {
      RewardWeights& w = cfg.reward;
      w.progress = number_or(*it, "progress", w.progress);
      w.angular_rate = number_or(*it, "angular_rate", w.angular_rate);
      w.action_rate = number_or(*it, "action_rate", w.action_rate);
      w.goal_bonus = number_or(*it, "goal_bonus", w.goal_bonus);
      w.goal_radius = number_or(*it, "goal_radius", w.goal_radius);
      w.collision_penalty = number_or(*it, "collision_penalty", w.collision_penalty);
    }
    if (auto it = doc.find("bounds"); it != doc.end()) {
      cfg.bounds.velocity = number_or(*it, "velocity", cfg.bounds.velocity);
      cfg.bounds.acceleration = number_or(*it, "acceleration", cfg.bounds.acceleration);
      cfg.bounds.yaw_rate = number_or(*it, "yaw_rate", cfg.bounds.yaw_rate);
    }
    if (auto it = doc.find("reset"); it != doc.end()) cfg.reset = reset_from_json(*it, cfg.reset);
    if (auto it = doc.find("goal"); it != doc.end()) {
      cfg.goal_center = vec3_or(*it, "center", cfg.goal_center);
      if (auto r = it->find("range"); r != it->end()) cfg.goal_range = ranges_from_json(*r, "goal.range");
    }
    if (auto it = doc.find("sample_imu"); it != doc.end()) cfg.sample_imu = it->get<bool>();
    cfg.min_goal_distance = number_or(doc, "min_goal_distance", cfg.min_goal_distance);
    cfg.spawn_clearance = number_or(doc, "spawn_clearance", cfg.spawn_clearance);
    cfg.spawn_margin = number_or(doc, "spawn_margin", cfg.spawn_margin);
    if (auto it = doc.find("randomize_obstacles_on_reset"); it != doc.end()) cfg.randomize_obstacles_on_reset = it->get<bool>();
    cfg.render_decimation = static_cast<int>(number_or(doc, "render_decimation", cfg.render_decimation));
    if (auto it = doc.find("sensor"); it != doc.end()) cfg.sensor = parse_sensor_config(it->dump());
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed task config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

TaskConfig load_task_config(const std::filesystem::path& path) { return parse_task_config(read_text_file(path)); }

Vec6 rotation_to_6d(const Mat3& R) {
  Vec6 out;
  out << R.col(0), R.col(1);
  return out;
}

Mat3 vehicle_frame(const Mat3& R) { return rot_z(yaw_of(R)); }

double compute_reward(const RewardWeights& w, double prev_distance, double distance, const Vec3& omega,
                      std::span<const double> action, std::span<const double> prev_action, bool collision) {
  double delta2 = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    const double d = action[i] - prev_action[i];
    delta2 += d * d;
  }
  double r = w.progress * (prev_distance - distance) - w.angular_rate * omega.norm() - w.action_rate * std::sqrt(delta2);
  if (distance < w.goal_radius) r += w.goal_bonus;
  if (collision) r -= w.collision_penalty;
  return r;
}

std::vector<double> depth_downsample(std::span<const double> depth, int width, int height, int out_w, int out_h,
                                     double max_range) {
  if (out_w <= 0 || out_h <= 0 || width % out_w != 0 || height % out_h != 0) {
    throw ValidationError("depth_downsample", "image size must be a multiple of the output size");
  }
  const int bw = width / out_w;
  const int bh = height / out_h;
  std::vector<double> out(static_cast<std::size_t>(out_w) * static_cast<std::size_t>(out_h), 1.0);
  for (int by = 0; by < out_h; ++by) {
    for (int bx = 0; bx < out_w; ++bx) {
      double best = std::numeric_limits<double>::infinity();
      for (int y = by * bh; y < (by + 1) * bh; ++y) {
        for (int x = bx * bw; x < (bx + 1) * bw; ++x) {
          const double d = depth[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
          if (d >= 0.0) best = std::min(best, d);
        }
      }
      if (best != std::numeric_limits<double>::infinity()) {
        out[static_cast<std::size_t>(by) * static_cast<std::size_t>(out_w) + static_cast<std::size_t>(bx)] =
            std::min(best / max_range, 1.0);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Task

Task::Task(TaskConfig config, RobotConfig robot, std::size_t num_envs, TaskOptions options,
           std::optional<EnvironmentConfig> environment)
    : config_(std::move(config)),
      robot_(std::move(robot)),
      options_(options),
      environment_(std::move(environment)),
      store_(allocate(num_envs, robot_,
                      StoreOptions{options.seed.value_or(environment_ ? environment_->seed : 0),
                                   std::size_t{8} << 30, 0, options.first_env_index})),
      alloc_(build_allocation(robot_.motors)),
      body_(RigidBodyParams::from(robot_)),
      bank_(robot_.motors, num_envs) {
  config_.validate();
  validate(robot_);
  robot_.control_mode = control_mode_for(config_.action_mode);

  const EnvironmentConfig env = environment_.value_or(EnvironmentConfig{});
  bounds_.lo = env.bounds_min;
  bounds_.hi = env.bounds_max;

  action_dim_ = config_.action_mode == ActionMode::motor ? robot_.motors.size() : 4;
  switch (config_.kind) {
    case TaskKind::position_setpoint: obs_dim_ = 3 + 4 + 3 + 3 + action_dim_; break;
    case TaskKind::motor_control: obs_dim_ = 3 + 6 + 3 + 3; break;
    case TaskKind::navigation:
      obs_dim_ = 3 + 1 + 2 + 3 + 3 + action_dim_ + static_cast<std::size_t>(kDepthRows * kDepthCols);
      break;
  }
  store_.set_action_width(action_dim_);

  goals_.assign(num_envs, Vec3::Zero());
  prev_distance_.assign(num_envs, 0.0);
  wrenches_.assign(num_envs, Vec6::Zero());
  thrust_setpoints_.assign(num_envs * robot_.motors.size(), 0.0);
  imu_.assign(num_envs, ImuSample{});
  imu_counter_.assign(num_envs, 0);

  if (config_.kind == TaskKind::navigation) {
    depth_features_.assign(num_envs * static_cast<std::size_t>(kDepthRows * kDepthCols), 1.0);
    obstacle_meshes_ = load_obstacle_meshes(env);
    worlds_.resize(num_envs);
    for (std::size_t e = 0; e < num_envs; ++e) {
      worlds_[e] = WorldMesh::build(obstacle_meshes_,
                                    std::vector<Transform>(obstacle_meshes_.size(), Transform{}),
                                    static_cast<int>(options_.first_env_index + e));
    }
  }
  reset();
}

void Task::set_goal(std::size_t e, const Vec3& g) {
  goals_[e] = g;
  prev_distance_[e] = goal_distance(e);
}

double Task::goal_distance(std::size_t e) const { return (goals_[e] - store_.position(e)).norm(); }

void Task::place_obstacles(std::size_t e) {
  if (obstacle_meshes_.empty()) return;
  worlds_[e].update_transforms(
      sample_obstacle_transforms(*environment_, obstacle_meshes_.size(), store_.rng_streams[e]));
}

void Task::reset_env(std::size_t e) {
  const std::size_t ids[] = {e};
  if (config_.kind != TaskKind::navigation) {
    reset_envs(store_, ids, config_.reset, robot_);
    CounterRng& rng = store_.rng_streams[e];
    Vec3 g = config_.goal_center;
    for (std::size_t i = 0; i < 3; ++i) g[static_cast<Eigen::Index>(i)] += sample_uniform(rng, config_.goal_range[i].lo, config_.goal_range[i].hi);
    goals_[e] = g;
  } else {
    if (config_.randomize_obstacles_on_reset || store_.episode_step[e] == 0) place_obstacles(e);
    CounterRng& rng = store_.rng_streams[e];
    const Vec3 lo = bounds_.lo + Vec3::Constant(config_.spawn_margin);
    const Vec3 hi = bounds_.hi - Vec3::Constant(config_.spawn_margin);
    const double clearance = robot_.collision_radius + config_.spawn_clearance;
    auto sample_free = [&]() {
      for (int tries = 0; tries < kMaxPlacementTries; ++tries) {
        const Vec3 p(sample_uniform(rng, lo.x(), hi.x()), sample_uniform(rng, lo.y(), hi.y()),
                     sample_uniform(rng, lo.z(), hi.z()));
        if (worlds_[e].closest_distance(p) > clearance) return p;
      }
      throw Error("no collision-free spawn point found in env " + std::to_string(e));
    };
    Vec3 start = sample_free();
    Vec3 goal = sample_free();
    for (int tries = 0; (goal - start).norm() < config_.min_goal_distance; ++tries) {
      if (tries >= kMaxPlacementTries) throw Error("no start/goal pair far enough apart in env " + std::to_string(e));
      start = sample_free();
      goal = sample_free();
    }
    ResetSpec spec = config_.reset;
    spec.position = {};
    spec.position_center = start;
    reset_envs(store_, ids, spec, robot_);
    goals_[e] = goal;
  }
  prev_distance_[e] = goal_distance(e);
  const double hover_thrust = robot_.mass * robot_.gravity;
  wrenches_[e] << 0.0, 0.0, hover_thrust, 0.0, 0.0, 0.0;
  imu_[e] = ImuSample{};
  imu_counter_[e] = 0;
  if (config_.kind == TaskKind::navigation) render_depth(e);
}

void Task::render_depth(std::size_t e) {
  const SensorConfig& sensor = *config_.sensor;
  const Pose pose{store_.position(e), store_.rotation(e)};
  SensorImage img = render_camera(worlds_[e], sensor.camera, pose);
  if (sensor.stereo_baseline != 0.0) {
    const auto mask = stereo_shadow_mask(img, worlds_[e], sensor_pose(pose, sensor.camera.pose_in_body),
                                         sensor.stereo_baseline);
    apply_validity_mask(img, mask);
  }
  const auto feats = depth_downsample(img.depth, img.width, img.height, kDepthCols, kDepthRows, sensor.camera.t_max);
  std::copy(feats.begin(), feats.end(), depth_features_.begin() + static_cast<std::ptrdiff_t>(e * feats.size()));
}

std::vector<double> Task::reset() {
  std::vector<std::size_t> ids(num_envs());
  for (std::size_t e = 0; e < ids.size(); ++e) ids[e] = e;
  return reset(ids);
}

std::vector<double> Task::reset(std::span<const std::size_t> env_ids) {
  for (std::size_t e : env_ids) {
    if (e >= num_envs()) throw IndexError("env index " + std::to_string(e) + " out of range");
  }
  parallel_for_envs(env_ids.size(), options_.workers, [&](std::size_t b, std::size_t end) {
    for (std::size_t i = b; i < end; ++i) reset_env(env_ids[i]);
  });
  return observations();
}

ControlCommand Task::command_from_action(std::size_t e, std::span<const double> a) const {
  const bool norm = config_.normalized_actions;
  auto scaled = [&](double x, double bound) { return norm ? std::clamp(x, -1.0, 1.0) * bound : std::clamp(x, -bound, bound); };
  switch (config_.action_mode) {
    case ActionMode::position:
      return ControlCommand::position_setpoint(Vec3(a[0], a[1], a[2]), a[3]);
    case ActionMode::velocity:
    case ActionMode::acceleration: {
      const double bound = config_.action_mode == ActionMode::velocity ? config_.bounds.velocity : config_.bounds.acceleration;
      const Vec3 cmd_v(scaled(a[0], bound), scaled(a[1], bound), scaled(a[2], bound));
      const Vec3 cmd_w = vehicle_frame(store_.rotation(e)) * cmd_v;
      const double yaw_rate = scaled(a[3], config_.bounds.yaw_rate);
      return config_.action_mode == ActionMode::velocity ? ControlCommand::velocity_setpoint(cmd_w, yaw_rate)
                                                         : ControlCommand::acceleration_setpoint(cmd_w, yaw_rate);
    }
    case ActionMode::motor: {
      VecX u(static_cast<Eigen::Index>(a.size()));
      for (std::size_t k = 0; k < a.size(); ++k) u[static_cast<Eigen::Index>(k)] = a[k];
      return ControlCommand::motor_command(u);
    }
  }
  return ControlCommand{};
}

void Task::physics_step(std::size_t begin, std::size_t end, std::span<const double> actions,
                        std::span<const std::uint8_t> nan_rows, StepInfo& info) {
  const std::size_t n = robot_.motors.size();
  const double h = config_.dt / config_.substeps;
  const std::vector<double> zeros(action_dim_, 0.0);
  std::vector<ControlCommand> commands(end - begin);
  for (std::size_t e = begin; e < end; ++e) {
    const std::span<const double> a =
        nan_rows[e] ? std::span<const double>(zeros) : actions.subspan(e * action_dim_, action_dim_);
    commands[e - begin] = command_from_action(e, a);
  }

  std::size_t negatives = 0;
  if (config_.action_mode == ActionMode::motor) {
    for (std::size_t e = begin; e < end; ++e) {
      for (std::size_t k = 0; k < n; ++k) thrust_setpoints_[e * n + k] = commands[e - begin].motor_thrusts[static_cast<Eigen::Index>(k)];
    }
    negatives += bank_.setpoints_from_thrust(thrust_setpoints_, store_.motor_rpm_ref, begin, end);
  }

  for (int s = 0; s < config_.substeps; ++s) {
    if (config_.action_mode != ActionMode::motor) {
      for (std::size_t e = begin; e < end; ++e) {
        if (info.diverged[e]) continue;
        try {
          wrenches_[e] = compute_wrench(vehicle_state(store_, e), commands[e - begin], robot_, alloc_);
        } catch (const SingularHeadingError&) {
          info.singular_heading[e] = 1;
        }
        const VecX u = allocate(wrenches_[e], alloc_);
        for (std::size_t k = 0; k < n; ++k) thrust_setpoints_[e * n + k] = u[static_cast<Eigen::Index>(k)];
      }
      negatives += bank_.setpoints_from_thrust(thrust_setpoints_, store_.motor_rpm_ref, begin, end);
    }
    bank_.step(store_.motor_rpm, store_.motor_rpm_ref, begin, end, h, config_.motor_integrator);
    for (std::size_t e = begin; e < end; ++e) {
      if (info.diverged[e]) continue;
      const Wrench w = aggregate_motor_wrench(store_.rpm(e), robot_.motors);
      const Mat3 R = store_.rotation(e);
      Vec3 net_force;
      if (!step_rigid_body(store_, e, w, body_, h, &net_force)) {
        info.diverged[e] = 1;
        continue;
      }
      if (config_.sample_imu) {
        const ImuSample sample = sample_imu(net_force, store_.angular_velocity(e), R, robot_.mass, robot_.gravity,
                                            store_.accel_bias(e), store_.gyro_bias(e), robot_.imu,
                                            store_.rng_streams[e]);
        if (imu_counter_[e]++ % robot_.imu.decimation == 0) imu_[e] = sample;
      }
    }
  }
  if (negatives) {
    std::atomic_ref<std::size_t>(info.negative_thrust_count).fetch_add(negatives, std::memory_order_relaxed);
  }
}

StepResult Task::step(std::span<const double> actions) {
  const std::size_t N = num_envs();
  if (actions.size() != N * action_dim_) {
    throw ValidationError("actions", "expected " + std::to_string(N) + " x " + std::to_string(action_dim_) +
                                         " values, got " + std::to_string(actions.size()));
  }
  StepResult out;
  StepInfo& info = out.info;
  info.reset.assign(N, 0);
  info.collided.assign(N, 0);
  info.nan_action.assign(N, 0);
  info.diverged.assign(N, 0);
  info.singular_heading.assign(N, 0);
  out.rewards.assign(N, 0.0);
  out.terminated.assign(N, 0);
  out.truncated.assign(N, 0);
  out.observations.assign(N * obs_dim_, 0.0);

  for (std::size_t e = 0; e < N; ++e) {
    for (std::size_t i = 0; i < action_dim_; ++i) {
      if (!std::isfinite(actions[e * action_dim_ + i])) info.nan_action[e] = 1;
    }
  }

  ++control_steps_;
  const bool render_now = config_.kind == TaskKind::navigation && control_steps_ % config_.render_decimation == 0;
  parallel_for_envs(N, options_.workers, [&](std::size_t begin, std::size_t end) {
    physics_step(begin, end, actions, info.nan_action, info);
    check_collisions(store_, worlds_, robot_.collision_radius, bounds_, info.collided, begin, end);
    for (std::size_t e = begin; e < end; ++e) {
      store_.episode_step[e] += 1;
      const bool nan = info.nan_action[e] != 0;
      const bool collision = info.collided[e] != 0 || info.diverged[e] != 0;
      const std::span<const double> a =
          nan ? std::span<const double>(store_.previous_action(e)) : actions.subspan(e * action_dim_, action_dim_);
      const double dist = goal_distance(e);
      double r = compute_reward(config_.reward, prev_distance_[e], dist, store_.angular_velocity(e), a,
                                store_.previous_action(e), collision);
      if (nan || !std::isfinite(r)) r = -config_.reward.collision_penalty;
      out.rewards[e] = r;
      prev_distance_[e] = dist;
      std::copy(a.begin(), a.end(), store_.previous_action(e).begin());
      out.terminated[e] = (collision || nan) ? 1 : 0;
      out.truncated[e] = (!out.terminated[e] && store_.episode_step[e] >= config_.episode_length) ? 1 : 0;
      if (render_now && !out.terminated[e] && !out.truncated[e]) render_depth(e);
    }
  });

  std::vector<std::size_t> done;
  for (std::size_t e = 0; e < N; ++e) {
    if (out.terminated[e] || out.truncated[e]) done.push_back(e);
  }
  if (!done.empty()) {
    info.final_observations.resize(done.size() * obs_dim_);
    for (std::size_t i = 0; i < done.size(); ++i) {
      write_observation(done[i], std::span<double>(info.final_observations).subspan(i * obs_dim_, obs_dim_));
      info.reset[done[i]] = 1;
    }
    parallel_for_envs(done.size(), options_.workers, [&](std::size_t b, std::size_t end) {
      for (std::size_t i = b; i < end; ++i) reset_env(done[i]);
    });
  }
  for (std::size_t e = 0; e < N; ++e) write_observation(e, std::span<double>(out.observations).subspan(e * obs_dim_, obs_dim_));
  return out;
}

std::vector<double> Task::observations() const {
  std::vector<double> obs(num_envs() * obs_dim_);
  for (std::size_t e = 0; e < num_envs(); ++e) write_observation(e, std::span<double>(obs).subspan(e * obs_dim_, obs_dim_));
  return obs;
}

void Task::write_observation(std::size_t e, std::span<double> row) const {
  const Mat3 R = store_.rotation(e);
  const Vec3 p = store_.position(e);
  const Vec3 v = store_.linear_velocity(e);
  const Vec3 w = store_.angular_velocity(e);
  const Vec3 err = goals_[e] - p;
  std::size_t k = 0;
  auto put = [&](const auto& vec) {
    for (Eigen::Index i = 0; i < vec.size(); ++i) row[k++] = vec[i];
  };
  auto put_action = [&]() {
    for (double a : store_.previous_action(e)) row[k++] = a;
  };
  switch (config_.kind) {
    case TaskKind::position_setpoint:
      put(err);
      put(Quat(store_.orientation(e)));
      put(Vec3(R.transpose() * v));
      put(w);
      put_action();
      break;
    case TaskKind::motor_control:
      put(err);
      put(rotation_to_6d(R));
      put(v);
      put(w);
      break;
    case TaskKind::navigation: {
      const Mat3 V = vehicle_frame(R);
      const Vec3 n = V.transpose() * err;
      const double dist = n.norm();
      put(dist > 1e-9 ? Vec3(n / dist) : Vec3::Zero());
      row[k++] = dist;
      const Vec3 rpy = rpy_from_rot(R);
      row[k++] = rpy.x();
      row[k++] = rpy.y();
      put(Vec3(V.transpose() * v));
      put(w);
      put_action();
      const std::size_t nf = static_cast<std::size_t>(kDepthRows * kDepthCols);
      std::copy_n(depth_features_.begin() + static_cast<std::ptrdiff_t>(e * nf), nf, row.begin() + static_cast<std::ptrdiff_t>(k));
      k += nf;
      break;
    }
  }
}

std::vector<double> task_reset(Task& task, std::span<const std::size_t> env_ids) { return task.reset(env_ids); }

StepResult task_step(Task& task, std::span<const double> actions) { return task.step(actions); }

}  // namespace aerialsim
