#pragma once

// Vectorized reset/step environments composing control, motors, dynamics,
// IMU and rendering. Three task families: position setpoint (velocity,
// acceleration or position commands), motor control (per-motor thrust
// commands) and depth-based navigation among obstacles.
//
// After an env terminates or truncates it is reset inside step(); the
// returned observation row is the post-reset one and info.reset flags it.

#include "aerialsim/config.hpp"
#include "aerialsim/control.hpp"
#include "aerialsim/dynamics.hpp"
#include "aerialsim/imu.hpp"
#include "aerialsim/motors.hpp"
#include "aerialsim/sensors.hpp"
#include "aerialsim/state_store.hpp"
#include "aerialsim/world_mesh.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace aerialsim {

enum class TaskKind { position_setpoint, motor_control, navigation };
enum class ActionMode { position, velocity, acceleration, motor };

std::string_view to_string(TaskKind kind);
std::string_view to_string(ActionMode mode);
TaskKind task_kind_from_string(std::string_view name);
ActionMode action_mode_from_string(std::string_view name);

/// r = progress (d_prev - d) - angular_rate |Omega| - action_rate |a - a_prev|
///     + goal_bonus [d < goal_radius] - collision_penalty [collision]
struct RewardWeights {
  double progress = 1.0;
  double angular_rate = 0.01;
  double action_rate = 0.01;
  double goal_bonus = 1.0;
  double goal_radius = 0.2;
  double collision_penalty = 10.0;
};

/// Command magnitudes reached by a normalized action of +-1.
struct ActionBounds {
  double velocity = 2.0;      // m/s
  double acceleration = 4.0;  // m/s^2
  double yaw_rate = 1.0;      // rad/s
};

struct TaskConfig {
  TaskKind kind = TaskKind::position_setpoint;
  ActionMode action_mode = ActionMode::velocity;
  RewardWeights reward;
  ActionBounds bounds;
  /// Actions in [-1, 1] scaled affinely to the bounds; otherwise actions are
  /// in command units and clamped to the bounds.
  bool normalized_actions = false;
  int episode_length = 500;
  double dt = 0.01;  // control step (s)
  int substeps = 2;  // physics steps per control step
  MotorIntegrator motor_integrator = MotorIntegrator::rk4;
  ResetSpec reset;
  Vec3 goal_center = Vec3(0.0, 0.0, 2.0);
  std::array<Range, 3> goal_range{};
  bool sample_imu = true;

  // Navigation only.
  double min_goal_distance = 4.0;
  /// Extra free space around the collision sphere at spawn and goal (m).
  double spawn_clearance = 0.3;
  /// Distance kept from the environment bounds when spawning (m).
  double spawn_margin = 1.0;
  bool randomize_obstacles_on_reset = true;
  int render_decimation = 1;
  std::optional<SensorConfig> sensor;

  static TaskConfig defaults(TaskKind kind);
  void validate() const;
};

TaskConfig parse_task_config(std::string_view text);
TaskConfig load_task_config(const std::filesystem::path& path);

struct TaskOptions {
  /// Falls back to the environment config seed when unset.
  std::optional<std::uint64_t> seed;
  int workers = 1;
  /// Global index of env row 0 (rng stream selection).
  std::size_t first_env_index = 0;
};

struct StepInfo {
  std::vector<std::uint8_t> reset;
  std::vector<std::uint8_t> collided;
  std::vector<std::uint8_t> nan_action;
  std::vector<std::uint8_t> diverged;
  std::vector<std::uint8_t> singular_heading;
  /// Observation rows of envs that were reset this step, taken before the reset.
  std::vector<double> final_observations;
  std::size_t negative_thrust_count = 0;
};

struct StepResult {
  std::vector<double> observations;  // num_envs x observation_dim
  std::vector<double> rewards;
  std::vector<std::uint8_t> terminated;
  std::vector<std::uint8_t> truncated;
  StepInfo info;
};

/// First two columns of R stacked.
Vec6 rotation_to_6d(const Mat3& R);

/// Yaw-only rotation of R (the vehicle frame).
Mat3 vehicle_frame(const Mat3& R);

/// Per-env reward of the documented default form.
double compute_reward(const RewardWeights& w, double prev_distance, double distance, const Vec3& omega,
                      std::span<const double> action, std::span<const double> prev_action, bool collision);

/// Min-pools `depth` (row-major width x height) to out_h x out_w blocks,
/// normalizes by max_range into [0, 1]; blocks without a valid pixel give 1.
std::vector<double> depth_downsample(std::span<const double> depth, int width, int height, int out_w, int out_h,
                                     double max_range);

class Task {
 public:
  static constexpr int kDepthRows = 12;
  static constexpr int kDepthCols = 16;

  Task(TaskConfig config, RobotConfig robot, std::size_t num_envs, TaskOptions options = {},
       std::optional<EnvironmentConfig> environment = std::nullopt);

  std::size_t num_envs() const { return store_.num_envs(); }
  std::size_t observation_dim() const { return obs_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  const TaskConfig& config() const { return config_; }
  const RobotConfig& robot() const { return robot_; }

  /// Resets every env and returns the full observation batch.
  std::vector<double> reset();
  /// Resets the listed envs and returns the full observation batch.
  std::vector<double> reset(std::span<const std::size_t> env_ids);

  /// actions: num_envs x action_dim, row-major.
  StepResult step(std::span<const double> actions);

  std::vector<double> observations() const;

  const StateStore& store() const { return store_; }
  StateStore& store() { return store_; }
  const Vec3& goal(std::size_t e) const { return goals_[e]; }
  void set_goal(std::size_t e, const Vec3& g);
  std::span<const WorldMesh> worlds() const { return worlds_; }
  const ImuSample& imu(std::size_t e) const { return imu_[e]; }
  const Aabb& bounds() const { return bounds_; }

 private:
  void reset_env(std::size_t e);
  void place_obstacles(std::size_t e);
  ControlCommand command_from_action(std::size_t e, std::span<const double> a) const;
  void physics_step(std::size_t begin, std::size_t end, std::span<const double> actions,
                    std::span<const std::uint8_t> nan_rows, StepInfo& info);
  void write_observation(std::size_t e, std::span<double> row) const;
  void render_depth(std::size_t e);
  double goal_distance(std::size_t e) const;

  TaskConfig config_;
  RobotConfig robot_;
  TaskOptions options_;
  std::optional<EnvironmentConfig> environment_;
  StateStore store_;
  AllocationMatrix alloc_;
  RigidBodyParams body_;
  MotorBank bank_;
  Aabb bounds_;
  std::size_t obs_dim_ = 0;
  std::size_t action_dim_ = 0;
  std::int64_t control_steps_ = 0;

  std::vector<Vec3> goals_;
  std::vector<double> prev_distance_;
  std::vector<Vec6> wrenches_;
  std::vector<double> thrust_setpoints_;
  std::vector<ImuSample> imu_;
  std::vector<std::int64_t> imu_counter_;

  std::vector<std::shared_ptr<const TriangleMesh>> obstacle_meshes_;
  std::vector<WorldMesh> worlds_;
  std::vector<double> depth_features_;  // num_envs x 192
};

std::vector<double> task_reset(Task& task, std::span<const std::size_t> env_ids);
StepResult task_step(Task& task, std::span<const double> actions);

}  // namespace aerialsim
