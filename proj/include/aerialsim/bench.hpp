#pragma once

// Throughput benchmarks, trajectory recording and sensor frame dumps behind
// the command-line tool.

#include "aerialsim/config.hpp"
#include "aerialsim/motors.hpp"
#include "aerialsim/tasks.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aerialsim {

struct BenchOptions {
  double dt = 0.01;
  std::uint64_t seed = 0;
  int workers = 1;
  MotorIntegrator integrator = MotorIntegrator::euler;
};

struct BenchReport {
  std::string benchmark;
  std::size_t num_envs = 0;
  std::size_t steps = 0;  // physics steps or rendered frames per env
  double wall_seconds = 0.0;
  double sps = 0.0;  // num_envs * steps / wall_seconds (physics)
  double fps = 0.0;  // num_envs * steps / wall_seconds (render)
  std::size_t peak_memory_bytes = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string isa;
  std::string resolution;
  std::string machine_note;
  /// Order-independent digest of the final state or images; equal across
  /// runs with the same seed and any worker count.
  std::uint64_t checksum = 0;
  /// Published large-scale figures, printed for context only.
  std::vector<std::string> reference_lines;
};

std::string format_report(const BenchReport& report);

/// Constant hover-RPM setpoints into the motor + rigid-body loop, no obstacles.
BenchReport bench_physics(std::size_t num_envs, std::size_t steps, const RobotConfig& robot,
                          const BenchOptions& options = {});

/// Depth + segmentation frames of an obstacle scene per env, with a position
/// controller holding each robot in place between frames.
BenchReport bench_render(std::size_t num_envs, std::size_t frames, const EnvironmentConfig& scene,
                         const SensorConfig& sensor, const RobotConfig& robot, const BenchOptions& options = {});

enum class RecordPolicy { hover, random, scripted_waypoints };
RecordPolicy record_policy_from_string(std::string_view name);

/// Column order of the trajectory CSV. Action columns a0..a{k-1} follow wz.
std::vector<std::string> trajectory_columns(std::size_t action_dim);

/// Rolls the task for `steps` control steps and returns the CSV text (env
/// column, stacked rows, env-major within each step).
std::string record_trajectory(Task& task, RecordPolicy policy, std::size_t steps, std::uint64_t seed);

/// Waypoint corners visited by the scripted policy, in visiting order.
std::vector<Vec3> scripted_waypoints(const Task& task, std::size_t env);

struct FrameDumpSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::size_t> valid_pixels;  // per pose
  std::vector<std::size_t> shadowed_pixels;
};

/// Renders one frame per pose and writes depth/range PGM (mm), segmentation
/// and face-index matrices and a point cloud CSV per frame into out_dir.
FrameDumpSummary dump_sensor_frames(const EnvironmentConfig& scene, const SensorConfig& sensor,
                                    const std::vector<Pose>& poses, const std::filesystem::path& out_dir,
                                    std::uint64_t seed);

/// `count` poses at `center` with yaw stepping by 2 pi / count.
std::vector<Pose> turntable_poses(const Vec3& center, std::size_t count);

}  // namespace aerialsim
