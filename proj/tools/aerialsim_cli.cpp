// aerialsim command-line tool: throughput benchmarks, task rollouts,
// trajectory recording and sensor frame dumps.

#include "aerialsim/bench.hpp"
#include "aerialsim/errors.hpp"
#include "aerialsim/image_io.hpp"
#include "aerialsim/scene.hpp"
#include "aerialsim/tasks.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <regex>

namespace {

using namespace aerialsim;

struct Common {
  std::size_t num_envs = 16;
  std::size_t steps = 1000;
  std::size_t frames = 100;
  double dt = 0.01;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string robot = "quad";
  std::string env;
  std::string sensor;
  std::string output;
  std::string resolution;
  std::string task = "position_setpoint";
  std::string policy = "hover";
  std::size_t poses = 8;
};

RobotConfig robot_from(const std::string& spec) {
  if (spec == "quad") return make_quadrotor_config();
  if (spec == "octo") return make_tilted_octorotor_config();
  return load_robot_config(spec);
}

EnvironmentConfig env_from(const std::string& path) {
  return path.empty() ? default_obstacle_scene() : load_environment_config(path);
}

std::pair<int, int> parse_resolution(const std::string& text) {
  static const std::regex re(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw ValidationError("resolution", "expected WxH, got '" + text + "'");
  return {std::stoi(m[1]), std::stoi(m[2])};
}

/// Forward-looking 90 degree camera at the nose.
SensorConfig default_sensor(int width, int height) {
  SensorConfig s;
  s.type = SensorType::camera;
  s.camera = CameraModel::from_fov(width, height, std::numbers::pi / 2.0, 0.1, 10.0);
  s.camera.pose_in_body = Pose{Vec3(0.1, 0.0, 0.0), forward_camera_rotation()};
  return s;
}

/// --resolution rescales the intrinsics of a camera, keeping its field of view.
SensorConfig sensor_from(const Common& c) {
  if (c.sensor.empty()) {
    const auto [w, h] = c.resolution.empty() ? std::pair{64, 48} : parse_resolution(c.resolution);
    return default_sensor(w, h);
  }
  SensorConfig s = load_sensor_config(c.sensor);
  if (!c.resolution.empty() && s.type == SensorType::camera) {
    const auto [w, h] = parse_resolution(c.resolution);
    const double sx = static_cast<double>(w) / s.camera.width;
    const double sy = static_cast<double>(h) / s.camera.height;
    s.camera.fx *= sx, s.camera.cx *= sx, s.camera.width = w;
    s.camera.fy *= sy, s.camera.cy *= sy, s.camera.height = h;
    validate(s);
  }
  return s;
}

BenchOptions bench_options(const Common& c) { return BenchOptions{c.dt, c.seed, c.workers, MotorIntegrator::euler}; }

void emit_report(const Common& c, const std::string& report) {
  std::cout << report;
  if (!c.output.empty()) {
    std::filesystem::create_directories(c.output);
    write_text_file(std::filesystem::path(c.output) / "report.txt", report);
  }
}

Task make_task(const Common& c) {
  TaskConfig cfg;
  if (std::filesystem::exists(c.task)) {
    cfg = load_task_config(c.task);
  } else {
    cfg = TaskConfig::defaults(task_kind_from_string(c.task));
  }
  cfg.dt = c.dt;
  if (!c.sensor.empty() || !c.resolution.empty()) cfg.sensor = sensor_from(c);
  std::optional<EnvironmentConfig> env;
  if (!c.env.empty()) env = load_environment_config(c.env);
  return Task(cfg, robot_from(c.robot), c.num_envs, TaskOptions{c.seed, c.workers, 0}, env);
}

int run_task(const Common& c) {
  Task task = make_task(c);
  const std::size_t N = task.num_envs();
  const auto t0 = std::chrono::steady_clock::now();
  const std::string csv = record_trajectory(task, record_policy_from_string(c.policy), c.steps, c.seed);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Summaries from the recorded rows (reward and done flags are the last three columns).
  double reward_sum = 0.0;
  std::size_t episodes = 0;
  std::size_t pos = csv.find('\n') + 1;
  while (pos < csv.size()) {
    const std::size_t end = csv.find('\n', pos);
    const std::string row = csv.substr(pos, end - pos);
    const std::size_t c3 = row.rfind(','), c2 = row.rfind(',', c3 - 1), c1 = row.rfind(',', c2 - 1);
    reward_sum += std::stod(row.substr(c1 + 1, c2 - c1 - 1));
    episodes += (row[c2 + 1] == '1' || row[c3 + 1] == '1') ? 1 : 0;
    pos = end + 1;
  }
  char buf[256];
  std::string report;
  report += "task:           " + std::string(to_string(task.config().kind)) + "\n";
  report += "action_mode:    " + std::string(to_string(task.config().action_mode)) + "\n";
  report += "num_envs:       " + std::to_string(N) + "\n";
  report += "steps:          " + std::to_string(c.steps) + "\n";
  report += "obs_dim:        " + std::to_string(task.observation_dim()) + "\n";
  report += "action_dim:     " + std::to_string(task.action_dim()) + "\n";
  report += "policy:         " + c.policy + "\n";
  report += "episodes_ended: " + std::to_string(episodes) + "\n";
  std::snprintf(buf, sizeof buf, "%.6f", reward_sum / static_cast<double>(N));
  report += "mean_return:    " + std::string(buf) + "\n";
  std::snprintf(buf, sizeof buf, "%.6f", wall);
  report += "wall_time_s:    " + std::string(buf) + "\n";
  report += "seed:           " + std::to_string(c.seed) + "\n";
  report += "workers:        " + std::to_string(c.workers) + "\n";
  emit_report(c, report);
  return 0;
}

int record(const Common& c) {
  Task task = make_task(c);
  const std::string csv = record_trajectory(task, record_policy_from_string(c.policy), c.steps, c.seed);
  if (c.output.empty()) {
    std::cout << csv;
  } else {
    std::filesystem::create_directories(c.output);
    const auto path = std::filesystem::path(c.output) / "trajectory.csv";
    write_text_file(path, csv);
    std::cout << "wrote " << path.string() << " (" << task.num_envs() * (c.steps + 1) << " rows)\n";
  }
  return 0;
}

int dump_frames(const Common& c) {
  if (c.output.empty()) throw ValidationError("output", "dump-frames needs --output <dir>");
  const EnvironmentConfig scene = env_from(c.env);
  const Vec3 center = 0.5 * (scene.bounds_min + scene.bounds_max);
  const Vec3 eye(std::clamp(0.0, scene.bounds_min.x(), scene.bounds_max.x()), center.y(), center.z());
  const auto summary = dump_sensor_frames(scene, sensor_from(c), turntable_poses(eye, c.poses), c.output, c.seed);
  for (std::size_t i = 0; i < summary.valid_pixels.size(); ++i) {
    std::cout << "pose " << i << ": valid " << summary.valid_pixels[i] << ", shadowed " << summary.shadowed_pixels[i]
              << "\n";
  }
  std::cout << "wrote " << summary.files.size() << " files to " << c.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aerialsim: batched multirotor simulation tools"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--num-envs", c.num_envs, "Number of parallel environments")->check(CLI::PositiveNumber);
    sub->add_option("--dt", c.dt, "Step size (s)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Root seed");
    sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--robot", c.robot, "Robot config path, or 'quad' / 'octo'");
    sub->add_option("--env", c.env, "Environment config path");
    sub->add_option("--sensor", c.sensor, "Sensor config path");
    sub->add_option("--output", c.output, "Output directory");
    sub->add_option("--resolution", c.resolution, "Camera resolution WxH");
  };

  auto* physics = app.add_subcommand("bench-physics", "Constant-RPM motor and rigid-body throughput");
  add_common(physics);
  physics->add_option("--steps", c.steps, "Steps per env");

  auto* render = app.add_subcommand("bench-render", "Obstacle-scene rendering throughput with the controller running");
  add_common(render);
  render->add_option("--frames", c.frames, "Frames per env");

  auto* run = app.add_subcommand("run-task", "Roll out a task with a fixed policy and print a summary");
  add_common(run);
  run->add_option("--steps", c.steps, "Control steps");
  run->add_option("--task", c.task, "Task config path or kind (position_setpoint, motor_control, navigation)");
  run->add_option("--policy", c.policy, "hover, random or scripted-waypoints");

  auto* rec = app.add_subcommand("record", "Write a trajectory CSV");
  add_common(rec);
  rec->add_option("--steps", c.steps, "Control steps");
  rec->add_option("--task", c.task, "Task config path or kind");
  rec->add_option("--policy", c.policy, "hover, random or scripted-waypoints");

  auto* dump = app.add_subcommand("dump-frames", "Write sensor channel images for a turntable of poses");
  add_common(dump);
  dump->add_option("--frames", c.poses, "Number of poses");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*physics) {
      emit_report(c, format_report(bench_physics(c.num_envs, c.steps, robot_from(c.robot), bench_options(c))));
    } else if (*render) {
      emit_report(c, format_report(bench_render(c.num_envs, c.frames, env_from(c.env), sensor_from(c),
                                                robot_from(c.robot), bench_options(c))));
    } else if (*run) {
      return run_task(c);
    } else if (*rec) {
      return record(c);
    } else if (*dump) {
      return dump_frames(c);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
