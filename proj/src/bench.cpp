#include "aerialsim/bench.hpp"

#include "aerialsim/dynamics.hpp"
#include "aerialsim/errors.hpp"
#include "aerialsim/image_io.hpp"
#include "aerialsim/parallel.hpp"
#include "aerialsim/scene.hpp"
#include "aerialsim/sensors.hpp"
#include "aerialsim/simd/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace aerialsim {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSceneStream = 0x5CE7E5CE7E5CE7E5ULL;
constexpr std::uint64_t kPolicyStream = 0xA11CEA11CEA11CE5ULL;

std::uint64_t digest(double x, std::uint64_t salt) { return mix64(std::bit_cast<std::uint64_t>(x) ^ mix64(salt)); }

std::string machine_note(int workers) {
  return "cpu, " + std::to_string(workers) + " worker(s), kernels " + std::string(simd::to_string(simd::kernels().isa));
}

Vec3 clamp_to(const Vec3& p, const EnvironmentConfig& env) {
  return p.cwiseMax(env.bounds_min).cwiseMin(env.bounds_max);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string format_report(const BenchReport& r) {
  std::ostringstream out;
  char buf[128];
  out << "benchmark:      " << r.benchmark << "\n";
  out << "num_envs:       " << r.num_envs << "\n";
  out << (r.benchmark == "render" ? "frames:         " : "steps:          ") << r.steps << "\n";
  if (!r.resolution.empty()) out << "resolution:     " << r.resolution << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", r.wall_seconds);
  out << "wall_time_s:    " << buf << "\n";
  if (r.benchmark == "physics") {
    std::snprintf(buf, sizeof buf, "%.1f", r.sps);
    out << "physics_sps:    " << buf << "\n";
  } else {
    std::snprintf(buf, sizeof buf, "%.1f", r.fps);
    out << "render_fps:     " << buf << "\n";
  }
  out << "peak_memory_b:  " << r.peak_memory_bytes << "\n";
  out << "seed:           " << r.seed << "\n";
  out << "workers:        " << r.workers << "\n";
  out << "checksum:       " << r.checksum << "\n";
  out << "machine:        " << r.machine_note << "\n";
  for (const auto& line : r.reference_lines) out << "reference:      " << line << "\n";
  return out.str();
}

BenchReport bench_physics(std::size_t num_envs, std::size_t steps, const RobotConfig& robot,
                          const BenchOptions& options) {
  if (!(options.dt > 0.0)) throw ValidationError("dt", "must be > 0");
  StateStore store = allocate(num_envs, robot, StoreOptions{options.seed});
  ResetSpec spec;
  spec.position_center = Vec3(0.0, 0.0, 2.0);
  spec.hover_trim = true;
  std::vector<std::size_t> ids(num_envs);
  for (std::size_t e = 0; e < num_envs; ++e) ids[e] = e;
  reset_envs(store, ids, spec, robot);
  const MotorBank bank(robot.motors, num_envs);
  const RigidBodyParams body = RigidBodyParams::from(robot);

  const auto t0 = Clock::now();
  parallel_for_envs(num_envs, options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = 0; s < steps; ++s) {
      bank.step(store.motor_rpm, store.motor_rpm_ref, begin, end, options.dt, options.integrator);
      for (std::size_t e = begin; e < end; ++e) {
        step_rigid_body(store, e, aggregate_motor_wrench(store.rpm(e), robot.motors), body, options.dt);
      }
    }
  });
  const double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  BenchReport r;
  r.benchmark = "physics";
  r.num_envs = num_envs;
  r.steps = steps;
  r.wall_seconds = wall;
  r.sps = static_cast<double>(num_envs) * static_cast<double>(steps) / wall;
  r.peak_memory_bytes = num_envs * (StateStore::bytes_per_env(robot.motors.size(), 0) +
                                    4 * sizeof(double) * robot.motors.size());
  r.seed = options.seed;
  r.workers = options.workers;
  r.isa = std::string(simd::to_string(simd::kernels().isa));
  r.machine_note = machine_note(options.workers);
  for (std::size_t i = 0; i < store.positions.size(); ++i) r.checksum ^= digest(store.positions[i], i);
  r.reference_lines.push_back("published GPU figure: 4.43e6 SPS at 65536 envs (quadrotors, constant RPM); not asserted");
  return r;
}

BenchReport bench_render(std::size_t num_envs, std::size_t frames, const EnvironmentConfig& scene,
                         const SensorConfig& sensor, const RobotConfig& robot, const BenchOptions& options) {
  validate(scene);
  validate(sensor);
  TaskConfig cfg = TaskConfig::defaults(TaskKind::position_setpoint);
  cfg.action_mode = ActionMode::position;
  cfg.dt = options.dt;
  cfg.sample_imu = false;
  cfg.episode_length = std::numeric_limits<int>::max();
  cfg.reset = ResetSpec{};
  cfg.reset.hover_trim = true;
  const Vec3 start = clamp_to(Vec3(0.0, 0.0, 0.5 * (scene.bounds_min.z() + scene.bounds_max.z())), scene);
  cfg.reset.position_center = start;
  cfg.goal_center = start;
  EnvironmentConfig bounds_only = scene;
  bounds_only.obstacle_count = 0;
  Task task(cfg, robot, num_envs, TaskOptions{options.seed, options.workers, 0}, bounds_only);

  const auto meshes = load_obstacle_meshes(scene);
  std::vector<WorldMesh> worlds(num_envs);
  for (std::size_t e = 0; e < num_envs; ++e) {
    CounterRng rng = CounterRng::for_env(options.seed ^ kSceneStream, e);
    worlds[e] = WorldMesh::build(meshes, sample_obstacle_transforms(scene, meshes.size(), rng), static_cast<int>(e));
  }

  std::vector<double> hold(num_envs * 4, 0.0);
  for (std::size_t e = 0; e < num_envs; ++e) {
    for (int i = 0; i < 3; ++i) hold[4 * e + static_cast<std::size_t>(i)] = start[i];
  }
  std::vector<std::uint64_t> sums(num_envs, 0);

  const auto t0 = Clock::now();
  for (std::size_t f = 0; f < frames; ++f) {
    task.step(hold);
    parallel_for_envs(num_envs, options.workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t e = begin; e < end; ++e) {
        const Pose pose{task.store().position(e), task.store().rotation(e)};
        SensorImage img = sensor.type == SensorType::camera ? render_camera(worlds[e], sensor.camera, pose)
                                                            : render_lidar(worlds[e], sensor.lidar, pose);
        if (sensor.stereo_baseline != 0.0) {
          const Pose& mount = sensor.type == SensorType::camera ? sensor.camera.pose_in_body : sensor.lidar.pose_in_body;
          apply_validity_mask(img, stereo_shadow_mask(img, worlds[e], sensor_pose(pose, mount), sensor.stereo_baseline));
        }
        std::uint64_t h = sums[e];
        for (std::size_t i = 0; i < img.pixel_count(); ++i) {
          h ^= digest(img.range[i], (f << 32) ^ i) ^ mix64(static_cast<std::uint64_t>(img.segmentation[i] + 2) + i);
        }
        sums[e] = h;
      }
    });
  }
  const double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  BenchReport r;
  r.benchmark = "render";
  r.num_envs = num_envs;
  r.steps = frames;
  r.wall_seconds = wall;
  r.fps = static_cast<double>(num_envs) * static_cast<double>(frames) / wall;
  const int w = sensor.type == SensorType::camera ? sensor.camera.width : static_cast<int>(sensor.lidar.azimuths.size());
  const int h = sensor.type == SensorType::camera ? sensor.camera.height : static_cast<int>(sensor.lidar.elevations.size());
  r.resolution = std::to_string(w) + "x" + std::to_string(h);
  std::size_t tris = 0;
  for (const auto& m : meshes) tris += m->faces.size();
  r.peak_memory_bytes = num_envs * (StateStore::bytes_per_env(robot.motors.size(), 4) + tris * (3 * sizeof(Vec3) + 64));
  r.seed = options.seed;
  r.workers = options.workers;
  r.isa = std::string(simd::to_string(simd::kernels().isa));
  r.machine_note = machine_note(options.workers);
  for (std::size_t e = 0; e < num_envs; ++e) r.checksum ^= mix64(sums[e] + e);
  r.reference_lines.push_back("published GPU figure: 37597 FPS at 2048 envs, 8x8 depth + segmentation; not asserted");
  return r;
}

RecordPolicy record_policy_from_string(std::string_view name) {
  if (name == "hover") return RecordPolicy::hover;
  if (name == "random") return RecordPolicy::random;
  if (name == "scripted-waypoints" || name == "scripted_waypoints") return RecordPolicy::scripted_waypoints;
  throw ValidationError("policy", "unknown policy '" + std::string(name) + "'");
}

std::vector<std::string> trajectory_columns(std::size_t action_dim) {
  std::vector<std::string> cols = {"step", "time", "env", "px", "py", "pz", "qw", "qx", "qy", "qz",
                                   "vx",   "vy",   "vz",  "wx", "wy", "wz"};
  for (std::size_t i = 0; i < action_dim; ++i) cols.push_back("a" + std::to_string(i));
  cols.insert(cols.end(), {"reward", "terminated", "truncated"});
  return cols;
}

std::vector<Vec3> scripted_waypoints(const Task& task, std::size_t env) {
  const Vec3 c = task.goal(env);
  return {c + Vec3(1, 1, 0), c + Vec3(-1, 1, 0), c + Vec3(-1, -1, 0), c + Vec3(1, -1, 0)};
}

std::string record_trajectory(Task& task, RecordPolicy policy, std::size_t steps, std::uint64_t seed) {
  const std::size_t N = task.num_envs();
  const std::size_t A = task.action_dim();
  const TaskConfig& cfg = task.config();
  if (policy == RecordPolicy::scripted_waypoints && cfg.action_mode != ActionMode::position &&
      cfg.action_mode != ActionMode::velocity) {
    throw ValidationError("policy", "scripted waypoints need position or velocity actions");
  }

  std::string csv;
  {
    const auto cols = trajectory_columns(A);
    for (std::size_t i = 0; i < cols.size(); ++i) csv += (i ? "," : "") + cols[i];
    csv += "\n";
  }
  std::vector<double> actions(N * A, 0.0);
  std::vector<double> rewards(N, 0.0);
  std::vector<std::uint8_t> term(N, 0), trunc(N, 0);
  auto write_rows = [&](std::size_t step) {
    const StateStore& s = task.store();
    for (std::size_t e = 0; e < N; ++e) {
      std::string row = std::to_string(step) + "," + fmt(static_cast<double>(step) * cfg.dt) + "," + std::to_string(e);
      for (int i = 0; i < 3; ++i) row += "," + fmt(s.position(e)[i]);
      for (int i = 0; i < 4; ++i) row += "," + fmt(s.orientation(e)[i]);
      for (int i = 0; i < 3; ++i) row += "," + fmt(s.linear_velocity(e)[i]);
      for (int i = 0; i < 3; ++i) row += "," + fmt(s.angular_velocity(e)[i]);
      for (std::size_t i = 0; i < A; ++i) row += "," + fmt(actions[e * A + i]);
      row += "," + fmt(rewards[e]) + "," + std::to_string(term[e]) + "," + std::to_string(trunc[e]) + "\n";
      csv += row;
    }
  };

  std::vector<Vec3> anchor(N);
  std::vector<std::vector<Vec3>> corners(N);
  std::vector<CounterRng> rngs(N);
  std::vector<std::size_t> episode_start(N, 0);
  for (std::size_t e = 0; e < N; ++e) {
    anchor[e] = task.store().position(e);
    corners[e] = scripted_waypoints(task, e);
    rngs[e] = CounterRng::for_env(seed ^ kPolicyStream, e);
  }
  double hover_thrust = 0.0;
  if (cfg.action_mode == ActionMode::motor) {
    const double r = hover_rpm(task.robot());
    hover_thrust = task.robot().motors.front().thrust_constant * r * r;
  }
  const std::size_t leg = std::max<std::size_t>(1, steps / 4);

  write_rows(0);
  for (std::size_t step = 1; step <= steps; ++step) {
    for (std::size_t e = 0; e < N; ++e) {
      double* a = &actions[e * A];
      const Vec3 p = task.store().position(e);
      switch (policy) {
        case RecordPolicy::hover:
          if (cfg.action_mode == ActionMode::motor) {
            std::fill(a, a + A, hover_thrust);
          } else if (cfg.action_mode == ActionMode::position) {
            a[0] = anchor[e].x(), a[1] = anchor[e].y(), a[2] = anchor[e].z(), a[3] = 0.0;
          } else {
            std::fill(a, a + A, 0.0);
          }
          break;
        case RecordPolicy::random:
          for (std::size_t i = 0; i < A; ++i) {
            if (cfg.action_mode == ActionMode::motor) {
              a[i] = sample_uniform(rngs[e], 0.0, task.robot().motors[i].max_thrust());
            } else if (cfg.action_mode == ActionMode::position) {
              a[i] = (i < 3 ? task.goal(e)[static_cast<Eigen::Index>(i)] : 0.0) + sample_uniform(rngs[e], -1.0, 1.0);
            } else {
              const double b = cfg.normalized_actions ? 1.0
                               : i == 3              ? cfg.bounds.yaw_rate
                               : cfg.action_mode == ActionMode::velocity ? cfg.bounds.velocity
                                                                         : cfg.bounds.acceleration;
              a[i] = sample_uniform(rngs[e], -b, b);
            }
          }
          break;
        case RecordPolicy::scripted_waypoints: {
          const std::size_t k = std::min<std::size_t>(3, (step - 1 - episode_start[e]) / leg);
          const Vec3 target = corners[e][k];
          if (cfg.action_mode == ActionMode::position) {
            a[0] = target.x(), a[1] = target.y(), a[2] = target.z(), a[3] = 0.0;
          } else {
            Vec3 v = 1.5 * (target - p);
            if (v.norm() > cfg.bounds.velocity) v *= cfg.bounds.velocity / v.norm();
            Vec3 v_vehicle = vehicle_frame(task.store().rotation(e)).transpose() * v;
            if (cfg.normalized_actions && cfg.bounds.velocity > 0.0) v_vehicle /= cfg.bounds.velocity;
            a[0] = v_vehicle.x(), a[1] = v_vehicle.y(), a[2] = v_vehicle.z(), a[3] = 0.0;
          }
          break;
        }
      }
    }
    StepResult res = task.step(actions);
    rewards = res.rewards;
    term = res.terminated;
    trunc = res.truncated;
    for (std::size_t e = 0; e < N; ++e) {
      if (res.info.reset[e]) {
        anchor[e] = task.store().position(e);
        corners[e] = scripted_waypoints(task, e);
        episode_start[e] = step;
      }
    }
    write_rows(step);
  }
  return csv;
}

std::vector<Pose> turntable_poses(const Vec3& center, std::size_t count) {
  std::vector<Pose> poses(count);
  for (std::size_t i = 0; i < count; ++i) {
    poses[i].position = center;
    poses[i].rotation = rot_z(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count));
  }
  return poses;
}

FrameDumpSummary dump_sensor_frames(const EnvironmentConfig& scene, const SensorConfig& sensor,
                                    const std::vector<Pose>& poses, const std::filesystem::path& out_dir,
                                    std::uint64_t seed) {
  validate(scene);
  validate(sensor);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  const auto meshes = load_obstacle_meshes(scene);
  CounterRng rng = CounterRng::for_env(seed ^ kSceneStream, 0);
  const WorldMesh world = WorldMesh::build(meshes, sample_obstacle_transforms(scene, meshes.size(), rng), 0);

  FrameDumpSummary summary;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const bool camera = sensor.type == SensorType::camera;
    SensorImage img = camera ? render_camera(world, sensor.camera, poses[i]) : render_lidar(world, sensor.lidar, poses[i]);
    std::size_t shadowed = 0;
    if (sensor.stereo_baseline != 0.0) {
      const Pose& mount = camera ? sensor.camera.pose_in_body : sensor.lidar.pose_in_body;
      const auto mask = stereo_shadow_mask(img, world, sensor_pose(poses[i], mount), sensor.stereo_baseline);
      for (std::size_t k = 0; k < mask.size(); ++k) shadowed += (img.valid[k] && !mask[k]) ? 1 : 0;
      apply_validity_mask(img, mask);
    }
    char stem[32];
    std::snprintf(stem, sizeof stem, "frame%03zu", i);
    auto out = [&](const std::string& suffix) {
      summary.files.push_back(out_dir / (std::string(stem) + suffix));
      return summary.files.back();
    };
    if (camera) write_pgm16(out("_depth.pgm"), img.width, img.height, quantize_mm(img.depth));
    write_pgm16(out("_range.pgm"), img.width, img.height, quantize_mm(img.range));
    write_int_matrix(out("_seg.txt"), img.width, img.height, img.segmentation);
    write_int_matrix(out("_face.txt"), img.width, img.height, img.face_index);
    write_point_cloud(out("_points.csv"), img);
    summary.valid_pixels.push_back(img.valid_count());
    summary.shadowed_pixels.push_back(shadowed);
  }
  return summary;
}

}  // namespace aerialsim
