#include "aerialsim/bench.hpp"
#include "aerialsim/image_io.hpp"
#include "aerialsim/mesh.hpp"
#include "aerialsim/scene.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <numbers>
#include <sstream>

using namespace aerialsim;

namespace {

SensorConfig forward_camera_sensor(int w, int h, double baseline = 0.0) {
  SensorConfig s;
  s.type = SensorType::camera;
  s.camera = CameraModel::from_fov(w, h, std::numbers::pi / 2.0, 0.1, 20.0);
  s.camera.pose_in_body = Pose{Vec3::Zero(), forward_camera_rotation()};
  s.stereo_baseline = baseline;
  return s;
}

/// Scene with `count` unit cubes pinned at `at` (no randomization).
EnvironmentConfig pinned_scene(int count, const Vec3& at) {
  EnvironmentConfig env;
  env.obstacle_count = count;
  for (int i = 0; i < 3; ++i) env.pose_randomization[static_cast<std::size_t>(i)] = Range{at[i], at[i]};
  return env;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string obj_text(const TriangleMesh& m) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& v : m.vertices) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : m.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  return os.str();
}

TaskConfig hover_start_position_task() {
  TaskConfig cfg = TaskConfig::defaults(TaskKind::position_setpoint);
  cfg.action_mode = ActionMode::position;
  cfg.reset = ResetSpec{};
  cfg.reset.position_center = Vec3(0, 0, 2);
  cfg.reset.hover_trim = true;
  cfg.sample_imu = false;
  cfg.episode_length = 100000;
  return cfg;
}

}  // namespace

TEST(BenchPhysics, ReportIdentityAndFooter) {
  const BenchReport r = bench_physics(16, 1000, make_quadrotor_config());
  EXPECT_GT(r.sps, 0.0);
  EXPECT_EQ(r.sps, 16.0 * 1000.0 / r.wall_seconds);
  const std::string text = format_report(r);
  EXPECT_NE(text.find("physics_sps"), std::string::npos);
  EXPECT_NE(text.find("4.43e6 SPS at 65536 envs"), std::string::npos);
  EXPECT_NE(text.find("not asserted"), std::string::npos);
}

TEST(BenchPhysics, ChecksumIndependentOfWorkers) {
  const RobotConfig robot = make_tilted_octorotor_config();
  const auto a = bench_physics(37, 200, robot, BenchOptions{0.01, 3, 1});
  const auto b = bench_physics(37, 200, robot, BenchOptions{0.01, 3, 4});
  EXPECT_EQ(a.checksum, b.checksum);
}

TEST(BenchRender, ReportIdentityAndDeterminism) {
  const SensorConfig cam = forward_camera_sensor(16, 12);
  const auto a = bench_render(8, 5, default_obstacle_scene(), cam, make_quadrotor_config(), BenchOptions{0.01, 5, 1});
  const auto b = bench_render(8, 5, default_obstacle_scene(), cam, make_quadrotor_config(), BenchOptions{0.01, 5, 3});
  EXPECT_EQ(a.fps, 8.0 * 5.0 / a.wall_seconds);
  EXPECT_EQ(a.resolution, "16x12");
  EXPECT_EQ(a.checksum, b.checksum);
  const auto c = bench_render(8, 5, default_obstacle_scene(), cam, make_quadrotor_config(), BenchOptions{0.01, 6, 1});
  EXPECT_NE(a.checksum, c.checksum);
  EXPECT_NE(format_report(a).find("37597 FPS at 2048 envs"), std::string::npos);
}

TEST(BenchRender, LidarSensor) {
  SensorConfig s;
  s.type = SensorType::lidar;
  s.lidar = LidarPattern::uniform(32, -std::numbers::pi, std::numbers::pi, 4, -0.2, 0.2, 0.1, 20.0);
  const auto r = bench_render(4, 3, default_obstacle_scene(), s, make_quadrotor_config());
  EXPECT_EQ(r.resolution, "32x4");
  EXPECT_GT(r.fps, 0.0);
}

TEST(Record, ColumnSchema) {
  const auto cols = trajectory_columns(4);
  const std::vector<std::string> expect = {"step", "time", "env", "px", "py", "pz", "qw", "qx", "qy", "qz", "vx",
                                           "vy",   "vz",   "wx",  "wy", "wz", "a0", "a1", "a2", "a3", "reward",
                                           "terminated", "truncated"};
  EXPECT_EQ(cols, expect);
}

TEST(Record, HoverPolicyHoldsPosition) {
  Task t(hover_start_position_task(), make_quadrotor_config(), 3, TaskOptions{1});
  const auto rows = parse_csv(record_trajectory(t, RecordPolicy::hover, 300, 1));
  ASSERT_EQ(rows.size(), 3u * 301u);
  for (const auto& row : rows) {
    const std::size_t e = static_cast<std::size_t>(row[2]);
    const auto& first = rows[e];
    for (int k = 3; k < 6; ++k) EXPECT_NEAR(row[static_cast<std::size_t>(k)], first[static_cast<std::size_t>(k)], 0.01);
  }
}

TEST(Record, SameSeedSameBytes) {
  auto run = [] {
    Task t(TaskConfig::defaults(TaskKind::position_setpoint), make_quadrotor_config(), 4, TaskOptions{8});
    return record_trajectory(t, RecordPolicy::random, 50, 8);
  };
  const std::string a = run();
  EXPECT_EQ(a, run());
  EXPECT_EQ(a.substr(0, 5), "step,");
}

TEST(Record, ScriptedSquareVisitsCorners) {
  Task t(hover_start_position_task(), make_quadrotor_config(), 2, TaskOptions{2});
  std::vector<std::vector<Vec3>> corners;
  for (std::size_t e = 0; e < 2; ++e) corners.push_back(scripted_waypoints(t, e));
  const std::size_t steps = 1200;
  const auto rows = parse_csv(record_trajectory(t, RecordPolicy::scripted_waypoints, steps, 2));
  for (std::size_t e = 0; e < 2; ++e) {
    for (std::size_t k = 0; k < 4; ++k) {
      double best = 1e9;
      for (const auto& row : rows) {
        if (static_cast<std::size_t>(row[2]) != e) continue;
        best = std::min(best, (Vec3(row[3], row[4], row[5]) - corners[e][k]).norm());
      }
      EXPECT_LT(best, 0.1) << "env " << e << " corner " << k;
    }
  }
}

TEST(DumpFrames, EmptySceneIsAllSentinel) {
  const auto dir = testing_support::scratch_dir("dump_empty");
  const auto summary =
      dump_sensor_frames(pinned_scene(0, Vec3::Zero()), forward_camera_sensor(16, 12), {Pose{}}, dir, 0);
  EXPECT_EQ(summary.valid_pixels, (std::vector<std::size_t>{0}));
  const Pgm16 depth = decode_pgm16(slurp(dir / "frame000_depth.pgm"));
  EXPECT_EQ(depth.pixels, std::vector<std::uint16_t>(16 * 12, 0));
  for (const char* suffix : {"_range.pgm", "_seg.txt", "_face.txt", "_points.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / (std::string("frame000") + suffix)));
}

TEST(DumpFrames, CenteredCubeFootprint) {
  const auto dir = testing_support::scratch_dir("dump_cube");
  const SensorConfig s = forward_camera_sensor(32, 24);
  dump_sensor_frames(pinned_scene(1, Vec3(3.0, 0.0, 0.0)), s, {Pose{}}, dir, 0);
  const Pgm16 depth = decode_pgm16(slurp(dir / "frame000_depth.pgm"));
  const Mat3 Rc = s.camera.pose_in_body.rotation;
  std::size_t inside_count = 0;
  for (int v = 0; v < 24; ++v) {
    for (int u = 0; u < 32; ++u) {
      const Vec3 d = Rc * Vec3((u - s.camera.cx) / s.camera.fx, (v - s.camera.cy) / s.camera.fy, 1.0).normalized();
      const auto slab = oracle::ray_box(Vec3::Zero(), d, Vec3(2.5, -0.5, -0.5), Vec3(3.5, 0.5, 0.5));
      const bool inside = slab && slab->first > 0.0;
      // Pixels exactly on the silhouette may go either way.
      if (slab && std::abs(slab->second - slab->first) < 1e-9) continue;
      EXPECT_EQ(depth.pixels[static_cast<std::size_t>(v * 32 + u)] != 0, inside) << u << "," << v;
      inside_count += inside;
    }
  }
  EXPECT_GT(inside_count, 0u);
}

TEST(DumpFrames, BaselineInvalidatesMorePixels) {
  const auto dir = testing_support::scratch_dir("dump_stereo");
  // thin post in front of a wide wall; pose ranges are zero so meshes stay put
  write_text_file(dir / "post.obj", obj_text(make_box_mesh(Vec3(1.5, -0.05, -3), Vec3(1.6, 0.05, 3))));
  write_text_file(dir / "wall.obj", obj_text(make_box_mesh(Vec3(5, -30, -30), Vec3(5.5, 30, 30))));
  EnvironmentConfig env;
  env.obstacle_assets = {"post.obj", "wall.obj"};
  env.obstacle_count = 2;
  env.base_dir = dir;
  const auto mono = dump_sensor_frames(env, forward_camera_sensor(48, 16, 0.0), {Pose{}}, dir / "mono", 0);
  const auto stereo = dump_sensor_frames(env, forward_camera_sensor(48, 16, 0.05), {Pose{}}, dir / "stereo", 0);
  EXPECT_EQ(mono.shadowed_pixels[0], 0u);
  EXPECT_GT(stereo.shadowed_pixels[0], 0u);
  EXPECT_EQ(stereo.valid_pixels[0] + stereo.shadowed_pixels[0], mono.valid_pixels[0]);
}

TEST(DumpFrames, TurntablePoses) {
  const auto poses = turntable_poses(Vec3(1, 2, 3), 4);
  ASSERT_EQ(poses.size(), 4u);
  EXPECT_TRUE((poses[1].rotation - rot_z(std::numbers::pi / 2.0)).isZero(1e-15));
  EXPECT_EQ(poses[3].position, Vec3(1, 2, 3));
}
