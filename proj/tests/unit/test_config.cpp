#include "aerialsim/config.hpp"
#include "aerialsim/control.hpp"
#include "aerialsim/errors.hpp"
#include "aerialsim/mesh.hpp"
#include "aerialsim/tasks.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace aerialsim;

namespace {

int oracle_rank(const RobotConfig& robot) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(oracle::effectiveness(robot.motors));
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

}  // namespace

TEST(RobotConfig, PresetsValidate) {
  EXPECT_NO_THROW(validate(make_quadrotor_config()));
  EXPECT_NO_THROW(validate(make_tilted_octorotor_config()));
}

TEST(RobotConfig, QuadIsRankFourOctoIsRankSix) {
  EXPECT_EQ(oracle_rank(make_quadrotor_config()), 4);
  const RobotConfig octo = make_tilted_octorotor_config();
  ASSERT_EQ(octo.motors.size(), 8u);
  EXPECT_EQ(oracle_rank(octo), 6);
  EXPECT_EQ(build_allocation(octo.motors).rank, 6);
}

TEST(RobotConfig, SerializeRoundTrip) {
  for (const RobotConfig& cfg : {make_quadrotor_config(), make_tilted_octorotor_config()}) {
    EXPECT_EQ(parse_robot_config(serialize(cfg)), cfg);
  }
}

TEST(RobotConfig, ShippedFilesLoad) {
  const auto dir = testing_support::source_dir() / "configs";
  EXPECT_EQ(load_robot_config(dir / "quad.json").motors.size(), 4u);
  EXPECT_EQ(load_robot_config(dir / "octo.json").motors.size(), 8u);
}

TEST(RobotConfig, RejectsBadValues) {
  RobotConfig cfg = make_quadrotor_config();
  cfg.mass = 0.0;
  try {
    validate(cfg);
    FAIL() << "zero mass accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "mass");
  }
  cfg = make_quadrotor_config();
  cfg.motors[0].thrust_axis = Vec3(0, 0, 2);
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = make_quadrotor_config();
  cfg.inertia(0, 0) = -1.0;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = make_quadrotor_config();
  cfg.motors.clear();
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = make_quadrotor_config();
  cfg.motors[1].direction = 0;
  EXPECT_THROW(validate(cfg), ValidationError);
}

TEST(RobotConfig, MalformedTextIsParseError) {
  EXPECT_THROW(parse_robot_config("{ \"mass\": "), ParseError);
  EXPECT_THROW(parse_robot_config("[1, 2, 3]"), Error);
}

TEST(RobotConfig, DefaultGainsScaleWithMassAndInertia) {
  Mat3 J = Vec3(0.01, 0.02, 0.03).asDiagonal();
  const ControlGains g = ControlGains::defaults_for(2.0, J);
  EXPECT_DOUBLE_EQ(g.k_x.x(), 12.0);
  EXPECT_DOUBLE_EQ(g.k_v.z(), 8.0);
  EXPECT_DOUBLE_EQ(g.k_R.y(), 100.0 * 0.02);
  EXPECT_DOUBLE_EQ(g.k_omega.z(), 20.0 * 0.03);
}

TEST(EnvironmentConfig, TwentyCubeSceneLoads) {
  const auto env = load_environment_config(testing_support::source_dir() / "configs" / "env_20cubes.json");
  EXPECT_EQ(env.obstacle_count, 20);
  ASSERT_EQ(env.obstacle_assets.size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(env.asset_path(0)));
  EXPECT_EQ(parse_environment_config(serialize(env), env.base_dir), env);
}

TEST(EnvironmentConfig, RejectsDegenerateBoundsAndRanges) {
  EnvironmentConfig env;
  env.bounds_max.x() = env.bounds_min.x();
  EXPECT_THROW(validate(env), ValidationError);
  env = EnvironmentConfig{};
  env.pose_randomization[0] = Range{1.0, -1.0};
  EXPECT_THROW(validate(env), ValidationError);
  env = EnvironmentConfig{};
  env.scale_randomization = Range{0.0, 1.0};
  EXPECT_THROW(validate(env), ValidationError);
}

TEST(SensorConfig, CameraFromFov) {
  const auto s = parse_sensor_config(R"({"type": "camera", "resolution": [64, 48], "hfov": 1.5707963267948966})");
  EXPECT_EQ(s.camera.width, 64);
  EXPECT_NEAR(s.camera.fx, 32.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.camera.cx, 32.0);
  EXPECT_DOUBLE_EQ(s.camera.cy, 24.0);
  EXPECT_EQ(parse_sensor_config(serialize(s)), s);
}

TEST(SensorConfig, LidarFullCircleSkipsDuplicateEndpoint) {
  const auto s = parse_sensor_config(
      R"({"type": "lidar", "azimuth": {"count": 4, "min": -3.141592653589793, "max": 3.141592653589793},
          "elevation": {"count": 3, "min": -0.5, "max": 0.5}})");
  ASSERT_EQ(s.lidar.azimuths.size(), 4u);
  EXPECT_NEAR(s.lidar.azimuths[1] - s.lidar.azimuths[0], std::numbers::pi / 2.0, 1e-12);
  ASSERT_EQ(s.lidar.elevations.size(), 3u);
  EXPECT_DOUBLE_EQ(s.lidar.elevations.back(), 0.5);
}

TEST(SensorConfig, ShippedFilesLoad) {
  const auto dir = testing_support::source_dir() / "configs";
  EXPECT_EQ(load_sensor_config(dir / "camera_depth.json").type, SensorType::camera);
  EXPECT_DOUBLE_EQ(load_sensor_config(dir / "camera_stereo.json").stereo_baseline, 0.05);
  EXPECT_EQ(load_sensor_config(dir / "lidar_16.json").lidar.elevations.size(), 16u);
}

TEST(SensorConfig, RejectsBadValues) {
  EXPECT_THROW(parse_sensor_config(R"({"type": "sonar"})"), ValidationError);
  EXPECT_THROW(parse_sensor_config(R"({"type": "camera", "resolution": [0, 4], "hfov": 1.0})"), ValidationError);
  EXPECT_THROW(parse_sensor_config(R"({"type": "camera", "resolution": [4, 4], "hfov": 1.0, "range": [2, 1]})"),
               ValidationError);
  EXPECT_THROW(
      parse_sensor_config(R"({"type": "camera", "resolution": [4, 4], "hfov": 1.0, "stereo_baseline": -0.1})"),
      ValidationError);
}

TEST(TaskConfig, ShippedFilesLoad) {
  const auto dir = testing_support::source_dir() / "configs";
  const TaskConfig pos = load_task_config(dir / "task_position.json");
  EXPECT_EQ(pos.kind, TaskKind::position_setpoint);
  EXPECT_EQ(pos.action_mode, ActionMode::velocity);
  const TaskConfig nav = load_task_config(dir / "task_navigation.json");
  EXPECT_EQ(nav.kind, TaskKind::navigation);
  ASSERT_TRUE(nav.sensor.has_value());
  EXPECT_EQ(nav.sensor->camera.width, 32);
}

TEST(TaskConfig, RejectsInconsistentSettings) {
  TaskConfig cfg = TaskConfig::defaults(TaskKind::position_setpoint);
  cfg.action_mode = ActionMode::motor;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = TaskConfig::defaults(TaskKind::navigation);
  cfg.sensor.reset();
  EXPECT_THROW(cfg.validate(), ValidationError);
  EXPECT_THROW(parse_task_config(R"({"task": "racing"})"), ValidationError);
}

TEST(MeshLoader, TrianglesQuadsAndIndexForms) {
  MeshLoadReport report;
  const TriangleMesh m = parse_obj(
      "# comment\n"
      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
      "vt 0 0\nvn 0 0 1\n"
      "f 1/1/1 2/1/1 3/1/1\n"
      "f -4//1 -2//1 -1//1\n"
      "f 1 2 3 4\n",
      &report);
  EXPECT_EQ(m.vertices.size(), 4u);
  EXPECT_EQ(m.faces.size(), 4u);
  EXPECT_EQ(report.triangulated_quads, 1u);
  EXPECT_EQ(m.faces[1], (std::array<int, 3>{0, 2, 3}));
}

TEST(MeshLoader, DropsDegenerateFaces) {
  MeshLoadReport report;
  const TriangleMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 2 0 0\nv 0 1 0\nf 1 2 3\nf 1 2 4\n", &report);
  EXPECT_EQ(m.faces.size(), 1u);
  EXPECT_EQ(report.dropped_degenerate, 1u);
}

TEST(MeshLoader, Annotations) {
  const TriangleMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nva 1 2\nva 3 4\nva 5 6\nf 1 2 3\n");
  ASSERT_EQ(m.annotation_dim(), 2u);
  EXPECT_DOUBLE_EQ(m.vertex_annotations[2][1], 6.0);
}

TEST(MeshLoader, Errors) {
  EXPECT_THROW(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n"), ParseError);
  EXPECT_THROW(parse_obj("v 0 0\n"), ParseError);
  EXPECT_THROW(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 1\nv 2 2 2\nf 1 2 3 4 5\n"), ParseError);
  EXPECT_THROW(load_mesh("/nonexistent/mesh.obj"), Error);
  TriangleMesh bad;
  bad.vertices = {Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()};
  bad.faces = {{0, 1, 3}};
  EXPECT_THROW(validate(bad), ValidationError);
}

TEST(MeshLoader, ShippedCubeMatchesBoxBuilder) {
  const TriangleMesh cube = load_mesh(testing_support::source_dir() / "configs" / "meshes" / "cube.obj");
  EXPECT_EQ(cube.faces.size(), 12u);
  // Outward winding: every face normal points away from the centroid.
  for (const auto& f : cube.faces) {
    const Vec3 a = cube.vertices[f[0]], b = cube.vertices[f[1]], c = cube.vertices[f[2]];
    EXPECT_GT((b - a).cross(c - a).dot((a + b + c) / 3.0), 0.0);
  }
}
