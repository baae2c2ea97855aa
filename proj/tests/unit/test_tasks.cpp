#include "aerialsim/errors.hpp"
#include "aerialsim/scene.hpp"
#include "aerialsim/tasks.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace aerialsim;

namespace {

TaskConfig quiet(TaskKind kind) {
  TaskConfig cfg = TaskConfig::defaults(kind);
  cfg.sample_imu = false;
  return cfg;
}

TaskConfig small_nav() {
  TaskConfig cfg = TaskConfig::defaults(TaskKind::navigation);
  cfg.episode_length = 200;
  return cfg;
}

std::vector<double> random_actions(std::size_t n, std::size_t a, std::uint64_t seed, std::size_t step) {
  std::vector<double> out(n * a);
  for (std::size_t e = 0; e < n; ++e) {
    CounterRng rng{mix64(seed ^ (e * 7919 + step)), 0};
    for (std::size_t i = 0; i < a; ++i) out[e * a + i] = sample_uniform(rng, -1.5, 1.5);
  }
  return out;
}

}  // namespace

TEST(TaskHelpers, RotationTo6d) {
  const Vec6 r = rotation_to_6d(rot_z(std::numbers::pi / 2.0));
  Vec6 expect;
  expect << 0, 1, 0, -1, 0, 0;
  EXPECT_TRUE((r - expect).isZero(1e-15));
}

TEST(TaskHelpers, VehicleFrameKeepsYawOnly) {
  const Mat3 V = vehicle_frame(rot_from_rpy(0.3, -0.2, 1.1));
  EXPECT_TRUE((V - rot_z(1.1)).isZero(1e-12));
}

TEST(TaskHelpers, RewardTerms) {
  RewardWeights w;
  const std::vector<double> a = {1, 0, 0, 0}, prev = {0, 0, 0, 0};
  const double r = compute_reward(w, 2.0, 1.5, Vec3(0, 0, 2), a, prev, false);
  EXPECT_NEAR(r, 0.5 - 0.01 * 2.0 - 0.01 * 1.0, 1e-15);
  const double at_goal = compute_reward(w, 0.15, 0.1, Vec3::Zero(), prev, prev, false);
  EXPECT_NEAR(at_goal, 0.05 + 1.0, 1e-15);
  const double crash = compute_reward(w, 1.0, 1.0, Vec3::Zero(), prev, prev, true);
  EXPECT_NEAR(crash, -10.0, 1e-15);
}

TEST(TaskHelpers, DepthDownsampleMinPools) {
  // 4 x 2 image into 2 x 1 blocks.
  const std::vector<double> depth = {4.0, 2.0, -1.0, -1.0, 3.0, 5.0, -1.0, -1.0};
  const auto out = depth_downsample(depth, 4, 2, 2, 1, 10.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0], 0.2);
  EXPECT_DOUBLE_EQ(out[1], 1.0);
  EXPECT_THROW(depth_downsample(depth, 4, 2, 3, 1, 10.0), ValidationError);
}

TEST(TaskContract, ObservationAndActionWidths) {
  const RobotConfig quad = make_quadrotor_config();
  const RobotConfig octo = make_tilted_octorotor_config();
  Task pos(quiet(TaskKind::position_setpoint), quad, 3);
  EXPECT_EQ(pos.observation_dim(), 17u);
  EXPECT_EQ(pos.action_dim(), 4u);
  EXPECT_EQ(pos.reset().size(), 3u * 17u);
  Task motor(quiet(TaskKind::motor_control), octo, 2);
  EXPECT_EQ(motor.observation_dim(), 15u);
  EXPECT_EQ(motor.action_dim(), 8u);
  Task nav(small_nav(), quad, 2, {}, default_obstacle_scene());
  EXPECT_EQ(nav.observation_dim(), 208u);
  const StepResult r = nav.step(std::vector<double>(8, 0.0));
  EXPECT_EQ(r.observations.size(), 2u * 208u);
  EXPECT_EQ(r.rewards.size(), 2u);
}

TEST(TaskContract, WrongActionWidthThrows) {
  Task t(quiet(TaskKind::position_setpoint), make_quadrotor_config(), 3);
  EXPECT_THROW(t.step(std::vector<double>(11, 0.0)), ValidationError);
  EXPECT_THROW(t.step(std::vector<double>(13, 0.0)), ValidationError);
  const std::size_t bad[] = {3};
  EXPECT_THROW(t.reset(bad), IndexError);
}

TEST(TaskContract, NanActionTerminatesAndAutoResets) {
  TaskConfig cfg = quiet(TaskKind::position_setpoint);
  Task t(cfg, make_quadrotor_config(), 4, TaskOptions{5});
  for (int i = 0; i < 10; ++i) t.step(std::vector<double>(16, 0.1));
  std::vector<double> a(16, 0.1);
  a[2 * 4 + 1] = std::numeric_limits<double>::quiet_NaN();
  const StepResult r = t.step(a);
  EXPECT_EQ(r.terminated, (std::vector<std::uint8_t>{0, 0, 1, 0}));
  EXPECT_EQ(r.info.nan_action[2], 1);
  EXPECT_EQ(r.info.reset, (std::vector<std::uint8_t>{0, 0, 1, 0}));
  EXPECT_DOUBLE_EQ(r.rewards[2], -cfg.reward.collision_penalty);
  ASSERT_EQ(r.info.final_observations.size(), t.observation_dim());
  EXPECT_EQ(t.store().episode_step[2], 0);
  EXPECT_EQ(t.store().episode_step[0], 11);
  for (double x : r.observations) EXPECT_TRUE(std::isfinite(x));
  // The returned row is the post-reset observation.
  const auto now = t.observations();
  EXPECT_TRUE(std::equal(now.begin(), now.end(), r.observations.begin()));
}

TEST(TaskContract, TruncationAtEpisodeLength) {
  TaskConfig cfg = quiet(TaskKind::position_setpoint);
  cfg.episode_length = 5;
  Task t(cfg, make_quadrotor_config(), 2);
  for (int i = 0; i < 4; ++i) {
    const StepResult r = t.step(std::vector<double>(8, 0.0));
    EXPECT_EQ(r.truncated[0], 0);
  }
  const StepResult r = t.step(std::vector<double>(8, 0.0));
  EXPECT_EQ(r.truncated, (std::vector<std::uint8_t>{1, 1}));
  EXPECT_EQ(r.terminated, (std::vector<std::uint8_t>{0, 0}));
  EXPECT_EQ(r.info.reset, (std::vector<std::uint8_t>{1, 1}));
  EXPECT_EQ(r.info.final_observations.size(), 2 * t.observation_dim());
}

TEST(TaskContract, PartialResetIsolation) {
  Task t(small_nav(), make_quadrotor_config(), 5, TaskOptions{9}, default_obstacle_scene());
  for (std::size_t s = 0; s < 20; ++s) t.step(random_actions(5, 4, 1, s));
  const StateStore before = t.store();
  const auto obs_before = t.observations();
  std::vector<Vec3> goals;
  for (std::size_t e = 0; e < 5; ++e) goals.push_back(t.goal(e));
  const std::size_t ids[] = {3};
  const auto obs = t.reset(ids);
  const std::size_t D = t.observation_dim();
  for (std::size_t e = 0; e < 5; ++e) {
    const bool touched = e == 3;
    EXPECT_EQ(t.store().position(e) == before.position(e), !touched);
    EXPECT_EQ(t.goal(e) == goals[e], !touched);
    EXPECT_EQ(std::equal(obs.begin() + e * D, obs.begin() + (e + 1) * D, obs_before.begin() + e * D), !touched);
  }
}

TEST(TaskContract, SameSeedSameRollout) {
  auto run = [](int workers) {
    Task t(small_nav(), make_quadrotor_config(), 6, TaskOptions{21, workers}, default_obstacle_scene());
    std::vector<double> trace = t.observations();
    for (std::size_t s = 0; s < 60; ++s) {
      const StepResult r = t.step(random_actions(6, 4, 2, s));
      trace.insert(trace.end(), r.observations.begin(), r.observations.end());
      trace.insert(trace.end(), r.rewards.begin(), r.rewards.end());
    }
    return trace;
  };
  const auto a = run(1);
  EXPECT_EQ(a, run(1));
  EXPECT_EQ(a, run(3));
}

TEST(TaskContract, BatchedEqualsSerial) {
  const std::size_t N = 4;
  Task batch(small_nav(), make_quadrotor_config(), N, TaskOptions{17}, default_obstacle_scene());
  std::vector<Task> singles;
  for (std::size_t e = 0; e < N; ++e)
    singles.emplace_back(small_nav(), make_quadrotor_config(), 1, TaskOptions{17, 1, e}, default_obstacle_scene());
  for (std::size_t s = 0; s < 40; ++s) {
    const auto actions = random_actions(N, 4, 3, s);
    const StepResult rb = batch.step(actions);
    for (std::size_t e = 0; e < N; ++e) {
      const StepResult rs = singles[e].step(std::span<const double>(actions).subspan(4 * e, 4));
      ASSERT_EQ(rs.rewards[0], rb.rewards[e]) << "step " << s << " env " << e;
      ASSERT_TRUE(std::equal(rs.observations.begin(), rs.observations.end(), rb.observations.begin() + e * 208));
    }
  }
}

TEST(Navigation, ResetPlacesStartAndGoalApartAndClear) {
  const TaskConfig cfg = small_nav();
  const RobotConfig robot = make_quadrotor_config();
  Task t(cfg, robot, 32, TaskOptions{4}, default_obstacle_scene());
  for (int round = 0; round < 3; ++round) {
    for (std::size_t e = 0; e < 32; ++e) {
      const Vec3 p = t.store().position(e);
      EXPECT_GE((t.goal(e) - p).norm(), cfg.min_goal_distance);
      EXPECT_GT(t.worlds()[e].closest_distance(p), robot.collision_radius + cfg.spawn_clearance);
      EXPECT_GT(t.worlds()[e].closest_distance(t.goal(e)), robot.collision_radius + cfg.spawn_clearance);
      EXPECT_EQ(t.worlds()[e].submesh_count(), 20u);
    }
    t.reset();
  }
}

TEST(Navigation, DepthFeaturesInUnitRange) {
  Task t(small_nav(), make_quadrotor_config(), 4, TaskOptions{6}, default_obstacle_scene());
  const auto obs = t.step(std::vector<double>(16, 0.0)).observations;
  bool any_near = false;
  for (std::size_t e = 0; e < 4; ++e) {
    for (std::size_t i = 16; i < 208; ++i) {
      const double d = obs[e * 208 + i];
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 1.0);
      any_near |= d < 1.0;
    }
  }
  EXPECT_TRUE(any_near);
}

TEST(MotorTask, HoverThrustHoldsAltitude) {
  TaskConfig cfg = quiet(TaskKind::motor_control);
  cfg.reset = ResetSpec{};
  cfg.reset.position_center = Vec3(0, 0, 2);
  cfg.reset.hover_trim = true;
  const RobotConfig robot = make_quadrotor_config();
  Task t(cfg, robot, 1, {}, std::nullopt);
  const double u = robot.mass * robot.gravity / 4.0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    t.step(std::vector<double>(4, u));
    worst = std::max(worst, std::abs(t.store().position(0).z() - 2.0));
  }
  EXPECT_LT(worst, 0.05);
}

TEST(VelocityTask, TracksCommandedVelocity) {
  TaskConfig cfg = quiet(TaskKind::position_setpoint);
  cfg.reset = ResetSpec{};
  cfg.reset.position_center = Vec3(0, 0, 2);
  cfg.reset.hover_trim = true;
  cfg.episode_length = 10000;
  Task t(cfg, make_quadrotor_config(), 1);
  for (int i = 0; i < 300; ++i) t.step(std::vector<double>{1.0, 0.0, 0.0, 0.0});
  EXPECT_NEAR(t.store().linear_velocity(0).x(), 1.0, 0.05);
  EXPECT_NEAR(t.store().linear_velocity(0).z(), 0.0, 0.05);
}

TEST(PositionTask, ObservationStartsWithGoalError) {
  Task t(quiet(TaskKind::position_setpoint), make_quadrotor_config(), 2, TaskOptions{3});
  const auto obs = t.observations();
  for (std::size_t e = 0; e < 2; ++e) {
    const Vec3 err = t.goal(e) - t.store().position(e);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(obs[e * 17 + static_cast<std::size_t>(i)], err[i]);
  }
}
