#include "aerialsim/errors.hpp"
#include "aerialsim/imu.hpp"
#include "aerialsim/state_store.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace aerialsim;

namespace {

struct Moments {
  double mean = 0.0, var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(xs.size() - 1);
  return m;
}

}  // namespace

TEST(Imu, NoiselessReproducesTruth) {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  ImuParams params;
  CounterRng rng = CounterRng::for_env(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 R = oracle::rodrigues(Vec3(u(g), u(g), u(g)), u(g));
    const Vec3 f(u(g), u(g), u(g)), w(u(g), u(g), u(g));
    Vec3 ba = Vec3::Zero(), bg = Vec3::Zero();
    const ImuSample s = sample_imu(f, w, R, 1.3, 9.81, ba, bg, params, rng);
    EXPECT_EQ(s.gyro, w);
    EXPECT_EQ(s.accel, specific_force(f, R, 1.3, 9.81));
    EXPECT_TRUE((s.accel - oracle::specific_force(f, R, 1.3, 9.81)).isZero(1e-12));
  }
  EXPECT_EQ(rng.counter, 0u) << "zero sigmas must not consume draws";
}

TEST(Imu, RestReadsGravityUp) {
  ImuParams params;
  CounterRng rng;
  Vec3 ba = Vec3::Zero(), bg = Vec3::Zero();
  const ImuSample s = sample_imu(Vec3::Zero(), Vec3::Zero(), Mat3::Identity(), 1.0, 9.81, ba, bg, params, rng);
  EXPECT_TRUE((s.accel - Vec3(0, 0, 9.81)).isZero(0.0));
}

TEST(Imu, WhiteNoiseStd) {
  ImuParams params;
  params.sigma_accel = Vec3(0.02, 0.03, 0.05);
  CounterRng rng = CounterRng::for_env(2, 0);
  const int n = 200000;
  std::array<std::vector<double>, 3> axes;
  for (int i = 0; i < n; ++i) {
    Vec3 ba = Vec3::Zero(), bg = Vec3::Zero();
    const ImuSample s = sample_imu(Vec3::Zero(), Vec3::Zero(), Mat3::Identity(), 1.0, 9.81, ba, bg, params, rng);
    for (int k = 0; k < 3; ++k) axes[k].push_back(s.accel[k] - (k == 2 ? 9.81 : 0.0));
  }
  for (int k = 0; k < 3; ++k) {
    const Moments m = moments(axes[k]);
    EXPECT_NEAR(std::sqrt(m.var), params.sigma_accel[k], 0.01 * params.sigma_accel[k]);
    EXPECT_NEAR(m.mean, 0.0, 4.0 * params.sigma_accel[k] / std::sqrt(n));
  }
}

TEST(Imu, BiasRandomWalkStatistics) {
  ImuParams params;
  params.sigma_gyro_bias = Vec3::Constant(0.01);
  const int envs = 5000, steps = 50;
  std::vector<double> finals;
  for (int e = 0; e < envs; ++e) {
    CounterRng rng = CounterRng::for_env(3, static_cast<std::uint64_t>(e));
    Vec3 ba = Vec3::Zero(), bg = Vec3(0.1, -0.1, 0.0);
    for (int i = 0; i < steps; ++i) sample_imu(Vec3::Zero(), Vec3::Zero(), Mat3::Identity(), 1.0, 9.81, ba, bg, params, rng);
    for (int k = 0; k < 3; ++k) finals.push_back(bg[k] - (k == 0 ? 0.1 : k == 1 ? -0.1 : 0.0));
  }
  const Moments m = moments(finals);
  const double expected_var = steps * 0.01 * 0.01;
  EXPECT_NEAR(m.var, expected_var, 0.05 * expected_var);
  EXPECT_NEAR(m.mean, 0.0, 3.0 * std::sqrt(expected_var / finals.size()));
}

TEST(Imu, BiasEntersMeasurement) {
  ImuParams params;
  CounterRng rng;
  Vec3 ba(0.1, 0.2, 0.3), bg(-0.01, 0.02, -0.03);
  const ImuSample s = sample_imu(Vec3::Zero(), Vec3(1, 2, 3), Mat3::Identity(), 1.0, 9.81, ba, bg, params, rng);
  EXPECT_TRUE((s.accel - Vec3(0.1, 0.2, 9.81 + 0.3)).isZero(1e-15));
  EXPECT_TRUE((s.gyro - Vec3(0.99, 2.02, 2.97)).isZero(1e-15));
}

TEST(Imu, MountRotatesIntoSensorFrame) {
  ImuParams params;
  params = configure_mounting(params, rot_z(std::numbers::pi / 2.0));
  CounterRng rng;
  Vec3 ba = Vec3::Zero(), bg = Vec3::Zero();
  const ImuSample s = sample_imu(Vec3::Zero(), Vec3(1, 0, 0), Mat3::Identity(), 1.0, 9.81, ba, bg, params, rng);
  // body x seen from a sensor yawed +90 degrees lies along sensor -y
  EXPECT_TRUE((s.gyro - Vec3(0, -1, 0)).isZero(1e-15));
}

TEST(Imu, MountingValidationAndRandomization) {
  Mat3 skewed = Mat3::Identity();
  skewed(0, 1) = 0.1;
  EXPECT_THROW(configure_mounting(ImuParams{}, skewed), ValidationError);
  EXPECT_THROW(configure_mounting(ImuParams{}, Vec3(1, 1, -1).asDiagonal()), ValidationError);
  CounterRng rng = CounterRng::for_env(4, 0);
  const std::array<Range, 3> ranges = {Range{-0.1, 0.1}, Range{-0.1, 0.1}, Range{-0.1, 0.1}};
  const ImuParams p = configure_mounting(ImuParams{}, Mat3::Identity(), ranges, &rng);
  EXPECT_TRUE((p.mount.transpose() * p.mount - Mat3::Identity()).isZero(1e-12));
  EXPECT_FALSE(p.mount.isIdentity(1e-6));
  EXPECT_LE(rpy_from_rot(p.mount).cwiseAbs().maxCoeff(), 0.1 + 1e-12);
}

TEST(Imu, BatchUsesEnvStreams) {
  RobotConfig robot = make_quadrotor_config();
  robot.imu.sigma_accel = Vec3::Constant(0.05);
  robot.imu.sigma_gyro_bias = Vec3::Constant(0.001);
  StateStore batch = allocate(6, robot, StoreOptions{8});
  StateStore copy = batch;
  std::vector<Vec3> forces(6, Vec3(0.1, 0.2, 0.3));
  std::vector<ImuSample> out(6);
  sample_imu_batch(batch, forces, robot, out, 0, 6);
  for (std::size_t e = 0; e < 6; ++e) {
    const ImuSample s = sample_imu(forces[e], copy.angular_velocity(e), copy.rotation(e), robot.mass, robot.gravity,
                                   copy.accel_bias(e), copy.gyro_bias(e), robot.imu, copy.rng_streams[e]);
    EXPECT_EQ(s.accel, out[e].accel);
    EXPECT_EQ(s.gyro, out[e].gyro);
  }
  EXPECT_NE(out[0].accel, out[1].accel);
}
