#include "aerialsim/scene.hpp"

#include <numbers>

namespace aerialsim {

std::vector<std::shared_ptr<const TriangleMesh>> load_obstacle_meshes(const EnvironmentConfig& env) {
  std::vector<TriangleMesh> assets;
  for (std::size_t i = 0; i < env.obstacle_assets.size(); ++i) assets.push_back(load_mesh(env.asset_path(i)));
  if (assets.empty()) assets.push_back(make_box_mesh(Vec3::Constant(-0.5), Vec3::Constant(0.5)));
  std::vector<std::shared_ptr<const TriangleMesh>> out;
  for (int i = 0; i < env.obstacle_count; ++i) {
    TriangleMesh m = assets[static_cast<std::size_t>(i) % assets.size()];
    m.segmentation_id = i + 1;
    out.push_back(std::make_shared<const TriangleMesh>(std::move(m)));
  }
  return out;
}

std::vector<Transform> sample_obstacle_transforms(const EnvironmentConfig& env, std::size_t count, CounterRng& rng) {
  std::vector<Transform> out(count);
  for (auto& t : out) {
    double pose[6];
    for (std::size_t k = 0; k < 6; ++k) {
      pose[k] = sample_uniform(rng, env.pose_randomization[k].lo, env.pose_randomization[k].hi);
    }
    t.translation = Vec3(pose[0], pose[1], pose[2]);
    t.rotation = rot_from_rpy(pose[3], pose[4], pose[5]);
    t.scale = sample_uniform(rng, env.scale_randomization.lo, env.scale_randomization.hi);
  }
  return out;
}

EnvironmentConfig default_obstacle_scene() {
  EnvironmentConfig env;
  env.bounds_min = Vec3(-2.0, -6.0, 0.0);
  env.bounds_max = Vec3(12.0, 6.0, 6.0);
  env.obstacle_count = 20;
  env.pose_randomization = {Range{2.0, 10.0}, Range{-4.0, 4.0}, Range{0.5, 4.5},
                            Range{0.0, 0.0}, Range{0.0, 0.0}, Range{-std::numbers::pi, std::numbers::pi}};
  env.scale_randomization = Range{0.5, 1.5};
  return env;
}

}  // namespace aerialsim
