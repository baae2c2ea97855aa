#pragma once

// Obstacle scenes described by an EnvironmentConfig: one shared base mesh per
// obstacle slot and per-env randomized transforms.

#include "aerialsim/config.hpp"
#include "aerialsim/mesh.hpp"
#include "aerialsim/rng.hpp"
#include "aerialsim/world_mesh.hpp"

#include <memory>
#include <vector>

namespace aerialsim {

/// obstacle_count meshes; slot i uses asset i mod #assets (a unit cube when
/// no asset is listed) with segmentation id i + 1.
std::vector<std::shared_ptr<const TriangleMesh>> load_obstacle_meshes(const EnvironmentConfig& env);

/// Per obstacle draws x, y, z, roll, pitch, yaw, then scale from `rng`.
std::vector<Transform> sample_obstacle_transforms(const EnvironmentConfig& env, std::size_t count, CounterRng& rng);

/// Scene used by the render benchmark and the CLI when no environment file
/// is given: 20 cubes scattered in front of a robot at the origin facing +x.
EnvironmentConfig default_obstacle_scene();

}  // namespace aerialsim
