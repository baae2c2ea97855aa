#pragma once

// Small fixtures shared by the unit tests.

#include "aerialsim/config.hpp"
#include "aerialsim/mesh.hpp"
#include "aerialsim/world_mesh.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

inline std::filesystem::path source_dir() { return AERIALSIM_SOURCE_DIR; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("aerialsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Uniform vector in [-s, s]^3.
inline aerialsim::Vec3 random_vec(std::mt19937_64& g, double s) {
  std::uniform_real_distribution<double> u(-s, s);
  return aerialsim::Vec3(u(g), u(g), u(g));
}

/// One sub-mesh per box, segmentation ids 1, 2, ...
inline aerialsim::WorldMesh boxes_world(const std::vector<std::pair<aerialsim::Vec3, aerialsim::Vec3>>& boxes) {
  std::vector<aerialsim::TriangleMesh> meshes;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    meshes.push_back(aerialsim::make_box_mesh(boxes[i].first, boxes[i].second, static_cast<int>(i + 1)));
  return aerialsim::WorldMesh::build(meshes, std::vector<aerialsim::Transform>(meshes.size()));
}

}  // namespace testing_support
