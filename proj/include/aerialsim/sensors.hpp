#pragma once

// Ray-cast sensor models over a WorldMesh: pinhole depth camera, scanning
// LiDAR, stereo-shadow invalidation and annotation lookup.

#include "aerialsim/math.hpp"
#include "aerialsim/sensor_types.hpp"
#include "aerialsim/world_mesh.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace aerialsim {

inline constexpr double kInvalidDistance = -1.0;
inline constexpr int kInvalidId = -1;

/// Row-major multi-channel image; pixel (u, v) lives at index v * width + u.
/// Invalid pixels carry -1.0 in depth/range and -1 in the id channels.
struct SensorImage {
  int width = 0;
  int height = 0;
  bool has_depth = true;  // false for LiDAR (range only)
  std::vector<double> depth;
  std::vector<double> range;
  std::vector<int> segmentation;
  std::vector<int> face_index;
  std::vector<Vec3> normal;
  std::vector<Vec3> point;   // world-frame hit point
  std::vector<double> bary;  // (w0, w1) pairs
  std::vector<std::uint8_t> valid;

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u); }
  std::size_t valid_count() const;

  void resize(int w, int h, bool with_depth);
};

/// Unit ray direction of pixel (u, v) in the camera frame; ray through
/// ((u - cx) / fx, (v - cy) / fy, 1).
Vec3 pixel_direction(const CameraModel& cam, int u, int v);

/// World pose of a sensor mounted at `mount` on a robot at `robot_pose`.
inline Pose sensor_pose(const Pose& robot_pose, const Pose& mount) { return robot_pose.compose(mount); }

/// range = t, depth = t * (camera-frame z of the unit ray).
SensorImage render_camera(const WorldMesh& world, const CameraModel& cam, const Pose& robot_pose);

/// One ray per (elevation row, azimuth column); range channel only.
SensorImage render_lidar(const WorldMesh& world, const LidarPattern& pattern, const Pose& robot_pose);

/// Self-hit guard for stereo-shadow rays (m).
inline constexpr double kShadowEpsilon = 1e-4;

/// For each valid pixel of an image rendered from the left sensor, casts from
/// the hit point toward the right sensor origin (left origin + baseline along
/// the sensor x axis). Pixels whose segment is blocked for t in
/// (eps, dist - eps) come back 0; everything else keeps its validity.
std::vector<std::uint8_t> stereo_shadow_mask(const SensorImage& image, const WorldMesh& world,
                                             const Pose& left_sensor_pose, double baseline);

/// Clears validity where mask == 0 and writes the sentinels into every channel.
void apply_validity_mask(SensorImage& image, std::span<const std::uint8_t> mask);

VecX query_annotation(const WorldMesh& world, int face_index, double w0, double w1);

}  // namespace aerialsim
