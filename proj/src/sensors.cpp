#include "aerialsim/sensors.hpp"

#include <algorithm>
#include <cmath>

namespace aerialsim {

namespace {

void write_hit(SensorImage& img, std::size_t i, const RayHit& hit, const Vec3& origin, const Vec3& dir,
               double depth_scale) {
  if (!hit.hit) return;
  img.valid[i] = 1;
  img.range[i] = hit.t;
  if (img.has_depth) img.depth[i] = hit.t * depth_scale;
  img.segmentation[i] = hit.segmentation_id;
  img.face_index[i] = hit.face_index;
  img.normal[i] = hit.normal;
  img.point[i] = origin + hit.t * dir;
  img.bary[2 * i] = hit.w0;
  img.bary[2 * i + 1] = hit.w1;
}

}  // namespace

void SensorImage::resize(int w, int h, bool with_depth) {
  width = w;
  height = h;
  has_depth = with_depth;
  const std::size_t n = pixel_count();
  depth.assign(with_depth ? n : 0, kInvalidDistance);
  range.assign(n, kInvalidDistance);
  segmentation.assign(n, kInvalidId);
  face_index.assign(n, kInvalidId);
  normal.assign(n, Vec3::Zero());
  point.assign(n, Vec3::Zero());
  bary.assign(2 * n, 0.0);
  valid.assign(n, 0);
}

std::size_t SensorImage::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

Vec3 pixel_direction(const CameraModel& cam, int u, int v) {
  return Vec3((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0).normalized();
}

SensorImage render_camera(const WorldMesh& world, const CameraModel& cam, const Pose& robot_pose) {
  SensorImage img;
  img.resize(cam.width, cam.height, true);
  const Pose pose = sensor_pose(robot_pose, cam.pose_in_body);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const Vec3 d_cam = pixel_direction(cam, u, v);
      const Vec3 d = pose.rotation * d_cam;
      const RayHit hit = world.cast(pose.position, d, cam.t_min, cam.t_max);
      write_hit(img, img.index(u, v), hit, pose.position, d, d_cam.z());
    }
  }
  return img;
}

SensorImage render_lidar(const WorldMesh& world, const LidarPattern& pattern, const Pose& robot_pose) {
  SensorImage img;
  img.resize(static_cast<int>(pattern.azimuths.size()), static_cast<int>(pattern.elevations.size()), false);
  const Pose pose = sensor_pose(robot_pose, pattern.pose_in_body);
  for (int row = 0; row < img.height; ++row) {
    const double e = pattern.elevations[static_cast<std::size_t>(row)];
    for (int col = 0; col < img.width; ++col) {
      const double a = pattern.azimuths[static_cast<std::size_t>(col)];
      const Vec3 d_sensor(std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e));
      const Vec3 d = pose.rotation * d_sensor;
      const RayHit hit = world.cast(pose.position, d, pattern.t_min, pattern.t_max);
      write_hit(img, img.index(col, row), hit, pose.position, d, 1.0);
    }
  }
  return img;
}

std::vector<std::uint8_t> stereo_shadow_mask(const SensorImage& image, const WorldMesh& world,
                                             const Pose& left_sensor_pose, double baseline) {
  std::vector<std::uint8_t> mask = image.valid;
  if (baseline == 0.0) return mask;
  const Vec3 right_origin = left_sensor_pose.position + baseline * left_sensor_pose.rotation.col(0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const Vec3 to_right = right_origin - image.point[i];
    const double dist = to_right.norm();
    if (dist <= 2.0 * kShadowEpsilon) continue;
    if (world.occluded(image.point[i], to_right / dist, kShadowEpsilon, dist - kShadowEpsilon)) mask[i] = 0;
  }
  return mask;
}

void apply_validity_mask(SensorImage& image, std::span<const std::uint8_t> mask) {
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (mask[i]) continue;
    image.valid[i] = 0;
    if (image.has_depth) image.depth[i] = kInvalidDistance;
    image.range[i] = kInvalidDistance;
    image.segmentation[i] = kInvalidId;
    image.face_index[i] = kInvalidId;
    image.normal[i].setZero();
    image.point[i].setZero();
    image.bary[2 * i] = 0.0;
    image.bary[2 * i + 1] = 0.0;
  }
}

VecX query_annotation(const WorldMesh& world, int face_index, double w0, double w1) {
  return world.query_annotation(face_index, w0, w1);
}

}  // namespace aerialsim
