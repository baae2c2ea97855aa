#include "aerialsim/errors.hpp"
#include "aerialsim/sensors.hpp"
#include "aerialsim/world_mesh.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <numbers>
#include <random>

using namespace aerialsim;

namespace {

std::vector<oracle::Triangle> world_triangles(const WorldMesh& w) {
  std::vector<oracle::Triangle> out;
  for (std::size_t f = 0; f < w.triangle_count(); ++f) out.push_back(w.triangle(static_cast<int>(f)));
  return out;
}

TriangleMesh random_soup(std::mt19937_64& g, int n, double extent) {
  std::uniform_real_distribution<double> c(-extent, extent), d(-0.8, 0.8);
  TriangleMesh m;
  for (int i = 0; i < n; ++i) {
    const Vec3 center(c(g), c(g), c(g));
    for (int k = 0; k < 3; ++k) m.vertices.push_back(center + Vec3(d(g), d(g), d(g)));
    m.faces.push_back({3 * i, 3 * i + 1, 3 * i + 2});
  }
  return m;
}

/// Camera at the origin looking along world +x (identity robot pose).
CameraModel forward_camera(int w, int h, double hfov = std::numbers::pi / 2.0) {
  CameraModel cam = CameraModel::from_fov(w, h, hfov, 0.05, 50.0);
  cam.pose_in_body = Pose{Vec3::Zero(), forward_camera_rotation()};
  return cam;
}

}  // namespace

TEST(Bvh, EveryTriangleReachableOnce) {
  std::mt19937_64 g(31);
  std::vector<TriangleMesh> meshes = {random_soup(g, 60, 5.0), random_soup(g, 37, 3.0)};
  const WorldMesh w = WorldMesh::build(meshes, std::vector<Transform>(2));
  std::vector<int> seen;
  std::function<void(int, const Aabb&)> walk = [&](int node, const Aabb& parent) {
    const BvhNode& n = w.nodes()[static_cast<std::size_t>(node)];
    EXPECT_TRUE((n.box.lo.array() >= parent.lo.array()).all() && (n.box.hi.array() <= parent.hi.array()).all());
    if (n.is_leaf()) {
      for (int f : w.leaf_faces(n)) {
        if (f < 0) continue;
        seen.push_back(f);
        for (const Vec3& v : w.triangle(f)) {
          EXPECT_TRUE((v.array() >= n.box.lo.array()).all() && (v.array() <= n.box.hi.array()).all());
        }
      }
      return;
    }
    walk(n.left, n.box);
    walk(n.right, n.box);
  };
  walk(0, w.bounds());
  std::sort(seen.begin(), seen.end());
  std::vector<int> all(97);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(seen, all);
}

TEST(Bvh, CastMatchesBruteForce) {
  std::mt19937_64 g(32);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TriangleMesh> meshes = {random_soup(g, 50, 4.0)};
  const WorldMesh w = WorldMesh::build(meshes, std::vector<Transform>(1));
  const auto tris = world_triangles(w);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 o = 6.0 * Vec3(u(g), u(g), u(g));
    const Vec3 d = (Vec3(u(g), u(g), u(g)) * 3.0 - o).normalized();
    const RayHit got = w.cast(o, d, 0.0, 100.0);
    const oracle::Hit expect = oracle::brute_force_cast(tris, o, d, 0.0, 100.0);
    ASSERT_EQ(got.hit, expect.hit) << "ray " << i;
    if (!got.hit) continue;
    ++hits;
    EXPECT_EQ(got.face_index, expect.face) << "ray " << i;
    EXPECT_NEAR(got.t, expect.t, 1e-9);
    EXPECT_LT(got.normal.dot(d), 0.0);
    EXPECT_EQ(w.occluded(o, d, 0.0, 100.0), true);
  }
  EXPECT_GT(hits, 100);
}

TEST(Bvh, EqualDistanceResolvesToLowestFace) {
  // Two coincident triangles; the ray hits both at the same t.
  TriangleMesh a;
  a.vertices = {Vec3(1, -1, -1), Vec3(1, 1, -1), Vec3(1, 0, 1)};
  a.faces = {{0, 1, 2}};
  const WorldMesh w = WorldMesh::build(std::vector<TriangleMesh>{a, a}, std::vector<Transform>(2));
  const RayHit h = w.cast(Vec3::Zero(), Vec3::UnitX(), 0.0, 10.0);
  ASSERT_TRUE(h.hit);
  EXPECT_EQ(h.face_index, 0);
}

TEST(Bvh, UpdateEqualsFreshBuild) {
  std::mt19937_64 g(33);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TriangleMesh> meshes = {random_soup(g, 20, 2.0), make_box_mesh(Vec3::Constant(-0.5), Vec3::Constant(0.5))};
  WorldMesh w = WorldMesh::build(meshes, std::vector<Transform>(2));
  const std::vector<Transform> moved = {Transform{Vec3(1, 2, 0), rot_z(0.4), 1.5},
                                        Transform{Vec3(-2, 0, 1), rot_from_rpy(0.1, 0.2, 0.3), 0.7}};
  w.update_transforms(moved);
  const WorldMesh fresh = WorldMesh::build(meshes, moved);
  for (int i = 0; i < 500; ++i) {
    const Vec3 o = 5.0 * Vec3(u(g), u(g), u(g));
    const Vec3 d = (-o + Vec3(u(g), u(g), u(g))).normalized();
    const RayHit a = w.cast(o, d, 0.0, 50.0), b = fresh.cast(o, d, 0.0, 50.0);
    ASSERT_EQ(a.hit, b.hit);
    EXPECT_EQ(a.face_index, b.face_index);
    EXPECT_EQ(a.t, b.t);
  }
}

TEST(Bvh, EmptyWorld) {
  const WorldMesh w = WorldMesh::build(std::vector<TriangleMesh>{}, std::vector<Transform>{});
  EXPECT_TRUE(w.empty());
  EXPECT_FALSE(w.cast(Vec3::Zero(), Vec3::UnitX(), 0.0, 10.0).hit);
  EXPECT_TRUE(std::isinf(w.closest_distance(Vec3::Zero())));
}

TEST(Camera, RangeDepthLaw) {
  const WorldMesh w = testing_support::boxes_world({{Vec3(3.0, -20, -20), Vec3(3.5, 20, 20)}});
  const CameraModel cam = forward_camera(65, 49);
  const SensorImage img = render_camera(w, cam, Pose{});
  ASSERT_EQ(img.valid_count(), img.pixel_count());
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const std::size_t i = img.index(u, v);
      const double x = (u - cam.cx) / cam.fx, y = (v - cam.cy) / cam.fy;
      EXPECT_NEAR(img.range[i], img.depth[i] * std::sqrt(1.0 + x * x + y * y), 1e-6);
      EXPECT_NEAR(img.depth[i], 3.0, 1e-9);  // fronto-parallel wall
    }
  }
  const CameraModel even = forward_camera(64, 48);
  const SensorImage centered = render_camera(w, even, Pose{});
  const std::size_t c = centered.index(32, 24);
  EXPECT_EQ(centered.range[c], centered.depth[c]);
}

TEST(Camera, SegmentationFollowsOwningSubmesh) {
  std::vector<TriangleMesh> meshes = {make_box_mesh(Vec3(4, -3, -1), Vec3(5, -0.2, 1), 3),
                                      make_box_mesh(Vec3(3, 0.3, -2), Vec3(3.5, 2, 0.5), 7)};
  const WorldMesh w = WorldMesh::build(meshes, std::vector<Transform>(2));
  const SensorImage img = render_camera(w, forward_camera(48, 32), Pose{});
  std::size_t three = 0, seven = 0;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (!img.valid[i]) {
      EXPECT_EQ(img.segmentation[i], kInvalidId);
      EXPECT_EQ(img.face_index[i], kInvalidId);
      EXPECT_EQ(img.depth[i], kInvalidDistance);
      continue;
    }
    const int owner = meshes[static_cast<std::size_t>(w.submesh_of(img.face_index[i]))].segmentation_id;
    EXPECT_EQ(img.segmentation[i], owner);
    three += owner == 3;
    seven += owner == 7;
  }
  EXPECT_GT(three, 0u);
  EXPECT_GT(seven, 0u);
}

TEST(Camera, CubeFootprintMatchesSlabTest) {
  const Vec3 lo(2.9, -0.43, -0.37), hi(3.7, 0.51, 0.44);
  const WorldMesh w = testing_support::boxes_world({{lo, hi}});
  const CameraModel cam = forward_camera(40, 30);
  const SensorImage img = render_camera(w, cam, Pose{});
  const Mat3 Rc = cam.pose_in_body.rotation;
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const Vec3 d = Rc * Vec3((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0).normalized();
      const auto slab = oracle::ray_box(Vec3::Zero(), d, lo, hi);
      const bool inside = slab && slab->second >= 0.0;
      EXPECT_EQ(img.valid[img.index(u, v)] != 0, inside) << u << "," << v;
      if (inside) {
        EXPECT_NEAR(img.range[img.index(u, v)], slab->first, 1e-9);
      }
    }
  }
}

TEST(Camera, RobotPoseMovesTheView) {
  const WorldMesh w = testing_support::boxes_world({{Vec3(-0.5, 2.5, -0.5), Vec3(0.5, 3.5, 0.5)}});
  const CameraModel cam = forward_camera(16, 12);
  EXPECT_EQ(render_camera(w, cam, Pose{}).valid_count(), 0u);
  const SensorImage turned = render_camera(w, cam, Pose{Vec3::Zero(), rot_z(std::numbers::pi / 2.0)});
  EXPECT_GT(turned.valid_count(), 0u);
  EXPECT_NEAR(turned.depth[turned.index(8, 6)], 2.5, 1e-9);
}

TEST(Lidar, CylinderRing) {
  const int n = 360;
  const double R = 2.5;
  TriangleMesh cyl;
  for (int i = 0; i < n; ++i) {
    const double a = -std::numbers::pi + 2.0 * std::numbers::pi * i / n;
    cyl.vertices.push_back(Vec3(R * std::cos(a), R * std::sin(a), -1.0));
    cyl.vertices.push_back(Vec3(R * std::cos(a), R * std::sin(a), 1.0));
  }
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    cyl.faces.push_back({2 * i, 2 * j, 2 * j + 1});
    cyl.faces.push_back({2 * i, 2 * j + 1, 2 * i + 1});
  }
  const WorldMesh w = WorldMesh::build(std::vector<TriangleMesh>{cyl}, std::vector<Transform>(1));
  const LidarPattern p = LidarPattern::uniform(n, -std::numbers::pi, std::numbers::pi, 1, 0.0, 0.0, 0.1, 10.0);
  const SensorImage img = render_lidar(w, p, Pose{});
  ASSERT_EQ(img.valid_count(), static_cast<std::size_t>(n));
  EXPECT_FALSE(img.has_depth);
  // the ring is an inscribed polygon: range to chord i is R cos(pi/n) / cos(az - mid_i)
  const double step = 2.0 * std::numbers::pi / n;
  for (int c = 0; c < n; ++c) {
    const double az = p.azimuths[static_cast<std::size_t>(c)];
    const double k = std::floor((az + std::numbers::pi) / step);
    const double mid = -std::numbers::pi + (k + 0.5) * step;
    EXPECT_NEAR(img.range[img.index(c, 0)], R * std::cos(step / 2.0) / std::cos(az - mid), 1e-9) << c;
    EXPECT_NEAR(img.range[img.index(c, 0)], R, R * (1.0 - std::cos(step / 2.0)) + 1e-12);
  }
}

TEST(Lidar, DomeUnderCeiling) {
  const double h = 3.0;
  TriangleMesh ceiling;
  ceiling.vertices = {Vec3(-1e3, -1e3, h), Vec3(1e3, -1e3, h), Vec3(1e3, 1e3, h), Vec3(-1e3, 1e3, h)};
  ceiling.faces = {{0, 1, 2}, {0, 2, 3}};
  const WorldMesh w = WorldMesh::build(std::vector<TriangleMesh>{ceiling}, std::vector<Transform>(1));
  const LidarPattern p =
      LidarPattern::uniform(24, -std::numbers::pi, std::numbers::pi, 10, 0.1, std::numbers::pi / 2.0, 0.1, 100.0);
  const SensorImage img = render_lidar(w, p, Pose{});
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      EXPECT_NEAR(img.range[img.index(c, r)], h / std::sin(p.elevations[static_cast<std::size_t>(r)]), 1e-9);
    }
  }
}

TEST(Annotations, LinearFieldIsReproduced) {
  TriangleMesh box = make_box_mesh(Vec3(2, -1, -1), Vec3(3, 1, 1), 1);
  for (const Vec3& v : box.vertices) box.vertex_annotations.push_back((VecX(2) << v.x(), 2.0 * v.y()).finished());
  const WorldMesh w = WorldMesh::build(std::vector<TriangleMesh>{box}, std::vector<Transform>(1));
  const SensorImage img = render_camera(w, forward_camera(20, 20), Pose{});
  std::size_t checked = 0;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (!img.valid[i]) continue;
    const VecX a = query_annotation(w, img.face_index[i], img.bary[2 * i], img.bary[2 * i + 1]);
    EXPECT_NEAR(a[0], img.point[i].x(), 1e-6);
    EXPECT_NEAR(a[1], 2.0 * img.point[i].y(), 1e-6);
    ++checked;
  }
  EXPECT_GT(checked, 0u);
  const WorldMesh bare = testing_support::boxes_world({{Vec3(2, -1, -1), Vec3(3, 1, 1)}});
  EXPECT_THROW(query_annotation(bare, 0, 0.3, 0.3), MissingAnnotationError);
  EXPECT_THROW(query_annotation(w, 99, 0.3, 0.3), IndexError);
}

namespace {

// Wall at x = 6 filling the view, thin post in front of it.
const Vec3 kPostLo(2.0, -0.0437, -3.0), kPostHi(2.13, 0.0613, 3.0);
const Vec3 kWallLo(6.0, -40.0, -40.0), kWallHi(6.5, 40.0, 40.0);

std::size_t shadowed(double baseline, std::vector<std::uint8_t>* mask_out = nullptr) {
  const WorldMesh w = testing_support::boxes_world({{kPostLo, kPostHi}, {kWallLo, kWallHi}});
  const CameraModel cam = forward_camera(80, 20);
  const SensorImage img = render_camera(w, cam, Pose{});
  const auto mask = stereo_shadow_mask(img, w, sensor_pose(Pose{}, cam.pose_in_body), baseline);
  if (mask_out) *mask_out = mask;
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) n += img.valid[i] && !mask[i];
  return n;
}

}  // namespace

TEST(StereoShadow, ZeroBaselineInvalidatesNothing) {
  EXPECT_EQ(shadowed(0.0), 0u);
}

TEST(StereoShadow, BandGrowsWithBaseline) {
  // the band on the wall is about baseline * 1.8 wide; one pixel spans ~1.1 degrees
  const std::size_t a = shadowed(0.1), b = shadowed(0.2), c = shadowed(0.8);
  EXPECT_GT(a, 0u);
  EXPECT_GT(b, a);
  EXPECT_GT(c, b);
}

TEST(StereoShadow, MatchesGeometricOcclusion) {
  std::vector<std::uint8_t> mask;
  const double baseline = 0.08;
  shadowed(baseline, &mask);
  const CameraModel cam = forward_camera(80, 20);
  const Mat3 Rc = cam.pose_in_body.rotation;
  const Vec3 right = baseline * Rc.col(0);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const Vec3 d = Rc * Vec3((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0).normalized();
      const auto post = oracle::ray_box(Vec3::Zero(), d, kPostLo, kPostHi);
      const auto wall = oracle::ray_box(Vec3::Zero(), d, kWallLo, kWallHi);
      const bool on_post = post && post->first > 0.0 && (!wall || post->first < wall->first);
      bool visible = true;
      if (!on_post && wall) {
        const Vec3 p = wall->first * d;
        const Vec3 to = right - p;
        const double dist = to.norm();
        const auto block = oracle::ray_box(p, to / dist, kPostLo, kPostHi);
        visible = !(block && block->first < dist - kShadowEpsilon && block->second > kShadowEpsilon);
      }
      EXPECT_EQ(mask[static_cast<std::size_t>(v * cam.width + u)] != 0, visible) << u << "," << v;
    }
  }
}

TEST(StereoShadow, ApplyMaskWritesSentinels) {
  const WorldMesh w = testing_support::boxes_world({{kWallLo, kWallHi}});
  SensorImage img = render_camera(w, forward_camera(8, 6), Pose{});
  std::vector<std::uint8_t> mask(img.pixel_count(), 1);
  mask[5] = 0;
  apply_validity_mask(img, mask);
  EXPECT_EQ(img.valid[5], 0);
  EXPECT_EQ(img.depth[5], kInvalidDistance);
  EXPECT_EQ(img.range[5], kInvalidDistance);
  EXPECT_EQ(img.segmentation[5], kInvalidId);
  EXPECT_EQ(img.face_index[5], kInvalidId);
  EXPECT_EQ(img.valid_count(), img.pixel_count() - 1);
}
