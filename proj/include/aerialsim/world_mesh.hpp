#pragma once

// Per-environment triangle world: base sub-meshes, their current transforms,
// the transformed vertex cache and a binary BVH over all triangles.
//
// Face indices are global: sub-mesh j's faces follow those of sub-meshes
// 0..j-1 in order.

#include "aerialsim/math.hpp"
#include "aerialsim/mesh.hpp"
#include "aerialsim/simd/kernels.hpp"

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace aerialsim {

/// x -> translation + scale * rotation * x
struct Transform {
  Vec3 translation = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  double scale = 1.0;

  Vec3 apply(const Vec3& x) const { return translation + scale * (rotation * x); }
  static Transform translate(const Vec3& t) { return Transform{t, Mat3::Identity(), 1.0}; }
};

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void grow(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void grow(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool empty() const { return (lo.array() > hi.array()).any(); }
};

struct RayHit {
  bool hit = false;
  double t = -1.0;
  int face_index = -1;
  /// Weights of the face's first two vertices; the third is 1 - w0 - w1.
  double w0 = 0.0;
  double w1 = 0.0;
  Vec3 normal = Vec3::Zero();
  int segmentation_id = -1;
};

struct BvhNode {
  Aabb box;
  /// Internal: children at left/right. Leaf: left == -1 and right indexes blocks_.
  int left = -1;
  int right = -1;
  int count = 0;  // triangles in a leaf
  bool is_leaf() const { return left < 0; }
};

class WorldMesh {
 public:
  static constexpr int kLeafSize = 4;

  WorldMesh() = default;

  /// Takes shared ownership of the base meshes; transforms.size() must equal meshes.size().
  static WorldMesh build(std::vector<std::shared_ptr<const TriangleMesh>> meshes, std::vector<Transform> transforms,
                         int env_id = 0);
  static WorldMesh build(const std::vector<TriangleMesh>& meshes, const std::vector<Transform>& transforms,
                         int env_id = 0);

  /// Re-transforms every sub-mesh whose transform changed and rebuilds the BVH.
  void update_transforms(std::span<const Transform> transforms);

  int env_id() const { return env_id_; }
  bool empty() const { return triangle_count() == 0; }
  bool dirty() const { return dirty_; }
  std::size_t submesh_count() const { return meshes_.size(); }
  std::size_t triangle_count() const { return tri_submesh_.size(); }
  const TriangleMesh& submesh(std::size_t j) const { return *meshes_[j]; }
  const Transform& transform(std::size_t j) const { return transforms_[j]; }
  std::span<const Vec3> transformed_vertices(std::size_t j) const { return vertex_cache_[j]; }

  /// Transformed corners of a global face.
  std::array<Vec3, 3> triangle(int face) const;
  int submesh_of(int face) const { return tri_submesh_[static_cast<std::size_t>(face)]; }
  int local_face(int face) const { return tri_local_[static_cast<std::size_t>(face)]; }
  int segmentation_of(int face) const { return meshes_[static_cast<std::size_t>(submesh_of(face))]->segmentation_id; }

  const std::vector<BvhNode>& nodes() const { return nodes_; }
  std::span<const int> leaf_faces(const BvhNode& leaf) const;
  Aabb bounds() const { return nodes_.empty() ? Aabb{} : nodes_.front().box; }

  /// Nearest hit with t in [t_min, t_max]; equal t resolves to the lowest face index.
  RayHit cast(const Vec3& origin, const Vec3& direction, double t_min, double t_max) const;
  void cast_rays(std::span<const Vec3> origins, std::span<const Vec3> directions, double t_min, double t_max,
                 std::span<RayHit> out) const;

  /// True if anything is hit with t in [t_min, t_max].
  bool occluded(const Vec3& origin, const Vec3& direction, double t_min, double t_max) const;

  /// Distance from p to the nearest triangle (infinity for an empty world).
  double closest_distance(const Vec3& p) const;

  /// Barycentric interpolation of the owning sub-mesh's vertex annotations:
  /// w0 A(v0) + w1 A(v1) + (1 - w0 - w1) A(v2).
  VecX query_annotation(int face_index, double w0, double w1) const;

 private:
  void refresh_cache(std::size_t j);
  void rebuild_bvh();
  int build_node(std::vector<int>& order, std::size_t begin, std::size_t end, const std::vector<Vec3>& centroids);

  int env_id_ = 0;
  bool dirty_ = true;
  std::vector<std::shared_ptr<const TriangleMesh>> meshes_;
  std::vector<Transform> transforms_;
  std::vector<std::vector<Vec3>> vertex_cache_;
  std::vector<int> face_offset_;  // first global face of each sub-mesh
  std::vector<int> tri_submesh_;
  std::vector<int> tri_local_;
  std::vector<BvhNode> nodes_;
  std::vector<simd::TriangleBlock4> blocks_;
  std::vector<int> leaf_face_list_;  // kLeafSize entries per block, -1 padded
};

/// Geometric face normal of a triangle, flipped to face against `direction`.
Vec3 facing_normal(const std::array<Vec3, 3>& tri, const Vec3& direction);

}  // namespace aerialsim
