#include "aerialsim/world_mesh.hpp"

#include "aerialsim/errors.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <string>

namespace aerialsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Slab test; returns false if the ray misses the box inside [t_lo, t_hi].
bool slab(const Aabb& box, const Vec3& o, const Vec3& d, const Vec3& inv, double t_lo, double t_hi,
          double& t_near) {
  double tn = t_lo;
  double tf = t_hi;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < box.lo[a] || o[a] > box.hi[a]) return false;
      continue;
    }
    double t1 = (box.lo[a] - o[a]) * inv[a];
    double t2 = (box.hi[a] - o[a]) * inv[a];
    if (t1 > t2) std::swap(t1, t2);
    tn = std::max(tn, t1);
    tf = std::min(tf, t2);
    if (tn > tf) return false;
  }
  t_near = tn;
  return true;
}

double box_distance_sq(const Aabb& box, const Vec3& p) {
  const Vec3 q = p.cwiseMax(box.lo).cwiseMin(box.hi);
  return (q - p).squaredNorm();
}

/// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

Vec3 facing_normal(const std::array<Vec3, 3>& tri, const Vec3& direction) {
  Vec3 n = (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized();
  if (n.dot(direction) > 0.0) n = -n;
  return n;
}

WorldMesh WorldMesh::build(std::vector<std::shared_ptr<const TriangleMesh>> meshes, std::vector<Transform> transforms,
                           int env_id) {
  if (transforms.size() != meshes.size()) throw ValidationError("transforms", "count must equal sub-mesh count");
  WorldMesh w;
  w.env_id_ = env_id;
  w.meshes_ = std::move(meshes);
  w.transforms_ = std::move(transforms);
  w.vertex_cache_.resize(w.meshes_.size());
  int offset = 0;
  for (std::size_t j = 0; j < w.meshes_.size(); ++j) {
    validate(*w.meshes_[j]);
    w.face_offset_.push_back(offset);
    const auto nf = static_cast<int>(w.meshes_[j]->faces.size());
    for (int f = 0; f < nf; ++f) {
      w.tri_submesh_.push_back(static_cast<int>(j));
      w.tri_local_.push_back(f);
    }
    offset += nf;
    w.refresh_cache(j);
  }
  w.rebuild_bvh();
  return w;
}

WorldMesh WorldMesh::build(const std::vector<TriangleMesh>& meshes, const std::vector<Transform>& transforms,
                           int env_id) {
  std::vector<std::shared_ptr<const TriangleMesh>> shared;
  shared.reserve(meshes.size());
  for (const auto& m : meshes) shared.push_back(std::make_shared<const TriangleMesh>(m));
  return build(std::move(shared), transforms, env_id);
}

void WorldMesh::refresh_cache(std::size_t j) {
  const auto& base = meshes_[j]->vertices;
  auto& cache = vertex_cache_[j];
  cache.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) cache[i] = transforms_[j].apply(base[i]);
}

void WorldMesh::update_transforms(std::span<const Transform> transforms) {
  if (transforms.size() != meshes_.size()) throw ValidationError("transforms", "count must equal sub-mesh count");
  dirty_ = true;
  for (std::size_t j = 0; j < transforms.size(); ++j) {
    const Transform& t = transforms[j];
    const Transform& old = transforms_[j];
    if (t.translation == old.translation && t.rotation == old.rotation && t.scale == old.scale) continue;
    transforms_[j] = t;
    refresh_cache(j);
  }
  rebuild_bvh();
}

std::array<Vec3, 3> WorldMesh::triangle(int face) const {
  const auto j = static_cast<std::size_t>(tri_submesh_[static_cast<std::size_t>(face)]);
  const auto& f = meshes_[j]->faces[static_cast<std::size_t>(tri_local_[static_cast<std::size_t>(face)])];
  const auto& cache = vertex_cache_[j];
  return {cache[static_cast<std::size_t>(f[0])], cache[static_cast<std::size_t>(f[1])],
          cache[static_cast<std::size_t>(f[2])]};
}

std::span<const int> WorldMesh::leaf_faces(const BvhNode& leaf) const {
  return {leaf_face_list_.data() + static_cast<std::size_t>(leaf.right) * kLeafSize,
          static_cast<std::size_t>(leaf.count)};
}

void WorldMesh::rebuild_bvh() {
  nodes_.clear();
  blocks_.clear();
  leaf_face_list_.clear();
  const std::size_t n = triangle_count();
  if (n > 0) {
    std::vector<Vec3> centroids(n);
    for (std::size_t f = 0; f < n; ++f) {
      const auto tri = triangle(static_cast<int>(f));
      centroids[f] = (tri[0] + tri[1] + tri[2]) / 3.0;
    }
    std::vector<int> order(n);
    for (std::size_t f = 0; f < n; ++f) order[f] = static_cast<int>(f);
    nodes_.reserve(2 * n / kLeafSize + 1);
    build_node(order, 0, n, centroids);
  }
  dirty_ = false;
}

int WorldMesh::build_node(std::vector<int>& order, std::size_t begin, std::size_t end,
                          const std::vector<Vec3>& centroids) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();

  Aabb box;
  Aabb centroid_box;
  for (std::size_t i = begin; i < end; ++i) {
    for (const Vec3& v : triangle(order[i])) box.grow(v);
    centroid_box.grow(centroids[static_cast<std::size_t>(order[i])]);
  }
  // Pad so rounding in the triangle test can never land a hit outside its box.
  const double pad = 1e-9 * (1.0 + std::max(box.lo.cwiseAbs().maxCoeff(), box.hi.cwiseAbs().maxCoeff()));
  box.lo.array() -= pad;
  box.hi.array() += pad;
  nodes_[static_cast<std::size_t>(index)].box = box;

  const std::size_t count = end - begin;
  if (count <= static_cast<std::size_t>(kLeafSize)) {
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end));
    simd::TriangleBlock4 block{};
    for (int k = 0; k < kLeafSize; ++k) {
      block.face[k] = -1;
      int face = -1;
      if (static_cast<std::size_t>(k) < count) {
        face = order[begin + static_cast<std::size_t>(k)];
        const auto tri = triangle(face);
        const Vec3 e1 = tri[1] - tri[0];
        const Vec3 e2 = tri[2] - tri[0];
        block.v0x[k] = tri[0].x(); block.v0y[k] = tri[0].y(); block.v0z[k] = tri[0].z();
        block.e1x[k] = e1.x(); block.e1y[k] = e1.y(); block.e1z[k] = e1.z();
        block.e2x[k] = e2.x(); block.e2y[k] = e2.y(); block.e2z[k] = e2.z();
        block.face[k] = face;
      }
      leaf_face_list_.push_back(face);
    }
    blocks_.push_back(block);
    BvhNode& leaf = nodes_[static_cast<std::size_t>(index)];
    leaf.left = -1;
    leaf.right = static_cast<int>(blocks_.size()) - 1;
    leaf.count = static_cast<int>(count);
    return index;
  }

  const Vec3 extent = centroid_box.hi - centroid_box.lo;
  int axis = 0;
  if (extent.y() > extent[axis]) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;
  const std::size_t mid = begin + count / 2;
  std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(mid),
                   order.begin() + static_cast<std::ptrdiff_t>(end), [&](int a, int b) {
                     const double ca = centroids[static_cast<std::size_t>(a)][axis];
                     const double cb = centroids[static_cast<std::size_t>(b)][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const int left = build_node(order, begin, mid, centroids);
  const int right = build_node(order, mid, end, centroids);
  nodes_[static_cast<std::size_t>(index)].left = left;
  nodes_[static_cast<std::size_t>(index)].right = right;
  return index;
}

RayHit WorldMesh::cast(const Vec3& origin, const Vec3& direction, double t_min, double t_max) const {
  RayHit best;
  if (nodes_.empty()) return best;
  const simd::KernelTable& kt = simd::kernels();
  const simd::Ray ray{origin.x(), origin.y(), origin.z(), direction.x(), direction.y(), direction.z(), t_min, t_max};
  const Vec3 inv = direction.cwiseInverse();
  double best_t = kInf;
  int best_face = INT_MAX;
  double best_u = 0.0, best_v = 0.0;

  int stack[128];
  int top = 0;
  stack[top++] = 0;
  simd::BlockHits hits;
  while (top > 0) {
    const BvhNode& node = nodes_[static_cast<std::size_t>(stack[--top])];
    double t_near = 0.0;
    if (!slab(node.box, origin, direction, inv, t_min, std::min(t_max, best_t), t_near)) continue;
    if (node.is_leaf()) {
      kt.intersect_block(blocks_[static_cast<std::size_t>(node.right)], ray, hits);
      const int* faces = blocks_[static_cast<std::size_t>(node.right)].face;
      for (int k = 0; k < kLeafSize; ++k) {
        const double t = hits.t[k];
        if (t < best_t || (t == best_t && t != kInf && faces[k] < best_face)) {
          best_t = t;
          best_face = faces[k];
          best_u = hits.u[k];
          best_v = hits.v[k];
        }
      }
      continue;
    }
    const BvhNode& l = nodes_[static_cast<std::size_t>(node.left)];
    const BvhNode& r = nodes_[static_cast<std::size_t>(node.right)];
    double tl = 0.0, tr = 0.0;
    const bool hl = slab(l.box, origin, direction, inv, t_min, std::min(t_max, best_t), tl);
    const bool hr = slab(r.box, origin, direction, inv, t_min, std::min(t_max, best_t), tr);
    // push the farther child first so the nearer one is popped next
    if (hl && hr) {
      if (tl <= tr) {
        stack[top++] = node.right;
        stack[top++] = node.left;
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    } else if (hl) {
      stack[top++] = node.left;
    } else if (hr) {
      stack[top++] = node.right;
    }
  }
  if (best_face == INT_MAX) return best;
  best.hit = true;
  best.t = best_t;
  best.face_index = best_face;
  best.w0 = 1.0 - best_u - best_v;
  best.w1 = best_u;
  best.normal = facing_normal(triangle(best_face), direction);
  best.segmentation_id = segmentation_of(best_face);
  return best;
}

void WorldMesh::cast_rays(std::span<const Vec3> origins, std::span<const Vec3> directions, double t_min,
                          double t_max, std::span<RayHit> out) const {
  for (std::size_t i = 0; i < origins.size(); ++i) out[i] = cast(origins[i], directions[i], t_min, t_max);
}

bool WorldMesh::occluded(const Vec3& origin, const Vec3& direction, double t_min, double t_max) const {
  if (nodes_.empty() || !(t_min <= t_max)) return false;
  const simd::KernelTable& kt = simd::kernels();
  const simd::Ray ray{origin.x(), origin.y(), origin.z(), direction.x(), direction.y(), direction.z(), t_min, t_max};
  const Vec3 inv = direction.cwiseInverse();
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  simd::BlockHits hits;
  while (top > 0) {
    const BvhNode& node = nodes_[static_cast<std::size_t>(stack[--top])];
    double t_near = 0.0;
    if (!slab(node.box, origin, direction, inv, t_min, t_max, t_near)) continue;
    if (node.is_leaf()) {
      kt.intersect_block(blocks_[static_cast<std::size_t>(node.right)], ray, hits);
      for (double t : hits.t) {
        if (t != kInf) return true;
      }
      continue;
    }
    stack[top++] = node.left;
    stack[top++] = node.right;
  }
  return false;
}

double WorldMesh::closest_distance(const Vec3& p) const {
  if (nodes_.empty()) return kInf;
  double best_sq = kInf;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = nodes_[static_cast<std::size_t>(stack[--top])];
    if (box_distance_sq(node.box, p) > best_sq) continue;
    if (node.is_leaf()) {
      for (int face : leaf_faces(node)) {
        const auto tri = triangle(face);
        best_sq = std::min(best_sq, (closest_on_triangle(p, tri[0], tri[1], tri[2]) - p).squaredNorm());
      }
      continue;
    }
    const BvhNode& l = nodes_[static_cast<std::size_t>(node.left)];
    const BvhNode& r = nodes_[static_cast<std::size_t>(node.right)];
    if (box_distance_sq(l.box, p) <= box_distance_sq(r.box, p)) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return std::sqrt(best_sq);
}

VecX WorldMesh::query_annotation(int face_index, double w0, double w1) const {
  if (face_index < 0 || static_cast<std::size_t>(face_index) >= triangle_count())
    throw IndexError("face index " + std::to_string(face_index) + " out of range");
  const TriangleMesh& m = *meshes_[static_cast<std::size_t>(submesh_of(face_index))];
  if (m.vertex_annotations.empty())
    throw MissingAnnotationError("sub-mesh " + std::to_string(submesh_of(face_index)) + " has no vertex annotations");
  const auto& f = m.faces[static_cast<std::size_t>(local_face(face_index))];
  const auto& a = m.vertex_annotations;
  return w0 * a[static_cast<std::size_t>(f[0])] + w1 * a[static_cast<std::size_t>(f[1])] +
         (1.0 - w0 - w1) * a[static_cast<std::size_t>(f[2])];
}

}  // namespace aerialsim
