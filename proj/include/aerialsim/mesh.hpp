#pragma once

#include "aerialsim/math.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

namespace aerialsim {

/// Indexed triangle mesh. One TriangleMesh is one sub-mesh (one object) of a world.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  /// Optional per-vertex annotation vectors; empty or one entry per vertex,
  /// all of the same length.
  std::vector<VecX> vertex_annotations;
  int segmentation_id = 0;

  std::size_t annotation_dim() const {
    return vertex_annotations.empty() ? 0 : static_cast<std::size_t>(vertex_annotations.front().size());
  }
};

struct MeshLoadReport {
  std::size_t dropped_degenerate = 0;
  std::size_t triangulated_quads = 0;
};

/// Parses Wavefront OBJ text. Supports `v`, `f` (triangles and quads, with
/// v/vt/vn index forms and negative indices) and the extension `va a0 a1 ...`
/// giving one annotation vector per vertex in declaration order.
TriangleMesh parse_obj(std::string_view text, MeshLoadReport* report = nullptr);
TriangleMesh load_mesh(const std::filesystem::path& path, MeshLoadReport* report = nullptr);

/// Throws ValidationError on out-of-range indices or mismatched annotation counts.
void validate(const TriangleMesh& mesh);

/// Axis-aligned box mesh (8 vertices, 12 outward-wound triangles).
TriangleMesh make_box_mesh(const Vec3& lo, const Vec3& hi, int segmentation_id = 0);

}  // namespace aerialsim
