#include "aerialsim/mesh.hpp"

#include "aerialsim/config.hpp"
#include "aerialsim/errors.hpp"

#include <charconv>
#include <string>

namespace aerialsim {

namespace {

std::string_view next_token(std::string_view& line) {
  std::size_t b = 0;
  while (b < line.size() && (line[b] == ' ' || line[b] == '\t' || line[b] == '\r')) ++b;
  std::size_t e = b;
  while (e < line.size() && line[e] != ' ' && line[e] != '\t' && line[e] != '\r') ++e;
  const std::string_view tok = line.substr(b, e - b);
  line.remove_prefix(e);
  return tok;
}

double parse_double(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
  return v;
}

int parse_index(std::string_view tok, std::size_t vertex_count, std::size_t line_no) {
  // "7", "7/2", "7//3", "7/2/3"
  tok = tok.substr(0, tok.find('/'));
  long idx = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || idx == 0)
    throw ParseError("line " + std::to_string(line_no) + ": bad face index '" + std::string(tok) + "'");
  const long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
  if (resolved < 0 || resolved >= static_cast<long>(vertex_count))
    throw ParseError("line " + std::to_string(line_no) + ": face index out of range");
  return static_cast<int>(resolved);
}

bool degenerate(const TriangleMesh& m, const std::array<int, 3>& f) {
  const Vec3& a = m.vertices[static_cast<std::size_t>(f[0])];
  const Vec3& b = m.vertices[static_cast<std::size_t>(f[1])];
  const Vec3& c = m.vertices[static_cast<std::size_t>(f[2])];
  return (b - a).cross(c - a).squaredNorm() == 0.0;
}

}  // namespace

TriangleMesh parse_obj(std::string_view text, MeshLoadReport* report) {
  TriangleMesh mesh;
  MeshLoadReport local;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    const std::string_view kind = next_token(line);
    if (kind.empty() || kind[0] == '#') continue;
    if (kind == "v") {
      Vec3 v;
      for (int i = 0; i < 3; ++i) {
        const auto tok = next_token(line);
        if (tok.empty()) throw ParseError("line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
        v[i] = parse_double(tok, line_no);
      }
      mesh.vertices.push_back(v);
    } else if (kind == "va") {
      std::vector<double> values;
      for (auto tok = next_token(line); !tok.empty(); tok = next_token(line)) values.push_back(parse_double(tok, line_no));
      mesh.vertex_annotations.push_back(Eigen::Map<const VecX>(values.data(), static_cast<Eigen::Index>(values.size())));
    } else if (kind == "f") {
      std::vector<int> idx;
      for (auto tok = next_token(line); !tok.empty(); tok = next_token(line))
        idx.push_back(parse_index(tok, mesh.vertices.size(), line_no));
      if (idx.size() == 3) {
        mesh.faces.push_back({idx[0], idx[1], idx[2]});
      } else if (idx.size() == 4) {
        mesh.faces.push_back({idx[0], idx[1], idx[2]});
        mesh.faces.push_back({idx[0], idx[2], idx[3]});
        ++local.triangulated_quads;
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": only triangle and quad faces are supported");
      }
    }
    // vt, vn, o, g, s, usemtl, mtllib: ignored
  }

  std::vector<std::array<int, 3>> kept;
  kept.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    if (degenerate(mesh, f)) {
      ++local.dropped_degenerate;
    } else {
      kept.push_back(f);
    }
  }
  mesh.faces = std::move(kept);
  if (mesh.faces.empty()) throw ParseError("mesh has no non-degenerate faces");
  validate(mesh);
  if (report) *report = local;
  return mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshLoadReport* report) {
  return parse_obj(read_text_file(path), report);
}

void validate(const TriangleMesh& mesh) {
  const auto n = static_cast<int>(mesh.vertices.size());
  for (const auto& f : mesh.faces) {
    for (int i : f) {
      if (i < 0 || i >= n) throw ValidationError("faces", "vertex index out of range");
    }
  }
  if (!mesh.vertex_annotations.empty()) {
    if (mesh.vertex_annotations.size() != mesh.vertices.size())
      throw ValidationError("vertex_annotations", "count must equal vertex count");
    const auto dim = mesh.vertex_annotations.front().size();
    for (const auto& a : mesh.vertex_annotations) {
      if (a.size() != dim) throw ValidationError("vertex_annotations", "all annotations must share one length");
    }
  }
}

TriangleMesh make_box_mesh(const Vec3& lo, const Vec3& hi, int segmentation_id) {
  TriangleMesh m;
  m.segmentation_id = segmentation_id;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  }
  m.faces = {
      {0, 2, 1}, {1, 2, 3},  // z = lo
      {4, 5, 6}, {5, 7, 6},  // z = hi
      {0, 1, 4}, {1, 5, 4},  // y = lo
      {2, 6, 3}, {3, 6, 7},  // y = hi
      {0, 4, 2}, {2, 4, 6},  // x = lo
      {1, 3, 5}, {3, 7, 5},  // x = hi
  };
  return m;
}

}  // namespace aerialsim
