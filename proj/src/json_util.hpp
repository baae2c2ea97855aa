#pragma once

// JSON helpers shared by the config and task document parsers.

#include "aerialsim/config.hpp"
#include "aerialsim/errors.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace aerialsim::json_util {

using json = nlohmann::json;

inline json parse_document(std::string_view text) {
  try {
    json doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
    if (!doc.is_object()) throw ParseError("config document must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
}

inline const json& require(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(key, "missing required field");
  return *it;
}

inline double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError(field, "expected a number");
  return v.get<double>();
}

inline double number_or(const json& obj, const char* key, double fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, key);
}

inline std::vector<double> as_numbers(const json& v, const std::string& field) {
  if (!v.is_array()) throw ValidationError(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_number(e, field));
  return out;
}

inline Vec3 as_vec3(const json& v, const std::string& field) {
  const auto xs = as_numbers(v, field);
  if (xs.size() != 3) throw ValidationError(field, "expected 3 components");
  return Vec3(xs[0], xs[1], xs[2]);
}

inline Vec3 vec3_or(const json& obj, const char* key, const Vec3& fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : as_vec3(*it, key);
}

inline Range as_range(const json& v, const std::string& field) {
  const auto xs = as_numbers(v, field);
  if (xs.size() != 2) throw ValidationError(field, "expected [lo, hi]");
  return Range{xs[0], xs[1]};
}

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
inline json to_json(const Range& r) { return json::array({r.lo, r.hi}); }

inline json mat3_to_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

inline Mat3 rotation_from_json(const json& v, const std::string& field) {
  if (v.is_array() && v.size() == 3 && v[0].is_array()) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
      const Vec3 row = as_vec3(v[i], field);
      m.row(i) = row.transpose();
    }
    if (!(m.transpose() * m).isApprox(Mat3::Identity(), 1e-9) || m.determinant() < 0.0)
      throw ValidationError(field, "rotation must be orthonormal with det +1");
    return m;
  }
  const Vec3 rpy = as_vec3(v, field);
  return rot_from_rpy(rpy.x(), rpy.y(), rpy.z());
}

inline Pose pose_from_json(const json& obj, const std::string& field, const Pose& fallback) {
  Pose p = fallback;
  if (auto it = obj.find("position"); it != obj.end()) p.position = as_vec3(*it, field + ".position");
  if (auto it = obj.find("rotation"); it != obj.end()) p.rotation = rotation_from_json(*it, field + ".rotation");
  if (auto it = obj.find("rpy"); it != obj.end()) p.rotation = rotation_from_json(*it, field + ".rpy");
  return p;
}

inline json pose_to_json(const Pose& p) {
  return json{{"position", to_json(p.position)}, {"rotation", mat3_to_json(p.rotation)}};
}

inline Mat3 inertia_from_json(const json& v) {
  const auto xs = as_numbers(v, "inertia");
  Mat3 j = Mat3::Zero();
  if (xs.size() == 3) {
    j.diagonal() << xs[0], xs[1], xs[2];
  } else if (xs.size() == 6) {
    // upper triangle: xx, xy, xz, yy, yz, zz
    j << xs[0], xs[1], xs[2],
         xs[1], xs[3], xs[4],
         xs[2], xs[4], xs[5];
  } else if (xs.size() == 9) {
    for (int i = 0; i < 9; ++i) j(i / 3, i % 3) = xs[static_cast<std::size_t>(i)];
    j = 0.5 * (j + j.transpose()).eval();
  } else {
    throw ValidationError("inertia", "expected 3 (diagonal), 6 (upper triangle) or 9 values");
  }
  return j;
}

inline void require_nonnegative(const Vec3& v, const char* field) {
  if ((v.array() < 0.0).any() || !v.allFinite()) throw ValidationError(field, "components must be >= 0");
}

inline void require_range(const Range& r, const std::string& field) {
  if (!(r.lo <= r.hi)) throw ValidationError(field, "range must satisfy lo <= hi");
}

}  // namespace aerialsim::json_util
