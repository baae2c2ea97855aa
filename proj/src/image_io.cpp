#include "aerialsim/image_io.hpp"

#include "aerialsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace aerialsim {

std::vector<std::uint16_t> quantize_mm(std::span<const double> metres) {
  std::vector<std::uint16_t> out(metres.size(), 0);
  for (std::size_t i = 0; i < metres.size(); ++i) {
    const double m = metres[i];
    if (!(m >= 0.0)) continue;
    const double mm = std::round(m * 1000.0);
    out[i] = static_cast<std::uint16_t>(std::min(std::max(mm, 1.0), 65535.0));
  }
  return out;
}

std::string encode_pgm16(int width, int height, std::span<const std::uint16_t> pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ValidationError("pixels", "size must equal width * height");
  }
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
  out.reserve(out.size() + 2 * pixels.size());
  for (std::uint16_t p : pixels) {
    out.push_back(static_cast<char>(p >> 8));
    out.push_back(static_cast<char>(p & 0xFF));
  }
  return out;
}

void write_pgm16(const std::filesystem::path& path, int width, int height, std::span<const std::uint16_t> pixels) {
  write_text_file(path, encode_pgm16(width, height, pixels));
}

Pgm16 decode_pgm16(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  int maxval = 0;
  Pgm16 img;
  in >> magic >> img.width >> img.height >> maxval;
  if (!in || magic != "P5" || maxval != 65535 || img.width <= 0 || img.height <= 0) {
    throw ParseError("not a 16-bit binary PGM");
  }
  in.get();
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  const auto offset = static_cast<std::size_t>(in.tellg());
  if (bytes.size() - offset != 2 * n) throw ParseError("PGM payload size mismatch");
  img.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto hi = static_cast<unsigned char>(bytes[offset + 2 * i]);
    const auto lo = static_cast<unsigned char>(bytes[offset + 2 * i + 1]);
    img.pixels[i] = static_cast<std::uint16_t>((hi << 8) | lo);
  }
  return img;
}

std::string format_int_matrix(int width, int height, std::span<const int> values) {
  std::string out;
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      if (u) out.push_back(' ');
      out += std::to_string(values[static_cast<std::size_t>(v) * static_cast<std::size_t>(width) +
                                   static_cast<std::size_t>(u)]);
    }
    out.push_back('\n');
  }
  return out;
}

void write_int_matrix(const std::filesystem::path& path, int width, int height, std::span<const int> values) {
  write_text_file(path, format_int_matrix(width, height, values));
}

std::string format_point_cloud(const SensorImage& image) {
  std::string out = "x,y,z,seg\n";
  char buf[128];
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (!image.valid[i]) continue;
    const Vec3& p = image.point[i];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%d\n", p.x(), p.y(), p.z(), image.segmentation[i]);
    out += buf;
  }
  return out;
}

void write_point_cloud(const std::filesystem::path& path, const SensorImage& image) {
  write_text_file(path, format_point_cloud(image));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace aerialsim
