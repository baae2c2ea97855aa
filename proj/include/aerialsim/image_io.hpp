#pragma once

// Sensor image export: 16-bit binary PGM (millimetres), plain-text id
// matrices and CSV point clouds.

#include "aerialsim/sensors.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace aerialsim {

/// Metres to millimetres, rounded and saturated to [1, 65535]; sentinels
/// (negative values) become 0.
std::vector<std::uint16_t> quantize_mm(std::span<const double> metres);

/// Binary P5 with maxval 65535, big-endian samples.
std::string encode_pgm16(int width, int height, std::span<const std::uint16_t> pixels);
void write_pgm16(const std::filesystem::path& path, int width, int height, std::span<const std::uint16_t> pixels);

struct Pgm16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;
};
Pgm16 decode_pgm16(const std::string& bytes);

/// One row per line, values separated by single spaces.
std::string format_int_matrix(int width, int height, std::span<const int> values);
void write_int_matrix(const std::filesystem::path& path, int width, int height, std::span<const int> values);

/// "x,y,z,seg" header then one line per valid pixel in row-major order.
std::string format_point_cloud(const SensorImage& image);
void write_point_cloud(const std::filesystem::path& path, const SensorImage& image);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace aerialsim
