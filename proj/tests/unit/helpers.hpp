#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "swdr/image_io.hpp"

namespace swdr::test {

inline std::vector<double> random_vector(std::mt19937& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline RealMatrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols,
                                double lo = -1.0, double hi = 1.0) {
  return RealMatrix(rows, cols, random_vector(rng, rows * cols, lo, hi));
}

inline GrayImage random_image(std::mt19937& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<int> dist(0, 255);
  GrayImage img(rows, cols);
  for (auto& s : img.samples) s = static_cast<std::uint8_t>(dist(rng));
  return img;
}

// Smooth synthetic scene with an edge and some texture; stands in for a
// natural image where a fixture file would be overkill.
inline GrayImage synthetic_scene(std::size_t rows, std::size_t cols) {
  GrayImage img(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 90.0 + 60.0 * std::sin(0.05 * static_cast<double>(r)) * std::cos(0.031 * static_cast<double>(c));
      if (c > cols / 3 && r > rows / 4) v += 50.0;
      v += 10.0 * std::sin(0.9 * static_cast<double>(r * 3 + c));
      img.at(r, c) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return img;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("swdr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(SWDR_TEST_DATA) / name;
}

}  // namespace swdr::test
