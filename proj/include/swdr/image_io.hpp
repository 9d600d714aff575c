#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace swdr {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  std::size_t height = 0;  // m
  std::size_t width = 0;   // n
  std::vector<std::uint8_t> samples;

  GrayImage() = default;
  GrayImage(std::size_t rows, std::size_t cols, std::uint8_t fill = 0)
      : height(rows), width(cols), samples(rows * cols, fill) {}
  GrayImage(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> data);

  std::uint8_t& at(std::size_t r, std::size_t c) { return samples[r * width + c]; }
  std::uint8_t at(std::size_t r, std::size_t c) const { return samples[r * width + c]; }
  std::size_t size() const noexcept { return samples.size(); }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Dense real matrix, row-major. Working representation for image data and
/// transform coefficients.
class RealMatrix {
public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  RealMatrix transposed() const;

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Reads a binary PGM (P5, maxval 255) or an 8-bit grayscale PNG.
/// Throws Error{unsupported_format} for anything else and Error{corrupt_file}
/// for a truncated or malformed payload.
GrayImage load_image(const std::filesystem::path& path);

/// Writes a P5 PGM with header "P5\n<w> <h>\n255\n".
void write_image(const GrayImage& img, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);

RealMatrix to_real(const GrayImage& img);

/// Clamps to [0,255] and rounds half away from zero.
GrayImage to_gray(const RealMatrix& mat);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace swdr
