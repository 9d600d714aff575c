#include "swdr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "swdr/error.hpp"

namespace swdr {

GrayImage::GrayImage(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> data)
    : height(rows), width(cols), samples(std::move(data)) {
  if (samples.size() != rows * cols) {
    throw Error(ErrorCode::shape_mismatch, "sample count does not match dimensions");
  }
}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw Error(ErrorCode::shape_mismatch, "value count does not match dimensions");
  }
}

RealMatrix RealMatrix::transposed() const {
  RealMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io_failure, "read failed for " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io_failure, "write failed for " + path.string());
}

namespace {

bool is_pnm_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Header tokenizer; '#' comments run to end of line.
class PnmHeaderReader {
public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9') {
      throw Error(ErrorCode::corrupt_file, "malformed PGM header");
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 30)) throw Error(ErrorCode::corrupt_file, "PGM dimension too large");
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !is_pnm_space(bytes_[pos_])) {
      throw Error(ErrorCode::corrupt_file, "missing separator before PGM raster");
    }
    return pos_ + 1;
  }

  std::size_t pos_ = 2;

private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_pnm_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
};

bool has_png_signature(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::corrupt_file, std::string("PNG: ") + image.message);
  }
  // Color, alpha, palette and 16-bit sources are rejected instead of converted.
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0 &&
                    (image.format & PNG_FORMAT_FLAG_ALPHA) == 0 &&
                    (image.format & PNG_FORMAT_FLAG_LINEAR) == 0 &&
                    (image.format & PNG_FORMAT_FLAG_COLORMAP) == 0;
  if (!gray) {
    png_image_free(&image);
    throw Error(ErrorCode::unsupported_format, "PNG is not 8-bit grayscale");
  }
  image.format = PNG_FORMAT_GRAY;
  GrayImage out(image.height, image.width);
  if (!png_image_finish_read(&image, nullptr, out.samples.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::corrupt_file, "PNG: " + msg);
  }
  return out;
}

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw Error(ErrorCode::unsupported_format, "not a PGM file");
  }
  if (bytes[1] != '5') {
    throw Error(ErrorCode::unsupported_format, "only binary P5 PGM is supported");
  }
  PnmHeaderReader header(bytes);
  const std::size_t width = header.next_number();
  const std::size_t height = header.next_number();
  const std::size_t maxval = header.next_number();
  if (maxval != 255) {
    throw Error(ErrorCode::unsupported_format,
                "PGM maxval " + std::to_string(maxval) + " (only 255 is supported)");
  }
  if (width == 0 || height == 0) throw Error(ErrorCode::corrupt_file, "empty PGM raster");
  const std::size_t offset = header.raster_offset();
  const std::size_t count = width * height;
  if (bytes.size() < offset + count) {
    throw Error(ErrorCode::corrupt_file, "truncated PGM payload");
  }
  return GrayImage(height, width,
                   std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                             bytes.begin() + static_cast<std::ptrdiff_t>(offset + count)));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.samples.begin(), img.samples.end());
  return out;
}

GrayImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (has_png_signature(bytes)) return decode_png(bytes);
  return decode_pgm(bytes);
}

void write_image(const GrayImage& img, const std::filesystem::path& path) {
  write_file(path, encode_pgm(img));
}

RealMatrix to_real(const GrayImage& img) {
  RealMatrix out(img.height, img.width);
  auto values = out.values();
  for (std::size_t i = 0; i < img.samples.size(); ++i) values[i] = img.samples[i];
  return out;
}

GrayImage to_gray(const RealMatrix& mat) {
  GrayImage out(mat.rows(), mat.cols());
  const auto values = mat.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite_input, "non-finite sample");
    // std::round is half away from zero.
    out.samples[i] = static_cast<std::uint8_t>(std::round(std::clamp(v, 0.0, 255.0)));
  }
  return out;
}

}  // namespace swdr
