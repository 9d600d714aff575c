#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "swdr/image_io.hpp"

namespace swdr {

enum class WaveletFamily : std::uint8_t {
  haar = 0,   // orthonormal, half-sample symmetric boundary
  cdf53 = 1,  // real-valued 5/3 lifting, whole-sample symmetric boundary
};

std::string_view to_string(WaveletFamily family) noexcept;
WaveletFamily parse_wavelet(std::string_view name);

// Orientation naming: "horizontal" detail is high-pass along rows (it responds
// to vertical edges), "vertical" detail is high-pass along columns (it responds
// to horizontal edges).
enum class SubbandKind : std::uint8_t { approx = 0, horizontal = 1, vertical = 2, diagonal = 3 };

struct SubbandId {
  SubbandKind kind = SubbandKind::approx;
  int level = 0;  // 1 = finest

  friend bool operator==(const SubbandId&, const SubbandId&) = default;
};

struct DetailBands {
  RealMatrix horizontal;
  RealMatrix vertical;
  RealMatrix diagonal;

  friend bool operator==(const DetailBands&, const DetailBands&) = default;
};

/// Multi-level decomposition. details[0] is level 1 (finest). Each level
/// splits r x c into a ceil(r/2) x ceil(c/2) low band and floor-sized high
/// bands, so the coefficient count always equals the pixel count.
struct CoeffPyramid {
  WaveletFamily family = WaveletFamily::haar;
  std::size_t rows = 0;
  std::size_t cols = 0;
  RealMatrix approx;
  std::vector<DetailBands> details;

  int levels() const noexcept { return static_cast<int>(details.size()); }

  friend bool operator==(const CoeffPyramid&, const CoeffPyramid&) = default;
};

struct ShapeEntry {
  SubbandId id;
  std::size_t rows = 0;
  std::size_t cols = 0;

  friend bool operator==(const ShapeEntry&, const ShapeEntry&) = default;
};

/// Flat coefficient vector. Codec math indexes it from 1; storage is 0-based.
struct CoeffVector {
  std::vector<double> values;
  std::vector<ShapeEntry> shape_map;
  bool includes_approx = false;
};

/// Throws Error{depth_too_large} unless levels >= 1 and 2^levels <= min(m, n).
CoeffPyramid dwt2(const RealMatrix& mat, int levels, WaveletFamily family);

/// Throws Error{shape_mismatch} when subband sizes do not follow the halving
/// schedule of (rows, cols).
RealMatrix idwt2(const CoeffPyramid& pyramid);

/// Scan order: approx (if requested), then levels coarsest to finest, each
/// level as horizontal, vertical, diagonal; row-major within a subband.
CoeffVector linearize(const CoeffPyramid& pyramid, bool include_approx);

/// Inverse of linearize. When v carries no approx band, the template's approx
/// subband is kept. The shape map must match the template's, in order.
CoeffPyramid delinearize(const CoeffVector& v, const CoeffPyramid& templ);

/// The shape map linearize would produce for an image of the given size.
std::vector<ShapeEntry> shape_map_for(std::size_t rows, std::size_t cols, int levels,
                                      bool include_approx);

/// All-zero pyramid with the subband layout of a rows x cols image.
CoeffPyramid zero_pyramid(std::size_t rows, std::size_t cols, int levels, WaveletFamily family);

/// Subband dimensions of the coarsest approximation band.
std::pair<std::size_t, std::size_t> approx_shape(std::size_t rows, std::size_t cols, int levels);

// One-dimensional analysis/synthesis. low has ceil(n/2) entries, high floor(n/2).
void forward_1d(std::span<const double> x, std::span<double> low, std::span<double> high,
                WaveletFamily family);
void inverse_1d(std::span<const double> low, std::span<const double> high, std::span<double> x,
                WaveletFamily family);

}  // namespace swdr
