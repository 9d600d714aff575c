#include "swdr/wavelet.hpp"

#include <cmath>
#include <string>

#include "swdr/error.hpp"

namespace swdr {

std::string_view to_string(WaveletFamily family) noexcept {
  switch (family) {
    case WaveletFamily::haar: return "haar";
    case WaveletFamily::cdf53: return "cdf53";
  }
  return "unknown";
}

WaveletFamily parse_wavelet(std::string_view name) {
  if (name == "haar") return WaveletFamily::haar;
  if (name == "cdf53") return WaveletFamily::cdf53;
  throw Error(ErrorCode::invalid_config, "unknown wavelet '" + std::string(name) + "'");
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::size_t low_len(std::size_t n) { return (n + 1) / 2; }
std::size_t high_len(std::size_t n) { return n / 2; }

void haar_forward(std::span<const double> x, std::span<double> low, std::span<double> high) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < high.size(); ++i) {
    low[i] = (x[2 * i] + x[2 * i + 1]) * kInvSqrt2;
    high[i] = (x[2 * i] - x[2 * i + 1]) * kInvSqrt2;
  }
  // Odd tail pairs with its own mirror image.
  if (n % 2 == 1) low[n / 2] = (x[n - 1] + x[n - 1]) * kInvSqrt2;
}

void haar_inverse(std::span<const double> low, std::span<const double> high, std::span<double> x) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < high.size(); ++i) {
    x[2 * i] = (low[i] + high[i]) * kInvSqrt2;
    x[2 * i + 1] = (low[i] - high[i]) * kInvSqrt2;
  }
  if (n % 2 == 1) x[n - 1] = low[n / 2] * kInvSqrt2;
}

// 5/3 lifting: predict d[i] -= (s[i] + s[i+1]) / 2, update s[i] += (d[i-1] + d[i]) / 4,
// with whole-sample symmetric extension at both ends.
double even_at(std::span<const double> s, std::size_t i) {
  return i < s.size() ? s[i] : s[s.size() - 1];
}

double odd_at(std::span<const double> d, std::ptrdiff_t i) {
  if (i < 0) return d[0];
  if (static_cast<std::size_t>(i) >= d.size()) return d[d.size() - 1];
  return d[static_cast<std::size_t>(i)];
}

void cdf53_forward(std::span<const double> x, std::span<double> low, std::span<double> high) {
  const std::size_t n = x.size();
  if (n == 1) {
    low[0] = x[0];
    return;
  }
  for (std::size_t i = 0; i < low.size(); ++i) low[i] = x[2 * i];
  for (std::size_t i = 0; i < high.size(); ++i) high[i] = x[2 * i + 1];
  for (std::size_t i = 0; i < high.size(); ++i) {
    high[i] -= 0.5 * (low[i] + even_at(low, i + 1));
  }
  for (std::size_t i = 0; i < low.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    low[i] += 0.25 * (odd_at(high, k - 1) + odd_at(high, k));
  }
}

void cdf53_inverse(std::span<const double> low, std::span<const double> high, std::span<double> x) {
  const std::size_t n = x.size();
  if (n == 1) {
    x[0] = low[0];
    return;
  }
  std::vector<double> s(low.begin(), low.end());
  std::vector<double> d(high.begin(), high.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    s[i] -= 0.25 * (odd_at(high, k - 1) + odd_at(high, k));
  }
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += 0.5 * (s[i] + even_at(s, i + 1));
  for (std::size_t i = 0; i < s.size(); ++i) x[2 * i] = s[i];
  for (std::size_t i = 0; i < d.size(); ++i) x[2 * i + 1] = d[i];
}

void check_depth(std::size_t rows, std::size_t cols, int levels) {
  const std::size_t shortest = std::min(rows, cols);
  if (levels < 1 || levels > 30 || (std::size_t{1} << levels) > shortest) {
    throw Error(ErrorCode::depth_too_large,
                std::to_string(levels) + " levels on a " + std::to_string(rows) + "x" +
                    std::to_string(cols) + " image");
  }
}

// One analysis level; returns (approx, details).
std::pair<RealMatrix, DetailBands> analyze_level(const RealMatrix& in, WaveletFamily family) {
  const std::size_t r = in.rows();
  const std::size_t c = in.cols();
  const std::size_t rl = low_len(r), rh = high_len(r);
  const std::size_t cl = low_len(c), ch = high_len(c);

  RealMatrix rowpass(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    auto out = rowpass.row(i);
    forward_1d(in.row(i), out.first(cl), out.subspan(cl), family);
  }
  RealMatrix full(r, c);
  std::vector<double> col(r), lo(rl), hi(rh);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t i = 0; i < r; ++i) col[i] = rowpass(i, j);
    forward_1d(col, lo, hi, family);
    for (std::size_t i = 0; i < rl; ++i) full(i, j) = lo[i];
    for (std::size_t i = 0; i < rh; ++i) full(rl + i, j) = hi[i];
  }

  RealMatrix approx(rl, cl);
  DetailBands bands{RealMatrix(rl, ch), RealMatrix(rh, cl), RealMatrix(rh, ch)};
  for (std::size_t i = 0; i < rl; ++i) {
    for (std::size_t j = 0; j < cl; ++j) approx(i, j) = full(i, j);
    for (std::size_t j = 0; j < ch; ++j) bands.horizontal(i, j) = full(i, cl + j);
  }
  for (std::size_t i = 0; i < rh; ++i) {
    for (std::size_t j = 0; j < cl; ++j) bands.vertical(i, j) = full(rl + i, j);
    for (std::size_t j = 0; j < ch; ++j) bands.diagonal(i, j) = full(rl + i, cl + j);
  }
  return {std::move(approx), std::move(bands)};
}

bool same_shape(const RealMatrix& m, std::size_t rows, std::size_t cols) {
  return m.rows() == rows && m.cols() == cols;
}

RealMatrix synthesize_level(const RealMatrix& approx, const DetailBands& bands, std::size_t r,
                            std::size_t c, WaveletFamily family) {
  const std::size_t rl = low_len(r), rh = high_len(r);
  const std::size_t cl = low_len(c), ch = high_len(c);
  if (!same_shape(approx, rl, cl) || !same_shape(bands.horizontal, rl, ch) ||
      !same_shape(bands.vertical, rh, cl) || !same_shape(bands.diagonal, rh, ch)) {
    throw Error(ErrorCode::shape_mismatch, "subband sizes do not match the halving schedule");
  }
  RealMatrix rowpass(r, c);
  std::vector<double> col(r), lo(rl), hi(rh);
  for (std::size_t j = 0; j < c; ++j) {
    const bool low_col = j < cl;
    for (std::size_t i = 0; i < rl; ++i) {
      lo[i] = low_col ? approx(i, j) : bands.horizontal(i, j - cl);
    }
    for (std::size_t i = 0; i < rh; ++i) {
      hi[i] = low_col ? bands.vertical(i, j) : bands.diagonal(i, j - cl);
    }
    inverse_1d(lo, hi, col, family);
    for (std::size_t i = 0; i < r; ++i) rowpass(i, j) = col[i];
  }
  RealMatrix out(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    const auto src = rowpass.row(i);
    inverse_1d(src.first(cl), src.subspan(cl), out.row(i), family);
  }
  return out;
}

void append_band(std::vector<double>& out, const RealMatrix& band) {
  out.insert(out.end(), band.values().begin(), band.values().end());
}

}  // namespace

void forward_1d(std::span<const double> x, std::span<double> low, std::span<double> high,
                WaveletFamily family) {
  if (low.size() != low_len(x.size()) || high.size() != high_len(x.size())) {
    throw Error(ErrorCode::shape_mismatch, "1-D band lengths");
  }
  if (family == WaveletFamily::haar) {
    haar_forward(x, low, high);
  } else {
    cdf53_forward(x, low, high);
  }
}

void inverse_1d(std::span<const double> low, std::span<const double> high, std::span<double> x,
                WaveletFamily family) {
  if (low.size() != low_len(x.size()) || high.size() != high_len(x.size())) {
    throw Error(ErrorCode::shape_mismatch, "1-D band lengths");
  }
  if (family == WaveletFamily::haar) {
    haar_inverse(low, high, x);
  } else {
    cdf53_inverse(low, high, x);
  }
}

CoeffPyramid dwt2(const RealMatrix& mat, int levels, WaveletFamily family) {
  check_depth(mat.rows(), mat.cols(), levels);
  CoeffPyramid p;
  p.family = family;
  p.rows = mat.rows();
  p.cols = mat.cols();
  RealMatrix current = mat;
  for (int level = 1; level <= levels; ++level) {
    auto [approx, bands] = analyze_level(current, family);
    p.details.push_back(std::move(bands));
    current = std::move(approx);
  }
  p.approx = std::move(current);
  return p;
}

RealMatrix idwt2(const CoeffPyramid& pyramid) {
  const int levels = pyramid.levels();
  check_depth(pyramid.rows, pyramid.cols, levels);
  // Sizes of each level's input, finest first.
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  std::size_t r = pyramid.rows, c = pyramid.cols;
  for (int l = 0; l < levels; ++l) {
    dims.emplace_back(r, c);
    r = low_len(r);
    c = low_len(c);
  }
  RealMatrix current = pyramid.approx;
  for (int l = levels - 1; l >= 0; --l) {
    current = synthesize_level(current, pyramid.details[static_cast<std::size_t>(l)],
                               dims[static_cast<std::size_t>(l)].first,
                               dims[static_cast<std::size_t>(l)].second, pyramid.family);
  }
  return current;
}

std::pair<std::size_t, std::size_t> approx_shape(std::size_t rows, std::size_t cols, int levels) {
  for (int l = 0; l < levels; ++l) {
    rows = low_len(rows);
    cols = low_len(cols);
  }
  return {rows, cols};
}

std::vector<ShapeEntry> shape_map_for(std::size_t rows, std::size_t cols, int levels,
                                      bool include_approx) {
  check_depth(rows, cols, levels);
  // Input size of each level, finest first.
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  for (int l = 0; l < levels; ++l) {
    dims.emplace_back(rows, cols);
    rows = low_len(rows);
    cols = low_len(cols);
  }
  std::vector<ShapeEntry> map;
  if (include_approx) map.push_back({{SubbandKind::approx, levels}, rows, cols});
  for (int l = levels; l >= 1; --l) {
    const auto [r, c] = dims[static_cast<std::size_t>(l - 1)];
    map.push_back({{SubbandKind::horizontal, l}, low_len(r), high_len(c)});
    map.push_back({{SubbandKind::vertical, l}, high_len(r), low_len(c)});
    map.push_back({{SubbandKind::diagonal, l}, high_len(r), high_len(c)});
  }
  return map;
}

CoeffPyramid zero_pyramid(std::size_t rows, std::size_t cols, int levels, WaveletFamily family) {
  CoeffPyramid p;
  p.family = family;
  p.rows = rows;
  p.cols = cols;
  p.details.resize(static_cast<std::size_t>(levels));
  for (const auto& e : shape_map_for(rows, cols, levels, true)) {
    RealMatrix band(e.rows, e.cols);
    auto& d = e.id.level > 0 ? p.details[static_cast<std::size_t>(e.id.level - 1)] : p.details[0];
    switch (e.id.kind) {
      case SubbandKind::approx: p.approx = std::move(band); break;
      case SubbandKind::horizontal: d.horizontal = std::move(band); break;
      case SubbandKind::vertical: d.vertical = std::move(band); break;
      case SubbandKind::diagonal: d.diagonal = std::move(band); break;
    }
  }
  return p;
}

CoeffVector linearize(const CoeffPyramid& pyramid, bool include_approx) {
  CoeffVector v;
  v.includes_approx = include_approx;
  v.shape_map = shape_map_for(pyramid.rows, pyramid.cols, pyramid.levels(), include_approx);
  std::size_t total = 0;
  for (const auto& e : v.shape_map) total += e.rows * e.cols;
  v.values.reserve(total);
  if (include_approx) append_band(v.values, pyramid.approx);
  for (int l = pyramid.levels(); l >= 1; --l) {
    const auto& d = pyramid.details[static_cast<std::size_t>(l - 1)];
    append_band(v.values, d.horizontal);
    append_band(v.values, d.vertical);
    append_band(v.values, d.diagonal);
  }
  if (v.values.size() != total) {
    throw Error(ErrorCode::shape_mismatch, "pyramid subbands do not match the halving schedule");
  }
  return v;
}

CoeffPyramid delinearize(const CoeffVector& v, const CoeffPyramid& templ) {
  const auto expected =
      shape_map_for(templ.rows, templ.cols, templ.levels(), v.includes_approx);
  if (v.shape_map != expected) {
    throw Error(ErrorCode::shape_mismatch, "coefficient shape map does not match the pyramid");
  }
  std::size_t total = 0;
  for (const auto& e : expected) total += e.rows * e.cols;
  if (v.values.size() != total) {
    throw Error(ErrorCode::shape_mismatch, "coefficient count does not match the shape map");
  }
  CoeffPyramid out = templ;
  std::size_t pos = 0;
  for (const auto& e : expected) {
    RealMatrix band(e.rows, e.cols,
                    std::vector<double>(v.values.begin() + static_cast<std::ptrdiff_t>(pos),
                                        v.values.begin() + static_cast<std::ptrdiff_t>(pos + e.rows * e.cols)));
    pos += e.rows * e.cols;
    if (e.id.kind == SubbandKind::approx) {
      out.approx = std::move(band);
      continue;
    }
    auto& d = out.details[static_cast<std::size_t>(e.id.level - 1)];
    switch (e.id.kind) {
      case SubbandKind::horizontal: d.horizontal = std::move(band); break;
      case SubbandKind::vertical: d.vertical = std::move(band); break;
      case SubbandKind::diagonal: d.diagonal = std::move(band); break;
      case SubbandKind::approx: break;
    }
  }
  return out;
}

}  // namespace swdr
