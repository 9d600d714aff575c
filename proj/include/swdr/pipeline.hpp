#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "swdr/image_io.hpp"
#include "swdr/svd.hpp"
#include "swdr/wavelet.hpp"
#include "swdr/wdr.hpp"

namespace swdr {

enum class Mode : std::uint8_t { svd_wdr = 0, wdr_only = 1, svd_only = 2 };

std::string_view to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view name);

// How target_ratio is turned into a byte budget. `nominal` multiplies the SVD
// factor-count ratio by the WDR coefficient-count ratio; `measured` budgets
// the whole container against the 8-bit source size.
enum class RatioAccounting : std::uint8_t { nominal = 0, measured = 1 };

std::string_view to_string(RatioAccounting accounting) noexcept;
RatioAccounting parse_accounting(std::string_view name);

struct CompressionConfig {
  double target_ratio = 0.0;  // <= 0: no target, explicit rank and passes govern
  std::optional<std::size_t> svd_rank;
  double svd_share = 0.5;  // exponent: cr_svd target = target_ratio ^ svd_share
  WaveletFamily wavelet = WaveletFamily::haar;
  int levels = 3;
  bool include_approx = false;
  WdrParams wdr;
  Mode mode = Mode::svd_wdr;
  RatioAccounting accounting = RatioAccounting::nominal;
  bool requantize_svd = false;  // round the rank-k image to 8 bits before the DWT
};

struct ParameterPlan {
  std::size_t k = 0;  // 0: SVD stage not applied
  double cr_svd = 1.0;
  std::optional<std::size_t> wdr_budget;
  int passes = 9;
  bool ratio_unreachable = false;
};

ParameterPlan plan_parameters(std::size_t m, std::size_t n, const CompressionConfig& cfg);

struct CompressionRatios {
  double cr_svd = 1.0;
  double cr_wdr = 1.0;
  double cr_total = 1.0;     // cr_svd * cr_wdr
  double cr_measured = 1.0;  // m*n / container bytes
};

struct ContainerHeader {
  std::uint8_t version = 1;
  Mode mode = Mode::svd_wdr;
  std::uint32_t m = 0;
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  WaveletFamily wavelet = WaveletFamily::haar;
  std::uint8_t levels = 0;
  bool include_approx = false;
  double t0 = 0.0;
  std::uint16_t pass_count = 0;

  friend bool operator==(const ContainerHeader&, const ContainerHeader&) = default;
};

// Fixed header: "SWDR", version, mode, m, n, k, wavelet, levels,
// include_approx, t0, pass_count, approx_len (all little-endian).
constexpr std::size_t kContainerHeaderBytes = 4 + 1 + 1 + 4 + 4 + 4 + 1 + 1 + 1 + 8 + 2 + 4;

/// In-memory .swdr file. `approx` holds the verbatim approximation band, or
/// for svd_only the factors: sigma[k], then u_1..u_k (m each), v_1..v_k (n each).
struct Container {
  ContainerHeader header;
  std::vector<float> approx;
  std::vector<std::uint8_t> wdr_payload;
  CompressionRatios ratios;
  bool ratio_unreachable = false;
};

Container compress(const GrayImage& img, const CompressionConfig& cfg);
/// Same as compress, reusing an SVD of to_real(img) computed by the caller.
Container compress(const GrayImage& img, const CompressionConfig& cfg, const SvdFactors* factors);

GrayImage decompress(const Container& c);

std::vector<std::uint8_t> serialize_container(const Container& c);
/// Throws Error{malformed_stream} on a bad magic, version, or layout.
Container parse_container(std::span<const std::uint8_t> bytes);

/// Keeps the first `passes` WDR passes.
Container truncate_passes(const Container& c, std::size_t passes);

CompressionRatios compute_ratios(const Container& c);

}  // namespace swdr
