#include "swdr/pipeline.hpp"

#include <cmath>
#include <string>

#include "byte_io.hpp"
#include "swdr/error.hpp"

namespace swdr {

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::svd_wdr: return "svd_wdr";
    case Mode::wdr_only: return "wdr_only";
    case Mode::svd_only: return "svd_only";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  if (name == "svd_wdr") return Mode::svd_wdr;
  if (name == "wdr_only") return Mode::wdr_only;
  if (name == "svd_only") return Mode::svd_only;
  throw Error(ErrorCode::invalid_config, "unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(RatioAccounting accounting) noexcept {
  return accounting == RatioAccounting::measured ? "measured" : "nominal";
}

RatioAccounting parse_accounting(std::string_view name) {
  if (name == "nominal") return RatioAccounting::nominal;
  if (name == "measured") return RatioAccounting::measured;
  throw Error(ErrorCode::invalid_config, "unknown accounting '" + std::string(name) + "'");
}

namespace {

constexpr char kMagic[4] = {'S', 'W', 'D', 'R'};

std::size_t approx_count(std::size_t m, std::size_t n, int levels) {
  const auto [r, c] = approx_shape(m, n, levels);
  return r * c;
}

std::size_t wdr_coeff_count(std::size_t m, std::size_t n, int levels, bool include_approx) {
  return include_approx ? m * n : m * n - approx_count(m, n, levels);
}

std::size_t factor_count(std::size_t k, std::size_t m, std::size_t n) { return k * (1 + m + n); }

void check_rank(std::size_t k, std::size_t m, std::size_t n) {
  if (k < 1 || k > std::min(m, n)) {
    throw Error(ErrorCode::rank_out_of_range,
                "rank " + std::to_string(k) + " outside [1, " + std::to_string(std::min(m, n)) + "]");
  }
}

}  // namespace

ParameterPlan plan_parameters(std::size_t m, std::size_t n, const CompressionConfig& cfg) {
  if (m == 0 || n == 0) throw Error(ErrorCode::invalid_config, "empty image");
  if (!(cfg.svd_share >= 0.0 && cfg.svd_share <= 1.0)) {
    throw Error(ErrorCode::invalid_config, "svd_share must be in [0, 1]");
  }
  if (!std::isfinite(cfg.target_ratio)) throw Error(ErrorCode::invalid_config, "target ratio not finite");
  const bool has_target = cfg.target_ratio > 0.0;
  const double target = cfg.target_ratio;
  const double pixels = static_cast<double>(m) * static_cast<double>(n);

  ParameterPlan plan;
  plan.passes = cfg.wdr.passes;

  switch (cfg.mode) {
    case Mode::svd_only:
      if (cfg.svd_rank) {
        plan.k = *cfg.svd_rank;
      } else if (!has_target) {
        throw Error(ErrorCode::invalid_config, "svd_only needs a target ratio or an explicit rank");
      } else if (cfg.accounting == RatioAccounting::nominal) {
        const auto choice = rank_for_ratio(m, n, target);
        plan.k = choice.k;
        plan.ratio_unreachable = choice.ratio_unreachable;
      } else {
        // Container bytes: header + 4 bytes per stored factor entry.
        const double allowed = std::floor(pixels / target) - static_cast<double>(kContainerHeaderBytes);
        const double per_rank = 4.0 * static_cast<double>(1 + m + n);
        const double k = std::floor(allowed / per_rank);
        if (k < 1.0) {
          plan.k = 1;
          plan.ratio_unreachable = true;
        } else {
          plan.k = static_cast<std::size_t>(std::min(k, static_cast<double>(std::min(m, n))));
        }
      }
      check_rank(plan.k, m, n);
      plan.cr_svd = svd_compression_ratio({plan.k, m, n});
      return plan;

    case Mode::wdr_only:
      plan.k = 0;
      break;

    case Mode::svd_wdr:
      if (cfg.svd_rank) {
        plan.k = *cfg.svd_rank;
        check_rank(plan.k, m, n);
      } else if (cfg.svd_share <= 0.0) {
        plan.k = 0;
      } else if (!has_target) {
        throw Error(ErrorCode::invalid_config, "svd_wdr needs a target ratio or an explicit rank");
      } else {
        const auto choice = rank_for_ratio(m, n, std::pow(target, cfg.svd_share));
        plan.k = choice.k;
        plan.ratio_unreachable = choice.ratio_unreachable;
      }
      break;
  }
  plan.cr_svd = plan.k > 0 ? svd_compression_ratio({plan.k, m, n}) : 1.0;

  if (!has_target) return plan;
  if (cfg.accounting == RatioAccounting::nominal) {
    const double needed = target / plan.cr_svd;
    if (needed > 1.0) {
      const double coeffs =
          static_cast<double>(wdr_coeff_count(m, n, cfg.levels, cfg.include_approx));
      plan.wdr_budget = static_cast<std::size_t>(std::floor(coeffs / needed));
    }
  } else {
    const double side = cfg.include_approx ? 0.0 : 4.0 * static_cast<double>(approx_count(m, n, cfg.levels));
    const double allowed = std::floor(pixels / target) - static_cast<double>(kContainerHeaderBytes) - side;
    if (allowed < static_cast<double>(kWdrHeaderBytes)) plan.ratio_unreachable = true;
    plan.wdr_budget = static_cast<std::size_t>(std::max(allowed, 0.0));
  }
  return plan;
}

CompressionRatios compute_ratios(const Container& c) {
  const auto& h = c.header;
  CompressionRatios r;
  r.cr_svd = h.k > 0 ? svd_compression_ratio({h.k, h.m, h.n}) : 1.0;
  if (h.mode == Mode::svd_only || c.wdr_payload.empty()) {
    r.cr_wdr = 1.0;
  } else {
    const std::size_t coeffs = wdr_coeff_count(h.m, h.n, h.levels, h.include_approx);
    r.cr_wdr = static_cast<double>(coeffs) / static_cast<double>(c.wdr_payload.size());
  }
  r.cr_total = r.cr_svd * r.cr_wdr;
  const std::size_t bytes = kContainerHeaderBytes + 4 * c.approx.size() + c.wdr_payload.size();
  r.cr_measured = static_cast<double>(h.m) * static_cast<double>(h.n) / static_cast<double>(bytes);
  return r;
}

Container compress(const GrayImage& img, const CompressionConfig& cfg) {
  return compress(img, cfg, nullptr);
}

Container compress(const GrayImage& img, const CompressionConfig& cfg, const SvdFactors* factors) {
  const std::size_t m = img.height;
  const std::size_t n = img.width;
  const ParameterPlan plan = plan_parameters(m, n, cfg);

  Container c;
  c.header.mode = cfg.mode;
  c.header.m = static_cast<std::uint32_t>(m);
  c.header.n = static_cast<std::uint32_t>(n);
  c.header.k = static_cast<std::uint32_t>(plan.k);
  c.header.wavelet = cfg.wavelet;
  c.header.levels = static_cast<std::uint8_t>(cfg.levels);
  c.header.include_approx = cfg.include_approx;
  c.ratio_unreachable = plan.ratio_unreachable;

  RealMatrix working = to_real(img);
  if (plan.k > 0) {
    SvdFactors local;
    if (!factors) {
      local = svd_decompose(working);
      factors = &local;
    }
    if (factors->u.rows() != m || factors->v.rows() != n) {
      throw Error(ErrorCode::dimension_mismatch, "SVD factors do not match the image");
    }
    if (cfg.mode == Mode::svd_only) {
      const std::size_t k = plan.k;
      c.approx.reserve(factor_count(k, m, n));
      for (std::size_t i = 0; i < k; ++i) c.approx.push_back(static_cast<float>(factors->sigma[i]));
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t r = 0; r < m; ++r) c.approx.push_back(static_cast<float>(factors->u(r, i)));
      }
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t r = 0; r < n; ++r) c.approx.push_back(static_cast<float>(factors->v(r, i)));
      }
      c.ratios = compute_ratios(c);
      return c;
    }
    working = truncate_reconstruct(*factors, plan.k);
    if (cfg.requantize_svd) working = to_real(to_gray(working));
  }

  const CoeffPyramid pyramid = dwt2(working, cfg.levels, cfg.wavelet);
  const CoeffVector coeffs = linearize(pyramid, cfg.include_approx);
  if (!cfg.include_approx) {
    c.approx.reserve(pyramid.approx.size());
    for (double x : pyramid.approx.values()) c.approx.push_back(static_cast<float>(x));
  }
  WdrParams params = cfg.wdr;
  params.budget_bytes = plan.wdr_budget;
  if (cfg.wdr.budget_bytes) {
    params.budget_bytes = plan.wdr_budget ? std::min(*plan.wdr_budget, *cfg.wdr.budget_bytes)
                                          : *cfg.wdr.budget_bytes;
  }
  WdrStream stream = wdr_encode(coeffs.values, params);
  c.header.t0 = stream.t0;
  c.header.pass_count = static_cast<std::uint16_t>(stream.passes.size());
  c.wdr_payload = std::move(stream.serialized);
  c.ratios = compute_ratios(c);
  return c;
}

GrayImage decompress(const Container& c) {
  const auto& h = c.header;
  const std::size_t m = h.m;
  const std::size_t n = h.n;

  if (h.mode == Mode::svd_only) {
    const std::size_t k = h.k;
    if (k < 1 || k > std::min(m, n) || c.approx.size() != factor_count(k, m, n)) {
      throw Error(ErrorCode::shape_mismatch, "SVD factor payload does not match the header");
    }
    SvdFactors f;
    f.sigma.assign(c.approx.begin(), c.approx.begin() + static_cast<std::ptrdiff_t>(k));
    f.u = RealMatrix(m, k);
    f.v = RealMatrix(n, k);
    std::size_t pos = k;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t r = 0; r < m; ++r) f.u(r, i) = c.approx[pos++];
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t r = 0; r < n; ++r) f.v(r, i) = c.approx[pos++];
    }
    return to_gray(truncate_reconstruct(f, k));
  }

  const int levels = h.levels;
  const WdrStream stream = parse_wdr_stream(c.wdr_payload);
  CoeffVector coeffs;
  coeffs.includes_approx = h.include_approx;
  coeffs.shape_map = shape_map_for(m, n, levels, h.include_approx);
  coeffs.values = wdr_decode(stream);

  CoeffPyramid templ = zero_pyramid(m, n, levels, h.wavelet);
  if (!h.include_approx) {
    if (c.approx.size() != templ.approx.size()) {
      throw Error(ErrorCode::shape_mismatch, "approximation band size does not match the header");
    }
    auto dst = templ.approx.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = c.approx[i];
  }
  return to_gray(idwt2(delinearize(coeffs, templ)));
}

std::vector<std::uint8_t> serialize_container(const Container& c) {
  const auto& h = c.header;
  std::vector<std::uint8_t> out;
  out.reserve(kContainerHeaderBytes + 4 * c.approx.size() + c.wdr_payload.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  detail::ByteWriter w(out);
  w.u8(h.version);
  w.u8(static_cast<std::uint8_t>(h.mode));
  w.u32(h.m);
  w.u32(h.n);
  w.u32(h.k);
  w.u8(static_cast<std::uint8_t>(h.wavelet));
  w.u8(h.levels);
  w.u8(h.include_approx ? 1 : 0);
  w.f64(h.t0);
  w.u16(h.pass_count);
  w.u32(static_cast<std::uint32_t>(c.approx.size()));
  for (float x : c.approx) w.f32(x);
  w.bytes(c.wdr_payload);
  return out;
}

Container parse_container(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, ErrorCode::malformed_stream);
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(ErrorCode::malformed_stream, "not an SWDR container");
  }
  Container c;
  auto& h = c.header;
  h.version = r.u8();
  if (h.version != 1) throw Error(ErrorCode::malformed_stream, "unsupported container version");
  const std::uint8_t mode = r.u8();
  if (mode > 2) throw Error(ErrorCode::malformed_stream, "unknown mode");
  h.mode = static_cast<Mode>(mode);
  h.m = r.u32();
  h.n = r.u32();
  h.k = r.u32();
  const std::uint8_t wavelet = r.u8();
  if (wavelet > 1) throw Error(ErrorCode::malformed_stream, "unknown wavelet");
  h.wavelet = static_cast<WaveletFamily>(wavelet);
  h.levels = r.u8();
  const std::uint8_t approx_flag = r.u8();
  if (approx_flag > 1) throw Error(ErrorCode::malformed_stream, "bad include_approx flag");
  h.include_approx = approx_flag == 1;
  h.t0 = r.f64();
  h.pass_count = r.u16();
  const std::uint32_t approx_len = r.u32();
  if (h.m == 0 || h.n == 0) throw Error(ErrorCode::malformed_stream, "empty image dimensions");
  if (approx_len > r.remaining() / 4) throw Error(ErrorCode::malformed_stream, "approximation band truncated");
  c.approx.resize(approx_len);
  for (auto& x : c.approx) x = r.f32();
  const auto payload = r.rest();
  c.wdr_payload.assign(payload.begin(), payload.end());

  if (h.mode != Mode::svd_only) {
    const WdrStream stream = parse_wdr_stream(c.wdr_payload);
    if (stream.passes.size() != h.pass_count || stream.t0 != h.t0 ||
        stream.n_coeffs != wdr_coeff_count(h.m, h.n, h.levels, h.include_approx)) {
      throw Error(ErrorCode::malformed_stream, "WDR payload disagrees with the container header");
    }
  } else if (!c.wdr_payload.empty()) {
    throw Error(ErrorCode::malformed_stream, "svd_only container carries a WDR payload");
  }
  c.ratios = compute_ratios(c);
  return c;
}

Container truncate_passes(const Container& c, std::size_t passes) {
  if (c.header.mode == Mode::svd_only) return c;
  Container out = c;
  WdrStream stream = truncate_stream(parse_wdr_stream(c.wdr_payload), passes);
  out.header.pass_count = static_cast<std::uint16_t>(stream.passes.size());
  out.wdr_payload = std::move(stream.serialized);
  out.ratios = compute_ratios(out);
  return out;
}

}  // namespace swdr
