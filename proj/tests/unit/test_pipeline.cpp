#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "swdr/error.hpp"
#include "swdr/metrics.hpp"
#include "swdr/pipeline.hpp"

using namespace swdr;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected swdr::Error");
  return ErrorCode::invalid_config;
}

CompressionConfig with_target(double target, Mode mode) {
  CompressionConfig cfg;
  cfg.target_ratio = target;
  cfg.mode = mode;
  return cfg;
}

// Largest k with mn / (k (1 + m + n)) >= target, by scanning.
std::size_t scan_rank(std::size_t m, std::size_t n, double target) {
  std::size_t best = 0;
  for (std::size_t k = 1; k <= std::min(m, n); ++k) {
    if (static_cast<double>(m * n) / static_cast<double>(k * (1 + m + n)) >= target) best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("plan: geometric split at share 0.5") {
  const ParameterPlan plan = plan_parameters(512, 512, with_target(20.0, Mode::svd_wdr));
  CHECK(plan.k == scan_rank(512, 512, std::sqrt(20.0)));
  CHECK(plan.k == 57);
  CHECK(plan.cr_svd == doctest::Approx(262144.0 / (57.0 * 1025.0)));
  REQUIRE(plan.wdr_budget);
  const double coeffs = 262144.0 - 64.0 * 64.0;
  CHECK(*plan.wdr_budget == static_cast<std::size_t>(std::floor(coeffs / (20.0 / plan.cr_svd))));
  CHECK(plan.cr_svd * coeffs / static_cast<double>(*plan.wdr_budget) >= 20.0);
}

TEST_CASE("plan: share 0 matches wdr_only") {
  CompressionConfig cfg = with_target(20.0, Mode::svd_wdr);
  cfg.svd_share = 0.0;
  const ParameterPlan a = plan_parameters(512, 512, cfg);
  const ParameterPlan b = plan_parameters(512, 512, with_target(20.0, Mode::wdr_only));
  CHECK(a.k == 0);
  CHECK(b.k == 0);
  CHECK(a.cr_svd == 1.0);
  CHECK(a.wdr_budget == b.wdr_budget);
  CHECK(*a.wdr_budget == (262144 - 4096) / 20);
}

TEST_CASE("plan: share 1 lets the SVD meet the target alone") {
  CompressionConfig cfg = with_target(20.0, Mode::svd_wdr);
  cfg.svd_share = 1.0;
  cfg.wdr.passes = 12;
  const ParameterPlan plan = plan_parameters(512, 512, cfg);
  CHECK(plan.k == 12);
  CHECK(plan.cr_svd >= 20.0);
  CHECK_FALSE(plan.wdr_budget);
  CHECK(plan.passes == 12);
}

TEST_CASE("plan: measured accounting budgets the whole container") {
  CompressionConfig cfg = with_target(20.0, Mode::wdr_only);
  cfg.accounting = RatioAccounting::measured;
  cfg.include_approx = true;
  const ParameterPlan plan = plan_parameters(512, 512, cfg);
  REQUIRE(plan.wdr_budget);
  CHECK(*plan.wdr_budget == 262144 / 20 - kContainerHeaderBytes);
  // The raw approximation band (4096 floats) comes out of the same budget.
  cfg.include_approx = false;
  CHECK(*plan_parameters(512, 512, cfg).wdr_budget == 0);
  CHECK(plan_parameters(512, 512, cfg).ratio_unreachable);
  cfg.target_ratio = 10.0;
  CHECK(*plan_parameters(512, 512, cfg).wdr_budget == 262144 / 10 - kContainerHeaderBytes - 4 * 4096);
}

TEST_CASE("plan: invalid configurations") {
  CompressionConfig cfg = with_target(20.0, Mode::svd_wdr);
  cfg.svd_share = 1.5;
  CHECK(code_of([&] { plan_parameters(64, 64, cfg); }) == ErrorCode::invalid_config);
  cfg = CompressionConfig{};
  cfg.mode = Mode::svd_only;
  CHECK(code_of([&] { plan_parameters(64, 64, cfg); }) == ErrorCode::invalid_config);
  cfg.svd_rank = 65;
  CHECK(code_of([&] { plan_parameters(64, 64, cfg); }) == ErrorCode::rank_out_of_range);
  CHECK(plan_parameters(64, 64, with_target(1e6, Mode::svd_only)).ratio_unreachable);
}

TEST_CASE("svd_only at full rank is lossless") {
  const GrayImage img = test::synthetic_scene(48, 40);
  CompressionConfig cfg;
  cfg.mode = Mode::svd_only;
  cfg.svd_rank = 40;
  const Container c = compress(img, cfg);
  CHECK(c.header.k == 40);
  CHECK(c.approx.size() == 40u * (1 + 48 + 40));
  CHECK(c.wdr_payload.empty());
  CHECK(decompress(c) == img);
  CHECK(decompress(parse_container(serialize_container(c))) == img);
}

TEST_CASE("wdr_only with the approximation band coded and many passes is lossless") {
  const GrayImage img = test::synthetic_scene(64, 64);
  for (auto family : {WaveletFamily::haar, WaveletFamily::cdf53}) {
    CompressionConfig cfg;
    cfg.mode = Mode::wdr_only;
    cfg.include_approx = true;
    cfg.wavelet = family;
    cfg.wdr.passes = 30;
    const Container c = compress(img, cfg);
    CHECK(c.approx.empty());
    CHECK(decompress(c) == img);
  }
}

TEST_CASE("svd_wdr round trip, header and ratio bookkeeping") {
  const GrayImage img = test::synthetic_scene(64, 64);
  CompressionConfig cfg;
  cfg.svd_rank = 20;
  cfg.wdr.passes = 8;
  const Container c = compress(img, cfg);
  CHECK(c.header.k == 20);
  CHECK(c.header.pass_count == 8);
  CHECK(c.approx.size() == 64);
  const auto bytes = serialize_container(c);
  CHECK(bytes.size() == kContainerHeaderBytes + 4 * 64 + c.wdr_payload.size());
  const Container back = parse_container(bytes);
  CHECK(back.header == c.header);
  CHECK(back.approx == c.approx);
  CHECK(back.wdr_payload == c.wdr_payload);
  CHECK(decompress(back) == decompress(c));

  CHECK(c.ratios.cr_svd == doctest::Approx(4096.0 / (20.0 * 129.0)));
  CHECK(c.ratios.cr_wdr == doctest::Approx((4096.0 - 64.0) / static_cast<double>(c.wdr_payload.size())));
  CHECK(c.ratios.cr_total == doctest::Approx(c.ratios.cr_svd * c.ratios.cr_wdr));
  CHECK(c.ratios.cr_measured == doctest::Approx(4096.0 / static_cast<double>(bytes.size())));
  CHECK(psnr(img, decompress(c)) > 20.0);
}

TEST_CASE("ratio targets are met under both accountings") {
  const GrayImage img = test::synthetic_scene(128, 128);
  for (double target : {8.0, 20.0, 40.0}) {
    for (Mode mode : {Mode::svd_wdr, Mode::wdr_only}) {
      CompressionConfig cfg = with_target(target, mode);
      const Container nominal = compress(img, cfg);
      CHECK(nominal.ratios.cr_total >= target);
      cfg.accounting = RatioAccounting::measured;
      cfg.include_approx = true;
      const Container measured = compress(img, cfg);
      if (!measured.ratio_unreachable) CHECK(measured.ratios.cr_measured >= target);
    }
  }
}

TEST_CASE("compression is deterministic") {
  const GrayImage img = test::synthetic_scene(64, 64);
  const CompressionConfig cfg = with_target(20.0, Mode::svd_wdr);
  CHECK(serialize_container(compress(img, cfg)) == serialize_container(compress(img, cfg)));
}

TEST_CASE("dropping passes equals encoding fewer passes") {
  const GrayImage img = test::synthetic_scene(64, 64);
  CompressionConfig cfg;
  cfg.svd_rank = 16;
  cfg.wdr.passes = 10;
  const Container full = compress(img, cfg);
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t p = 1; p <= 10; ++p) {
    CompressionConfig fewer = cfg;
    fewer.wdr.passes = static_cast<int>(p);
    const Container cut = truncate_passes(full, p);
    CHECK(serialize_container(cut) == serialize_container(compress(img, fewer)));
    const double err = mse(img, decompress(cut));
    CHECK(err <= last + 1e-9);
    last = err;
  }
}

TEST_CASE("a black image survives every mode") {
  const GrayImage black(32, 32, 0);
  for (Mode mode : {Mode::svd_wdr, Mode::wdr_only, Mode::svd_only}) {
    CompressionConfig cfg = with_target(20.0, mode);
    const Container c = compress(black, cfg);
    CHECK(decompress(parse_container(serialize_container(c))) == black);
  }
}

TEST_CASE("container parse errors") {
  const GrayImage img = test::synthetic_scene(32, 32);
  const auto good = serialize_container(compress(img, with_target(10.0, Mode::wdr_only)));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(code_of([&] { parse_container(bad_magic); }) == ErrorCode::malformed_stream);

  auto bad_version = good;
  bad_version[4] = 2;
  CHECK(code_of([&] { parse_container(bad_version); }) == ErrorCode::malformed_stream);

  const std::vector<std::uint8_t> truncated(good.begin(), good.begin() + 20);
  CHECK(code_of([&] { parse_container(truncated); }) == ErrorCode::malformed_stream);

  auto trailing = good;
  trailing.push_back(0);
  CHECK(code_of([&] { parse_container(trailing); }) == ErrorCode::malformed_stream);

  // t0 lives at bytes 21..28; disturb it so the payload disagrees.
  auto bad_t0 = good;
  bad_t0[21] ^= 1;
  CHECK(code_of([&] { parse_container(bad_t0); }) == ErrorCode::malformed_stream);

  CHECK(code_of([&] { parse_container(std::vector<std::uint8_t>{}); }) == ErrorCode::malformed_stream);
}

TEST_CASE("filling the budget lands on the requested measured ratio") {
  const GrayImage img = test::synthetic_scene(128, 128);
  for (Mode mode : {Mode::svd_wdr, Mode::wdr_only}) {
    CompressionConfig cfg = with_target(20.0, mode);
    cfg.accounting = RatioAccounting::measured;
    cfg.include_approx = true;
    cfg.wdr.passes = 48;
    cfg.wdr.fill_budget = true;
    const Container c = compress(img, cfg);
    const auto bytes = serialize_container(c);
    CHECK(bytes.size() <= 16384 / 20);
    CHECK(bytes.size() + 8 >= 16384 / 20);
    CHECK(c.ratios.cr_measured >= 20.0);
    CHECK(decompress(parse_container(bytes)) == decompress(c));
  }
}
