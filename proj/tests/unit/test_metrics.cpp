#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "swdr/error.hpp"
#include "swdr/metrics.hpp"

using namespace swdr;

namespace {

// Raw-moment formulation: E[xy] - E[x]E[y] per window.
double ssim_raw_moments(const GrayImage& a, const GrayImage& b, std::size_t win) {
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  const double n = static_cast<double>(win * win);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t r0 = 0; r0 + win <= a.height; ++r0) {
    for (std::size_t c0 = 0; c0 + win <= a.width; ++c0) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (std::size_t r = r0; r < r0 + win; ++r) {
        for (std::size_t c = c0; c < c0 + win; ++c) {
          const double x = a.at(r, c), y = b.at(r, c);
          sx += x;
          sy += y;
          sxx += x * x;
          syy += y * y;
          sxy += x * y;
        }
      }
      const double mx = sx / n, my = sy / n;
      const double vx = sxx / n - mx * mx, vy = syy / n - my * my, cov = sxy / n - mx * my;
      total += (2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected swdr::Error");
  return ErrorCode::invalid_config;
}

}  // namespace

TEST_CASE("identical images") {
  std::mt19937 rng(83);
  const GrayImage a = test::random_image(rng, 20, 17);
  const QualityScores q = evaluate(a, a);
  CHECK(q.mse == 0.0);
  CHECK(std::isinf(q.psnr));
  CHECK(q.psnr > 0);
  CHECK(q.ssim == 1.0);
}

TEST_CASE("uniform offset") {
  const GrayImage a(16, 16, 100), b(16, 16, 110);
  CHECK(mse(a, b) == 100.0);
  CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(65025.0 / 100.0)));
  CHECK(psnr(a, b) == doctest::Approx(28.1308).epsilon(1e-5));
  const double c1 = std::pow(0.01 * 255, 2);
  CHECK(ssim(a, b) == doctest::Approx((2.0 * 100 * 110 + c1) / (100.0 * 100 + 110.0 * 110 + c1)));
}

TEST_CASE("psnr from mse") {
  CHECK(psnr_from_mse(1.0) == doctest::Approx(48.1308).epsilon(1e-5));
  CHECK(std::isinf(psnr_from_mse(0.0)));
  CHECK(psnr_from_mse(65025.0) == doctest::Approx(0.0));
}

TEST_CASE("ssim agrees with the raw-moment formulation") {
  std::mt19937 rng(89);
  for (int trial = 0; trial < 5; ++trial) {
    const GrayImage a = test::random_image(rng, 24, 19);
    GrayImage b = a;
    std::uniform_int_distribution<int> noise(-30, 30);
    for (auto& s : b.samples) s = static_cast<std::uint8_t>(std::clamp(int{s} + noise(rng), 0, 255));
    CHECK(ssim(a, b) == doctest::Approx(ssim_raw_moments(a, b, 8)).epsilon(1e-9));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-15));
    CHECK(ssim(a, b) < 1.0);
  }
}

TEST_CASE("ssim and psnr fall as distortion grows") {
  const GrayImage ref = test::synthetic_scene(64, 64);
  double last_ssim = 1.0, last_psnr = std::numeric_limits<double>::infinity();
  for (int amp : {2, 8, 32}) {
    std::mt19937 local(97);
    std::uniform_int_distribution<int> noise(-amp, amp);
    GrayImage b = ref;
    for (auto& s : b.samples) s = static_cast<std::uint8_t>(std::clamp(int{s} + noise(local), 0, 255));
    const QualityScores q = evaluate(ref, b);
    CHECK(q.ssim < last_ssim);
    CHECK(q.psnr < last_psnr);
    last_ssim = q.ssim;
    last_psnr = q.psnr;
  }
}

TEST_CASE("metric errors") {
  const GrayImage a(8, 8), b(8, 9), small(7, 20);
  CHECK(code_of([&] { mse(a, b); }) == ErrorCode::dimension_mismatch);
  CHECK(code_of([&] { psnr(a, b); }) == ErrorCode::dimension_mismatch);
  CHECK(code_of([&] { ssim(a, b); }) == ErrorCode::dimension_mismatch);
  CHECK(code_of([&] { ssim(small, small); }) == ErrorCode::image_too_small);
  CHECK_NOTHROW(ssim(a, a));
}
