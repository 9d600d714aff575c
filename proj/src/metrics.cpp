#include "swdr/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "swdr/error.hpp"

namespace swdr {

namespace {

void check_same_size(const GrayImage& a, const GrayImage& b) {
  if (a.height != b.height || a.width != b.width) {
    throw Error(ErrorCode::dimension_mismatch,
                std::to_string(a.height) + "x" + std::to_string(a.width) + " vs " +
                    std::to_string(b.height) + "x" + std::to_string(b.width));
  }
}

}  // namespace

double mse(const GrayImage& a, const GrayImage& b) {
  check_same_size(a, b);
  if (a.samples.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - static_cast<double>(b.samples[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.samples.size());
}

double psnr_from_mse(double mse) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double psnr(const GrayImage& a, const GrayImage& b) { return psnr_from_mse(mse(a, b)); }

double ssim(const GrayImage& a, const GrayImage& b, SsimOptions options) {
  check_same_size(a, b);
  const std::size_t win = options.window;
  if (win == 0 || a.height < win || a.width < win) {
    throw Error(ErrorCode::image_too_small, "image smaller than the SSIM window");
  }
  const double c1 = (options.k1 * options.dynamic_range) * (options.k1 * options.dynamic_range);
  const double c2 = (options.k2 * options.dynamic_range) * (options.k2 * options.dynamic_range);
  const double count = static_cast<double>(win * win);

  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t r0 = 0; r0 + win <= a.height; ++r0) {
    for (std::size_t c0 = 0; c0 + win <= a.width; ++c0) {
      double sx = 0.0, sy = 0.0;
      for (std::size_t r = r0; r < r0 + win; ++r) {
        for (std::size_t c = c0; c < c0 + win; ++c) {
          sx += a.at(r, c);
          sy += b.at(r, c);
        }
      }
      const double mx = sx / count;
      const double my = sy / count;
      // Centered sums keep ssim(x, x) exactly 1 and the result symmetric.
      double vx = 0.0, vy = 0.0, cov = 0.0;
      for (std::size_t r = r0; r < r0 + win; ++r) {
        for (std::size_t c = c0; c < c0 + win; ++c) {
          const double dx = a.at(r, c) - mx;
          const double dy = b.at(r, c) - my;
          vx += dx * dx;
          vy += dy * dy;
          cov += dx * dy;
        }
      }
      vx /= count;
      vy /= count;
      cov /= count;
      const double luminance = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
      const double structure = (2.0 * cov + c2) / (vx + vy + c2);
      total += luminance * structure;
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

QualityScores evaluate(const GrayImage& reference, const GrayImage& test) {
  QualityScores q;
  q.mse = mse(reference, test);
  q.psnr = psnr_from_mse(q.mse);
  q.ssim = ssim(reference, test);
  return q;
}

}  // namespace swdr
