#pragma once

#include <cstddef>

#include "swdr/image_io.hpp"

namespace swdr {

struct QualityScores {
  double mse = 0.0;
  double psnr = 0.0;  // +inf when mse == 0
  double ssim = 1.0;
};

struct SsimOptions {
  std::size_t window = 8;  // square, uniform weights, stride 1
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

// All three throw Error{dimension_mismatch} when the images differ in size.
double mse(const GrayImage& a, const GrayImage& b);
double psnr(const GrayImage& a, const GrayImage& b);
double psnr_from_mse(double mse);
// Throws Error{image_too_small} when either side is shorter than the window.
double ssim(const GrayImage& a, const GrayImage& b, SsimOptions options = {});

QualityScores evaluate(const GrayImage& reference, const GrayImage& test);

}  // namespace swdr
