#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "swdr/bench.hpp"
#include "swdr/error.hpp"

namespace swdr {

namespace {

constexpr int kWidth = 760;
constexpr int kHeight = 440;
constexpr int kLeft = 70;
constexpr int kRight = 150;
constexpr int kTop = 50;
constexpr int kBottom = 60;

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string svg_open(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
                  "\" height=\"" + std::to_string(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(title) + "</text>\n";
  s += "<text class=\"x-label\" x=\"" + std::to_string(kLeft + (kWidth - kLeft - kRight) / 2) + "\" y=\"" +
       std::to_string(kHeight - 15) + "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
  s += "<text class=\"y-label\" x=\"18\" y=\"" + std::to_string(kTop + (kHeight - kTop - kBottom) / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       std::to_string(kTop + (kHeight - kTop - kBottom) / 2) + ")\">" + escape(ylabel) + "</text>\n";
  return s;
}

// Axis frame plus horizontal grid with five ticks from lo to hi.
std::string y_axis(double lo, double hi, const char* tick_fmt) {
  const int plot_h = kHeight - kTop - kBottom;
  std::string s;
  for (int t = 0; t <= 5; ++t) {
    const double v = lo + (hi - lo) * t / 5.0;
    const double y = kTop + plot_h - plot_h * t / 5.0;
    s += "<line x1=\"" + std::to_string(kLeft) + "\" x2=\"" + std::to_string(kWidth - kRight) +
         "\" y1=\"" + fmt("%.2f", y) + "\" y2=\"" + fmt("%.2f", y) + "\" stroke=\"#ddd\"/>\n";
    s += "<text x=\"" + std::to_string(kLeft - 6) + "\" y=\"" + fmt("%.2f", y + 4) +
         "\" text-anchor=\"end\">" + fmt(tick_fmt, v) + "</text>\n";
  }
  s += "<line x1=\"" + std::to_string(kLeft) + "\" x2=\"" + std::to_string(kLeft) + "\" y1=\"" +
       std::to_string(kTop) + "\" y2=\"" + std::to_string(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + std::to_string(kLeft) + "\" x2=\"" + std::to_string(kWidth - kRight) + "\" y1=\"" +
       std::to_string(kHeight - kBottom) + "\" y2=\"" + std::to_string(kHeight - kBottom) +
       "\" stroke=\"black\"/>\n";
  return s;
}

double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double step : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (step * mag >= v) return step * mag;
  }
  return 10.0 * mag;
}

ChartFile bar_chart(std::span<const ResultRow> rows, const std::string& metric, double ratio) {
  std::vector<std::string> images;
  std::vector<std::string> methods;
  std::map<std::pair<std::string, std::string>, double> values;
  for (const auto& r : rows) {
    if (r.target_ratio != ratio || r.error) continue;
    const double v = metric == "psnr" ? r.psnr : r.ssim;
    if (std::find(images.begin(), images.end(), r.image) == images.end()) images.push_back(r.image);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    values[{r.image, r.method}] = v;
  }
  std::sort(images.begin(), images.end());
  std::sort(methods.begin(), methods.end());

  double top = 0.0;
  for (const auto& [key, v] : values) {
    if (std::isfinite(v)) top = std::max(top, v);
  }
  const double hi = metric == "ssim" ? 1.0 : nice_ceiling(top * 1.1);
  const double lo = metric == "ssim" ? std::min(0.0, std::floor([&] {
    double m = 0.0;
    for (const auto& [key, v] : values) m = std::min(m, v);
    return m * 10.0;
  }()) / 10.0) : 0.0;

  const std::string ratio_label = fmt("%g", ratio);
  const std::string title = (metric == "psnr" ? "PSNR (dB)" : "SSIM") + std::string(" at ") + ratio_label + ":1";
  std::string s = svg_open(title, "image", metric == "psnr" ? "PSNR (dB)" : "SSIM");
  s += y_axis(lo, hi, metric == "psnr" ? "%.0f" : "%.1f");

  const int plot_w = kWidth - kLeft - kRight;
  const int plot_h = kHeight - kTop - kBottom;
  const double group_w = images.empty() ? plot_w : static_cast<double>(plot_w) / images.size();
  const double bar_w = methods.empty() ? 0.0 : group_w * 0.8 / methods.size();
  auto to_y = [&](double v) { return kTop + plot_h - plot_h * (v - lo) / (hi - lo); };

  for (std::size_t gi = 0; gi < images.size(); ++gi) {
    const double gx = kLeft + gi * group_w;
    s += "<text x=\"" + fmt("%.2f", gx + group_w / 2) + "\" y=\"" + std::to_string(kHeight - kBottom + 18) +
         "\" text-anchor=\"middle\">" + escape(images[gi]) + "</text>\n";
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto it = values.find({images[gi], methods[mi]});
      if (it == values.end()) continue;
      const double v = it->second;
      const double shown = std::isfinite(v) ? std::clamp(v, lo, hi) : hi;
      const double x = gx + group_w * 0.1 + mi * bar_w;
      const double y0 = to_y(std::max(lo, 0.0));
      const double y1 = to_y(shown);
      s += "<rect class=\"bar\" data-image=\"" + escape(images[gi]) + "\" data-method=\"" +
           escape(methods[mi]) + "\" data-value=\"" + format_real(v) + "\" x=\"" + fmt("%.2f", x) +
           "\" y=\"" + fmt("%.2f", std::min(y0, y1)) + "\" width=\"" + fmt("%.2f", bar_w * 0.92) +
           "\" height=\"" + fmt("%.2f", std::abs(y0 - y1)) + "\" fill=\"" + kPalette[mi % 8] + "\"/>\n";
      const std::string label = std::isfinite(v) ? fmt(metric == "psnr" ? "%.2f" : "%.3f", v) : "inf";
      s += "<text x=\"" + fmt("%.2f", x + bar_w * 0.46) + "\" y=\"" + fmt("%.2f", std::min(y0, y1) - 3) +
           "\" text-anchor=\"middle\" font-size=\"9\">" + label + "</text>\n";
    }
  }
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const int y = kTop + 10 + static_cast<int>(mi) * 18;
    s += "<rect x=\"" + std::to_string(kWidth - kRight + 12) + "\" y=\"" + std::to_string(y - 9) +
         "\" width=\"12\" height=\"12\" fill=\"" + kPalette[mi % 8] + "\"/>\n";
    s += "<text x=\"" + std::to_string(kWidth - kRight + 30) + "\" y=\"" + std::to_string(y + 1) + "\">" +
         escape(methods[mi]) + "</text>\n";
  }
  s += "</svg>\n";
  return {metric + "_" + ratio_label + ".svg", s};
}

}  // namespace

std::vector<ChartFile> render_charts(std::span<const ResultRow> rows) {
  std::set<double> ratios;
  for (const auto& r : rows) ratios.insert(r.target_ratio);
  std::vector<ChartFile> charts;
  for (const char* metric : {"psnr", "ssim"}) {
    for (double ratio : ratios) charts.push_back(bar_chart(rows, metric, ratio));
  }
  return charts;
}

ChartFile render_sweep_chart(std::span<const SweepRow> rows) {
  std::string s = svg_open("PSNR and compression ratio vs retained singular values",
                           "singular values kept (k)", "PSNR (dB)");
  double kmax = 1.0, pmax = 0.0;
  for (const auto& r : rows) {
    kmax = std::max(kmax, static_cast<double>(r.k));
    if (std::isfinite(r.psnr)) pmax = std::max(pmax, r.psnr);
  }
  const double hi = nice_ceiling(pmax * 1.1);
  s += y_axis(0.0, hi, "%.0f");
  const int plot_w = kWidth - kLeft - kRight;
  const int plot_h = kHeight - kTop - kBottom;
  auto to_x = [&](double k) { return kLeft + plot_w * k / kmax; };
  auto to_y = [&](double v) { return kTop + plot_h - plot_h * std::min(v, hi) / hi; };

  std::string points;
  for (const auto& r : rows) {
    const double y = to_y(std::isfinite(r.psnr) ? r.psnr : hi);
    points += fmt("%.2f", to_x(static_cast<double>(r.k))) + "," + fmt("%.2f", y) + " ";
  }
  if (!points.empty()) points.pop_back();
  s += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[0]) + "\" stroke-width=\"2\" points=\"" +
       points + "\"/>\n";
  for (const auto& r : rows) {
    const double x = to_x(static_cast<double>(r.k));
    const double y = to_y(std::isfinite(r.psnr) ? r.psnr : hi);
    s += "<circle class=\"point\" data-k=\"" + std::to_string(r.k) + "\" data-psnr=\"" + format_real(r.psnr) +
         "\" data-cr=\"" + format_real(r.cr_svd) + "\" cx=\"" + fmt("%.2f", x) + "\" cy=\"" + fmt("%.2f", y) +
         "\" r=\"3.5\" fill=\"" + kPalette[0] + "\"/>\n";
    s += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", y - 8) +
         "\" text-anchor=\"middle\" font-size=\"9\">CR " + fmt("%.1f", r.cr_svd) + "</text>\n";
    s += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + std::to_string(kHeight - kBottom + 16) +
         "\" text-anchor=\"middle\">" + std::to_string(r.k) + "</text>\n";
  }
  s += "</svg>\n";
  return {"sweep_psnr_k.svg", s};
}

void emit_charts(std::span<const ChartFile> charts, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_failure, "cannot create " + dir.string());
  for (const auto& c : charts) {
    const std::vector<std::uint8_t> bytes(c.svg.begin(), c.svg.end());
    write_file(dir / c.name, bytes);
  }
}

}  // namespace swdr
