// swdr: command-line front end for the SVD + WDR codec and its benchmark.
//
//   swdr compress <in.pgm> <out.swdr> --ratio R [codec flags]
//   swdr decompress <in.swdr> <out.pgm>
//   swdr eval <a.pgm> <b.pgm>
//   swdr sweep --image path --ks 5,10,20
//   swdr bench --corpus dir --ratios 20,40,80 --methods svd_wdr,wdr_only --out results.csv
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 codec error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "swdr/bench.hpp"
#include "swdr/error.hpp"
#include "swdr/metrics.hpp"
#include "swdr/pipeline.hpp"

namespace {

using swdr::ErrorCode;
using json = nlohmann::ordered_json;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitCodec = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_config: return kExitUsage;
    case ErrorCode::io_failure:
    case ErrorCode::unsupported_format:
    case ErrorCode::corrupt_file:
    case ErrorCode::empty_corpus: return kExitIo;
    default: return kExitCodec;
  }
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json jnum(double v) {
  if (!std::isfinite(v)) return num(v);
  return v;
}

// Flags shared by compress and bench; applied to a CompressionConfig after parsing.
struct CodecFlags {
  std::optional<std::size_t> k;
  int passes = 9;
  std::string wavelet = "haar";
  int levels = 3;
  bool include_approx = false;
  std::string mode = "svd_wdr";
  double svd_share = 0.5;
  std::string t0_rule = "max";
  std::optional<double> t0;
  std::string reconstruction = "floor";
  std::string accounting = "nominal";
  bool requantize_svd = false;
  std::optional<std::size_t> budget_bytes;
  bool fill_budget = false;

  void add_to(CLI::App& app, bool with_mode) {
    app.add_option("--k", k, "Singular values kept (overrides --svd-share)");
    app.add_option("--passes", passes, "Maximum WDR bit-plane passes")->capture_default_str();
    app.add_option("--wavelet", wavelet, "Wavelet family")
        ->check(CLI::IsMember({"haar", "cdf53"}))->capture_default_str();
    app.add_option("--levels", levels, "Wavelet decomposition depth")->capture_default_str();
    app.add_flag("--include-approx", include_approx,
                 "Code the approximation band with WDR instead of storing it as float32");
    if (with_mode) {
      app.add_option("--mode", mode, "Pipeline mode")
          ->check(CLI::IsMember({"svd_wdr", "wdr_only", "svd_only"}))->capture_default_str();
    }
    app.add_option("--svd-share", svd_share,
                   "Exponent of the target ratio assigned to the SVD stage, in [0,1]")
        ->capture_default_str();
    app.add_option("--t0-rule", t0_rule, "Initial threshold rule")
        ->check(CLI::IsMember({"max", "pow2", "explicit"}))->capture_default_str();
    app.add_option("--t0", t0, "Initial threshold (implies --t0-rule explicit)");
    app.add_option("--reconstruction", reconstruction, "Decoder magnitude rule")
        ->check(CLI::IsMember({"floor", "midpoint"}))->capture_default_str();
    app.add_option("--accounting", accounting,
                   "Ratio budget: nominal (cr_svd * cr_wdr) or measured (file size)")
        ->check(CLI::IsMember({"nominal", "measured"}))->capture_default_str();
    app.add_flag("--requantize-svd", requantize_svd, "Round the rank-k image to 8 bits before the DWT");
    app.add_option("--budget-bytes", budget_bytes, "Hard cap on the WDR payload size");
    app.add_flag("--fill-budget", fill_budget,
                 "Spend leftover budget on a partial final pass instead of stopping at a pass boundary");
  }

  swdr::CompressionConfig to_config(double ratio) const {
    swdr::CompressionConfig cfg;
    cfg.target_ratio = ratio;
    cfg.svd_rank = k;
    cfg.svd_share = svd_share;
    cfg.wavelet = swdr::parse_wavelet(wavelet);
    cfg.levels = levels;
    cfg.include_approx = include_approx;
    cfg.mode = swdr::parse_mode(mode);
    cfg.accounting = swdr::parse_accounting(accounting);
    cfg.requantize_svd = requantize_svd;
    cfg.wdr.passes = passes;
    cfg.wdr.t0_rule = t0 ? swdr::ThresholdRule::explicit_ : swdr::parse_threshold_rule(t0_rule);
    cfg.wdr.explicit_t0 = t0.value_or(0.0);
    cfg.wdr.reconstruction = swdr::parse_reconstruction(reconstruction);
    cfg.wdr.budget_bytes = budget_bytes;
    cfg.wdr.fill_budget = fill_budget;
    return cfg;
  }
};

json row_json(const swdr::ResultRow& r) {
  json j;
  j["image"] = r.image;
  j["method"] = r.method;
  j["target_ratio"] = r.target_ratio;
  if (r.error) {
    j["error"] = *r.error;
  } else {
    j["cr_paper"] = jnum(r.cr_paper);
    j["cr_measured"] = jnum(r.cr_measured);
    j["mse"] = jnum(r.mse);
    j["psnr_db"] = jnum(r.psnr);
    j["ssim"] = jnum(r.ssim);
  }
  j["ms"] = r.ms;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  swdr::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SVD + wavelet difference reduction image codec"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output, one JSON object per result");

  // compress
  auto* compress = app.add_subcommand("compress", "Encode a grayscale image into a .swdr container");
  std::string c_in, c_out;
  double c_ratio = 0.0;
  CodecFlags c_flags;
  compress->add_option("input", c_in, "Input PGM or PNG")->required();
  compress->add_option("output", c_out, "Output .swdr file")->required();
  compress->add_option("--ratio", c_ratio, "Target compression ratio, e.g. 20 for 20:1");
  c_flags.add_to(*compress, true);

  // decompress
  auto* decompress = app.add_subcommand("decompress", "Decode a .swdr container into a PGM");
  std::string d_in, d_out;
  decompress->add_option("input", d_in, "Input .swdr file")->required();
  decompress->add_option("output", d_out, "Output PGM")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Print MSE, PSNR and SSIM between two images");
  std::string e_a, e_b;
  eval->add_option("reference", e_a, "Reference image")->required();
  eval->add_option("test", e_b, "Test image")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "PSNR and SVD ratio over a list of retained ranks");
  std::string s_image, s_out, s_charts;
  std::vector<std::size_t> s_ks;
  sweep->add_option("--image", s_image, "Input image")->required();
  sweep->add_option("--ks", s_ks, "Comma-separated ranks")->delimiter(',')->required();
  sweep->add_option("--out", s_out, "CSV output (default: standard output)");
  sweep->add_option("--charts", s_charts, "Directory for the SVG curve");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a corpus through every method and ratio");
  std::string b_corpus, b_out, b_charts, b_cmd, b_csv;
  std::vector<double> b_ratios{20.0, 40.0, 80.0};
  std::vector<std::string> b_methods{"svd_wdr", "wdr_only"};
  bool b_timing = false;
  CodecFlags b_flags;
  bench->add_option("--corpus", b_corpus, "Directory of .pgm/.png images")->required();
  bench->add_option("--ratios", b_ratios, "Comma-separated target ratios")->delimiter(',')->capture_default_str();
  bench->add_option("--methods", b_methods, "Comma-separated methods")
      ->delimiter(',')
      ->check(CLI::IsMember({"svd_wdr", "wdr_only", "svd_only", "external"}))
      ->capture_default_str();
  bench->add_option("--baseline-cmd", b_cmd,
                    "External codec command; placeholders {in} {out} {bytes} {cmp}");
  bench->add_option("--baseline-csv", b_csv, "Precomputed baseline rows to merge");
  bench->add_option("--out", b_out, "Results CSV")->required();
  bench->add_option("--charts", b_charts, "Directory for SVG charts");
  bench->add_flag("--timing", b_timing, "Record wall time per row (makes the CSV non-reproducible)");
  b_flags.add_to(*bench, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (compress->parsed()) {
      if (c_ratio <= 0.0 && !(c_flags.k || c_flags.mode == "wdr_only")) {
        std::cerr << "error: --ratio is required unless --k is given\n\n" << compress->help();
        return kExitUsage;
      }
      const swdr::GrayImage img = swdr::load_image(c_in);
      const swdr::Container c = swdr::compress(img, c_flags.to_config(c_ratio));
      swdr::write_file(c_out, swdr::serialize_container(c));
      const auto& r = c.ratios;
      if (as_json) {
        json j;
        j["k"] = c.header.k;
        j["passes"] = c.header.pass_count;
        j["cr_svd"] = jnum(r.cr_svd);
        j["cr_wdr"] = jnum(r.cr_wdr);
        j["cr_paper"] = jnum(r.cr_total);
        j["cr_measured"] = jnum(r.cr_measured);
        j["ratio_unreachable"] = c.ratio_unreachable;
        std::cout << j.dump() << "\n";
      } else {
        std::cout << "k=" << c.header.k << " passes=" << c.header.pass_count << " cr_svd=" << num(r.cr_svd)
                  << " cr_wdr=" << num(r.cr_wdr) << " cr_paper=" << num(r.cr_total)
                  << " cr_measured=" << num(r.cr_measured) << "\n";
      }
      if (c.ratio_unreachable) std::cerr << "warning: target ratio unreachable with these settings\n";
      return 0;
    }
    if (decompress->parsed()) {
      const auto bytes = swdr::read_file(d_in);
      swdr::write_image(swdr::decompress(swdr::parse_container(bytes)), d_out);
      return 0;
    }
    if (eval->parsed()) {
      const auto q = swdr::evaluate(swdr::load_image(e_a), swdr::load_image(e_b));
      if (as_json) {
        json j;
        j["mse"] = jnum(q.mse);
        j["psnr_db"] = jnum(q.psnr);
        j["ssim"] = jnum(q.ssim);
        std::cout << j.dump() << "\n";
      } else {
        std::cout << "mse=" << num(q.mse) << " psnr=" << num(q.psnr) << " ssim=" << num(q.ssim) << "\n";
      }
      return 0;
    }
    if (sweep->parsed()) {
      const auto rows = swdr::sweep_rank_curve(swdr::load_image(s_image), s_ks);
      if (as_json) {
        for (const auto& r : rows) {
          json j;
          j["k"] = r.k;
          j["cr_svd"] = jnum(r.cr_svd);
          j["psnr_db"] = jnum(r.psnr);
          j["ssim"] = jnum(r.ssim);
          std::cout << j.dump() << "\n";
        }
      }
      const std::string csv = swdr::sweep_to_csv(rows);
      if (!s_out.empty()) {
        write_text(s_out, csv);
      } else if (!as_json) {
        std::cout << csv;
      }
      if (!s_charts.empty()) {
        const std::vector<swdr::ChartFile> charts{swdr::render_sweep_chart(rows)};
        swdr::emit_charts(charts, s_charts);
      }
      return 0;
    }
    if (bench->parsed()) {
      swdr::ExperimentSpec spec;
      spec.corpus_dir = b_corpus;
      spec.ratios = b_ratios;
      spec.methods = b_methods;
      spec.base = b_flags.to_config(0.0);
      if (!b_cmd.empty()) spec.baseline_cmd = b_cmd;
      if (!b_csv.empty()) spec.baseline_csv = b_csv;
      spec.timing = b_timing;
      const auto rows = swdr::run_experiments(spec);
      write_text(b_out, swdr::rows_to_csv(rows));
      if (!b_charts.empty()) swdr::emit_charts(swdr::render_charts(rows), b_charts);
      for (const auto& r : rows) {
        if (as_json) std::cout << row_json(r).dump() << "\n";
        if (r.error) std::cerr << r.image << " " << r.method << " " << r.target_ratio << ": " << *r.error << "\n";
      }
      return 0;
    }
  } catch (const swdr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCodec;
  }
  return kExitUsage;
}
