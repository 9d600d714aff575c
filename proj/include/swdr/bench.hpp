#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swdr/image_io.hpp"
#include "swdr/pipeline.hpp"

namespace swdr {

struct ExperimentSpec {
  std::filesystem::path corpus_dir;
  std::vector<double> ratios{20.0, 40.0, 80.0};
  // Method ids: svd_wdr, wdr_only, svd_only, external.
  std::vector<std::string> methods{"svd_wdr", "wdr_only"};
  CompressionConfig base;  // target_ratio and mode are set per row
  std::optional<std::string> baseline_cmd;
  std::optional<std::filesystem::path> baseline_csv;  // precomputed rows, appended as-is
  bool timing = false;  // when false the ms column is written as 0
};

struct ResultRow {
  std::string image;
  std::string method;
  double target_ratio = 0.0;
  double cr_paper = 0.0;
  double cr_measured = 0.0;
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  double ms = 0.0;
  std::optional<std::string> error;  // set when the row failed
};

inline constexpr const char* kCsvHeader = "image,method,target_ratio,cr_paper,cr_measured,mse,psnr_db,ssim,ms";

/// Images (*.pgm, *.png) in the corpus directory, sorted by file name.
std::vector<std::filesystem::path> list_corpus(const std::filesystem::path& dir);

/// One row per (image, method, ratio), sorted by (image, method, ratio).
/// Per-row failures are recorded in ResultRow::error; throws
/// Error{empty_corpus} when the directory holds no images.
std::vector<ResultRow> run_experiments(const ExperimentSpec& spec);

/// Runs a single (image, method, ratio) cell. `factors` may carry a cached SVD.
ResultRow run_method(const std::string& image_id, const GrayImage& img, const std::string& method,
                     double ratio, const CompressionConfig& base, const SvdFactors* factors,
                     bool timing);

struct SweepRow {
  std::size_t k = 0;
  double cr_svd = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
};

/// svd_only reconstructions at each k from a single decomposition.
/// Throws Error{rank_out_of_range} for k outside [1, min(m, n)].
std::vector<SweepRow> sweep_rank_curve(const GrayImage& img, std::span<const std::size_t> ks);

/// Runs `command_template` with {in}, {out}, {bytes} and optional {cmp}
/// substituted. {in} is a PGM written by the harness; {out} must be the
/// decoded PGM. Measured CR is input PGM size over the size of {cmp} when
/// present, else of {out}. Failures become an error row.
ResultRow external_baseline(const std::string& image_id, const GrayImage& img, double ratio,
                            const std::string& command_template,
                            const std::filesystem::path& work_dir, bool timing = false);

std::string format_real(double v);
std::string rows_to_csv(std::span<const ResultRow> rows);
std::vector<ResultRow> parse_csv(const std::string& text);
std::string sweep_to_csv(std::span<const SweepRow> rows);

struct ChartFile {
  std::string name;
  std::string svg;
};

/// Grouped bars (x: images, bars: methods) per (metric, ratio), metrics psnr and ssim.
std::vector<ChartFile> render_charts(std::span<const ResultRow> rows);
ChartFile render_sweep_chart(std::span<const SweepRow> rows);
void emit_charts(std::span<const ChartFile> charts, const std::filesystem::path& dir);

}  // namespace swdr
