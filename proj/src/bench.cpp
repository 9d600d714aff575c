#include "swdr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "swdr/error.hpp"
#include "swdr/metrics.hpp"

namespace swdr {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".png";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

ResultRow error_row(const std::string& image, const std::string& method, double ratio,
                    const std::string& message) {
  ResultRow row;
  row.image = image;
  row.method = method;
  row.target_ratio = ratio;
  row.error = message;
  return row;
}

std::string ratio_tag(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", ratio);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_real(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error(ErrorCode::corrupt_file, "bad number '" + s + "' in CSV");
  return v;
}

}  // namespace

std::vector<fs::path> list_corpus(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::io_failure, "corpus directory " + dir.string() + " not found");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

ResultRow run_method(const std::string& image_id, const GrayImage& img, const std::string& method,
                     double ratio, const CompressionConfig& base, const SvdFactors* factors,
                     bool timing) {
  try {
    CompressionConfig cfg = base;
    cfg.mode = parse_mode(method);
    cfg.target_ratio = ratio;
    const auto start = Clock::now();
    const Container c = compress(img, cfg, timing ? nullptr : factors);
    const auto bytes = serialize_container(c);
    const GrayImage out = decompress(parse_container(bytes));
    const double ms = elapsed_ms(start);
    const QualityScores q = evaluate(img, out);

    ResultRow row;
    row.image = image_id;
    row.method = method;
    row.target_ratio = ratio;
    row.cr_paper = c.ratios.cr_total;
    row.cr_measured = c.ratios.cr_measured;
    row.mse = q.mse;
    row.psnr = q.psnr;
    row.ssim = q.ssim;
    row.ms = timing ? ms : 0.0;
    return row;
  } catch (const std::exception& e) {
    return error_row(image_id, method, ratio, e.what());
  }
}

ResultRow external_baseline(const std::string& image_id, const GrayImage& img, double ratio,
                            const std::string& command_template, const fs::path& work_dir,
                            bool timing) {
  const std::string method = "external";
  try {
    fs::create_directories(work_dir);
    const std::string stem = image_id + "_" + ratio_tag(ratio);
    const fs::path in = work_dir / (stem + "_in.pgm");
    const fs::path out = work_dir / (stem + "_out.pgm");
    const fs::path cmp = work_dir / (stem + "_cmp.bin");
    fs::remove(out);
    fs::remove(cmp);
    write_image(img, in);
    const auto budget = static_cast<std::size_t>(
        std::floor(static_cast<double>(img.height * img.width) / ratio));

    std::string cmd = command_template;
    replace_all(cmd, "{in}", in.string());
    replace_all(cmd, "{out}", out.string());
    replace_all(cmd, "{cmp}", cmp.string());
    replace_all(cmd, "{bytes}", std::to_string(budget));
    cmd += " >/dev/null 2>&1";

    const auto start = Clock::now();
    const int status = std::system(cmd.c_str());
    const double ms = elapsed_ms(start);
    if (status != 0) {
      throw Error(ErrorCode::external_tool_failure,
                  "command exited with status " + std::to_string(status));
    }
    if (!fs::exists(out)) throw Error(ErrorCode::external_tool_failure, "command produced no output");
    const GrayImage decoded = load_image(out);
    const bool has_cmp = command_template.find("{cmp}") != std::string::npos;
    const auto artifact = fs::file_size(has_cmp ? cmp : out);
    if (artifact == 0) throw Error(ErrorCode::external_tool_failure, "empty compressed artifact");
    const QualityScores q = evaluate(img, decoded);

    ResultRow row;
    row.image = image_id;
    row.method = method;
    row.target_ratio = ratio;
    row.cr_measured = static_cast<double>(fs::file_size(in)) / static_cast<double>(artifact);
    row.cr_paper = row.cr_measured;
    row.mse = q.mse;
    row.psnr = q.psnr;
    row.ssim = q.ssim;
    row.ms = timing ? ms : 0.0;
    return row;
  } catch (const std::exception& e) {
    return error_row(image_id, method, ratio, e.what());
  }
}

std::vector<ResultRow> run_experiments(const ExperimentSpec& spec) {
  const auto files = list_corpus(spec.corpus_dir);
  if (files.empty()) {
    throw Error(ErrorCode::empty_corpus, "no .pgm or .png images in " + spec.corpus_dir.string());
  }
  for (double r : spec.ratios) {
    if (!(r > 1.0)) throw Error(ErrorCode::invalid_config, "ratios must exceed 1");
  }
  std::vector<ResultRow> rows;
  const fs::path work = fs::temp_directory_path() / "swdr_baseline";

  for (const auto& file : files) {
    const std::string id = file.stem().string();
    GrayImage img;
    try {
      img = load_image(file);
    } catch (const std::exception& e) {
      for (const auto& method : spec.methods) {
        for (double ratio : spec.ratios) rows.push_back(error_row(id, method, ratio, e.what()));
      }
      continue;
    }

    std::optional<SvdFactors> factors;
    for (const auto& method : spec.methods) {
      for (double ratio : spec.ratios) {
        if (method == "external") {
          if (!spec.baseline_cmd) {
            rows.push_back(error_row(id, method, ratio, "no baseline command configured"));
          } else {
            rows.push_back(external_baseline(id, img, ratio, *spec.baseline_cmd, work, spec.timing));
          }
          continue;
        }
        if (!factors && !spec.timing && (method == "svd_wdr" || method == "svd_only")) {
          try {
            factors = svd_decompose(to_real(img));
          } catch (const std::exception& e) {
            rows.push_back(error_row(id, method, ratio, e.what()));
            continue;
          }
        }
        rows.push_back(run_method(id, img, method, ratio, spec.base,
                                  factors ? &*factors : nullptr, spec.timing));
      }
    }
  }

  if (spec.baseline_csv) {
    std::ifstream in(*spec.baseline_csv);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open " + spec.baseline_csv->string());
    std::stringstream text;
    text << in.rdbuf();
    for (auto& row : parse_csv(text.str())) rows.push_back(std::move(row));
  }

  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.image, a.method, a.target_ratio) < std::tie(b.image, b.method, b.target_ratio);
  });
  return rows;
}

std::vector<SweepRow> sweep_rank_curve(const GrayImage& img, std::span<const std::size_t> ks) {
  const std::size_t r = std::min(img.height, img.width);
  for (std::size_t k : ks) {
    if (k < 1 || k > r) {
      throw Error(ErrorCode::rank_out_of_range,
                  "rank " + std::to_string(k) + " outside [1, " + std::to_string(r) + "]");
    }
  }
  const SvdFactors f = svd_decompose(to_real(img));
  std::vector<SweepRow> rows;
  for (std::size_t k : ks) {
    const GrayImage rec = to_gray(truncate_reconstruct(f, k));
    const QualityScores q = evaluate(img, rec);
    rows.push_back({k, svd_compression_ratio({k, img.height, img.width}), q.psnr, q.ssim});
  }
  return rows;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string rows_to_csv(std::span<const ResultRow> rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += r.image + "," + r.method + "," + ratio_tag(r.target_ratio) + ",";
    if (r.error) {
      out += "error,error,error,error,error,0\n";
      continue;
    }
    out += format_real(r.cr_paper) + "," + format_real(r.cr_measured) + "," + format_real(r.mse) +
           "," + format_real(r.psnr) + "," + format_real(r.ssim) + "," + format_real(r.ms) + "\n";
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ResultRow> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (header) {
      header = false;
      if (line.rfind("image,", 0) == 0) continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw Error(ErrorCode::corrupt_file, "CSV row needs 9 fields: " + line);
    ResultRow row;
    row.image = f[0];
    row.method = f[1];
    row.target_ratio = parse_real(f[2]);
    if (f[3] == "error") {
      row.error = "error";
    } else {
      row.cr_paper = parse_real(f[3]);
      row.cr_measured = parse_real(f[4]);
      row.mse = parse_real(f[5]);
      row.psnr = parse_real(f[6]);
      row.ssim = parse_real(f[7]);
    }
    row.ms = parse_real(f[8]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::string out = "k,cr_svd,psnr_db,ssim\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + format_real(r.cr_svd) + "," + format_real(r.psnr) + "," +
           format_real(r.ssim) + "\n";
  }
  return out;
}

}  // namespace swdr
