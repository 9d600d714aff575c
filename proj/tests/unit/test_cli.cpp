#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sys/wait.h>

#include "helpers.hpp"
#include "swdr/metrics.hpp"
#include "swdr/pipeline.hpp"

using namespace swdr;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(SWDR_CLI) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("eval of an image against itself") {
  const fs::path dir = test::temp_dir("cli_eval");
  write_image(test::synthetic_scene(32, 32), dir / "a.pgm");
  const RunResult r = run("eval " + q(dir / "a.pgm") + " " + q(dir / "a.pgm"));
  CHECK(r.status == 0);
  CHECK(r.out == "mse=0 psnr=inf ssim=1\n");
  const RunResult j = run("--json eval " + q(dir / "a.pgm") + " " + q(dir / "a.pgm"));
  CHECK(j.status == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["mse"] == 0.0);
  CHECK(parsed["psnr_db"] == "inf");
}

TEST_CASE("compress, decompress and eval agree with the library") {
  const fs::path dir = test::temp_dir("cli_roundtrip");
  const GrayImage img = test::synthetic_scene(64, 64);
  write_image(img, dir / "in.pgm");
  const RunResult c = run("--json compress " + q(dir / "in.pgm") + " " + q(dir / "out.swdr") + " --ratio 20");
  REQUIRE(c.status == 0);
  const auto info = nlohmann::json::parse(c.out);
  CHECK(info["cr_paper"].get<double>() >= 20.0);

  CompressionConfig cfg;
  cfg.target_ratio = 20.0;
  const auto expected = serialize_container(compress(img, cfg));
  CHECK(read_file(dir / "out.swdr") == expected);

  REQUIRE(run("decompress " + q(dir / "out.swdr") + " " + q(dir / "out.pgm")).status == 0);
  const GrayImage decoded = load_image(dir / "out.pgm");
  CHECK(decoded == decompress(parse_container(expected)));

  const RunResult e = run("--json eval " + q(dir / "in.pgm") + " " + q(dir / "out.pgm"));
  REQUIRE(e.status == 0);
  const auto scores = nlohmann::json::parse(e.out);
  CHECK(scores["mse"].get<double>() == doctest::Approx(mse(img, decoded)));
  CHECK(scores["ssim"].get<double>() == doctest::Approx(ssim(img, decoded)));
}

TEST_CASE("sweep and bench write their outputs") {
  const fs::path dir = test::temp_dir("cli_bench");
  fs::create_directories(dir / "corpus");
  write_image(test::synthetic_scene(32, 32), dir / "corpus" / "x.pgm");
  CHECK(run("sweep --image " + q(dir / "corpus" / "x.pgm") + " --ks 1,4,32 --out " + q(dir / "sweep.csv") +
            " --charts " + q(dir / "charts")).status == 0);
  CHECK(fs::exists(dir / "sweep.csv"));
  CHECK(fs::exists(dir / "charts" / "sweep_psnr_k.svg"));
  CHECK(run("bench --corpus " + q(dir / "corpus") + " --ratios 10 --methods svd_wdr,wdr_only --out " +
            q(dir / "r.csv")).status == 0);
  std::ifstream in(dir / "r.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "image,method,target_ratio,cr_paper,cr_measured,mse,psnr_db,ssim,ms");
}

TEST_CASE("exit codes") {
  const fs::path dir = test::temp_dir("cli_errors");
  write_image(test::synthetic_scene(32, 32), dir / "a.pgm");
  CHECK(run("eval " + q(dir / "a.pgm") + " " + q(dir / "missing.pgm")).status == 2);
  CHECK(run("compress " + q(dir / "a.pgm") + " " + q(dir / "o.swdr") + " --ratio 20 --bogus").status == 1);
  CHECK(run("").status == 1);
  CHECK(run("compress " + q(dir / "a.pgm") + " " + q(dir / "o.swdr") + " --ratio 20 --wavelet db4").status == 1);
  CHECK(run("compress " + q(dir / "a.pgm") + " " + q(dir / "o.swdr") + " --ratio 20 --levels 9").status == 3);
  std::ofstream(dir / "junk.swdr") << "not a container";
  CHECK(run("decompress " + q(dir / "junk.swdr") + " " + q(dir / "o.pgm")).status == 3);
  fs::create_directories(dir / "empty");
  CHECK(run("bench --corpus " + q(dir / "empty") + " --out " + q(dir / "r.csv")).status == 2);
}
