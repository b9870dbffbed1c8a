#include <doctest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "ssc/data_io.hpp"
#include "ssc/errors.hpp"
#include "ssc/pipeline.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

ssc::RunConfig synthetic_config(const testutil::TempDir& dir) {
  ssc::RunConfig cfg;
  cfg.synth = ssc::SynthSpec{3, 2, 50, 8, 0.0, 42};
  cfg.out_labels = dir / "labels.csv";
  cfg.out_w = dir / "w.pgm";
  cfg.out_c = dir / "c.pgm";
  cfg.out_conv = dir / "conv.csv";
  cfg.out_meta = dir / "meta.txt";
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SSC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string line_of(const std::string& text, const std::string& key) {
  const auto start = text.find(key);
  if (start == std::string::npos) return {};
  return text.substr(start, text.find('\n', start + 1) - start);
}

}  // namespace

TEST_CASE("compare_partitions") {
  const std::vector<int> a{0, 0, 1, 1};
  CHECK(ssc::compare_partitions(a, a) == 1.0);
  CHECK(ssc::compare_partitions(a, std::vector<int>{1, 1, 0, 0}) == 1.0);
  CHECK(ssc::compare_partitions(a, std::vector<int>{0, 1, 0, 1}) == doctest::Approx(2.0 / 6.0));
  CHECK_THROWS_AS(ssc::compare_partitions(a, std::vector<int>{0, 1}), ssc::InputError);
}

TEST_CASE("spec strings") {
  const auto s = ssc::parse_synth_spec("3,2,50,8,0.05,9");
  CHECK(s.K == 3);
  CHECK(s.D == 50);
  CHECK(s.sigma == 0.05);
  CHECK(s.seed == 9);
  CHECK_THROWS_AS(ssc::parse_synth_spec("3,2,50"), ssc::ConfigError);
  CHECK_THROWS_AS(ssc::parse_synth_spec("3,2,50,8,x,1"), ssc::ConfigError);
  const auto p = ssc::parse_projection_spec("25,7");
  CHECK(p.m == 25);
  CHECK(p.seed == 7);
  CHECK_THROWS_AS(ssc::parse_projection_spec("25"), ssc::ConfigError);
}

TEST_CASE("run on the three-subspace synthetic set") {
  testutil::TempDir dir;
  const auto cfg = synthetic_config(dir);
  const auto summary = ssc::run(cfg);
  CHECK(summary.report.converged);
  CHECK(summary.spectral.estimated_k == 3);
  CHECK(summary.ground_truth_agreement.value() == 1.0);
  CHECK(summary.block_mass >= 0.9);

  const auto labels = ssc::read_labels(*cfg.out_labels);
  REQUIRE(labels.size() == 24);
  for (int c = 0; c < 3; ++c) CHECK(std::count(labels.begin(), labels.end(), c) == 8);
  const auto w = ssc::load_frame(*cfg.out_w);
  CHECK(w.width == 24);
  CHECK(fs::exists(*cfg.out_c));
  CHECK(ssc::read_convergence(*cfg.out_conv).size() ==
        static_cast<std::size_t>(summary.report.iterations_used));

  SUBCASE("identical config gives byte-identical outputs") {
    testutil::TempDir other;
    auto again = synthetic_config(other);
    ssc::run(again);
    CHECK(testutil::read_bytes(*cfg.out_labels) == testutil::read_bytes(*again.out_labels));
    CHECK(testutil::read_bytes(*cfg.out_conv) == testutil::read_bytes(*again.out_conv));
    CHECK(testutil::read_bytes(*cfg.out_w) == testutil::read_bytes(*again.out_w));
  }
}

TEST_CASE("projection keeps the partition") {
  testutil::TempDir dir;
  auto cfg = synthetic_config(dir);
  const auto plain = ssc::run(cfg);
  cfg.projection = ssc::ProjectionSpec{25, 3};
  const auto projected = ssc::run(cfg);
  CHECK(projected.solve_dim == 25);
  REQUIRE(projected.distortion.has_value());
  CHECK(ssc::compare_partitions(plain.spectral.labels, projected.spectral.labels) == 1.0);
}

TEST_CASE("invalid configs write nothing") {
  testutil::TempDir dir;
  auto cfg = synthetic_config(dir);
  cfg.frames = (dir / "*.pgm").string();
  CHECK_THROWS_AS(ssc::run(cfg), ssc::Error);
  try {
    ssc::run(cfg);
  } catch (const ssc::Error& e) {
    CHECK(e.kind() == ssc::ErrorKind::kConfig);
    CHECK(std::string(e.what()).rfind("config:", 0) == 0);
  }
  CHECK(fs::is_empty(dir.path()));

  ssc::RunConfig none;
  CHECK_THROWS_AS(ssc::run(none), ssc::Error);
}

TEST_CASE("failed export removes earlier artifacts") {
  testutil::TempDir dir;
  auto cfg = synthetic_config(dir);
  cfg.out_conv = dir / "missing" / "conv.csv";
  try {
    ssc::run(cfg);
    FAIL("expected an I/O error");
  } catch (const ssc::Error& e) {
    CHECK(e.kind() == ssc::ErrorKind::kIo);
    CHECK(std::string(e.what()).rfind("export:", 0) == 0);
  }
  CHECK(fs::is_empty(dir.path()));
}

TEST_CASE("frame input through the pipeline") {
  testutil::TempDir dir;
  // Two groups of 3x3 frames: bright top rows vs bright bottom rows.
  const std::string top[] = {"9 8 9 1 0 1 0 0 0", "7 9 8 0 1 0 0 0 0", "9 9 7 1 1 0 0 0 0",
                             "8 7 9 0 0 1 0 0 0"};
  const std::string bottom[] = {"0 0 0 1 0 1 9 8 9", "0 0 0 0 1 0 7 9 8",
                                "0 0 0 1 1 0 9 9 7", "0 0 0 0 0 1 8 7 9"};
  for (int i = 0; i < 4; ++i) {
    testutil::write_bytes(dir / ("a" + std::to_string(i) + ".pgm"), "P2\n3 3\n9\n" + top[i] + "\n");
    testutil::write_bytes(dir / ("b" + std::to_string(i) + ".pgm"), "P2\n3 3\n9\n" + bottom[i] + "\n");
  }
  ssc::RunConfig cfg;
  cfg.frames = (dir.path() / "*.pgm").string();
  cfg.k = 2;
  const auto summary = ssc::run(cfg);
  CHECK(summary.normalized);
  CHECK(summary.ambient_dim == 9);
  CHECK(ssc::compare_partitions(summary.spectral.labels,
                                std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}) == 1.0);

  testutil::write_bytes(dir / "c.pgm", "P5\n3 3\n255\n" + std::string(4, '\0'));
  try {
    ssc::run(cfg);
    FAIL("expected a format error");
  } catch (const ssc::Error& e) {
    CHECK(e.kind() == ssc::ErrorKind::kInput);
    CHECK(std::string(e.what()).rfind("ingest:", 0) == 0);
  }
}

TEST_CASE("metadata reproduces the run through the CLI") {
  testutil::TempDir dir;
  const std::string base = dir.path().string();
  const std::string args = "--synth 3,2,50,8,0,42 --project 30,5 --out-labels " + base +
                           "/l1.csv --out-conv " + base + "/c1.csv --out-meta " + base +
                           "/m1.txt";
  REQUIRE(run_cli(args) == 0);
  const std::string meta = testutil::read_bytes(dir / "m1.txt");
  CHECK(meta.find("mu=") != std::string::npos);
  CHECK(meta.find("affinity=\"colmax-abs-symmetric\"") != std::string::npos);
  CHECK(meta.find("project=\"30,5\"") != std::string::npos);
  CHECK(meta.find("software-version=") != std::string::npos);

  REQUIRE(run_cli("--config " + base + "/m1.txt --out-labels " + base + "/l2.csv --out-conv " +
                  base + "/c2.csv --out-meta " + base + "/m2.txt") == 0);
  CHECK(testutil::read_bytes(dir / "l1.csv") == testutil::read_bytes(dir / "l2.csv"));
  CHECK(testutil::read_bytes(dir / "c1.csv") == testutil::read_bytes(dir / "c2.csv"));
  const std::string meta2 = testutil::read_bytes(dir / "m2.txt");
  for (const char* key : {"\nmu=", "\nrho=", "\nsynth=", "\nproject=", "\nestimated-k="}) {
    CHECK(line_of(meta, key) == line_of(meta2, key));
  }
}

TEST_CASE("CLI exit codes") {
  testutil::TempDir dir;
  const std::string base = dir.path().string();
  CHECK(run_cli("--synth 3,2,50,8,0,1 --frames '" + base + "/*.pgm' --out-labels " + base +
                "/x.csv") == 2);
  CHECK(fs::is_empty(dir.path()));
  CHECK(run_cli("--synth 3,2") == 2);
  CHECK(run_cli("--no-such-flag") == 2);
  CHECK(run_cli("--frames '" + base + "/*.pgm'") == 3);
  CHECK(run_cli("--synth 2,1,5,4,0,1 --mu 1e308 --rho 1e308") == 4);
  CHECK(run_cli("--synth 2,1,5,4,0,1 --out-labels " + base + "/missing/x.csv") == 5);
  CHECK(run_cli("--help") == 0);
}
