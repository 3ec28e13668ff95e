#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "zaremba/config.hpp"
#include "zaremba/io.hpp"

using namespace zaremba;

TEST_CASE("minimal config parses with defaults filled") {
  const auto r = config::parse("command = eig-scan\nk_lo = 2.0\nk_hi = 6.0\n");
  REQUIRE(r.config.has_value());
  CHECK(r.violations.empty());
  CHECK(r.config->nodes_per_arc == 64);
  CHECK(r.config->grid_step == doctest::Approx(0.01));
  CHECK(r.config->curve == "disk");
  CHECK(r.config->arc_centers.empty());
}

TEST_CASE("comments and blank lines are ignored") {
  const auto r = config::parse(
      "# a scan\n\ncommand = eig-scan  # trailing comment\n  k_lo = 1.0\nk_hi = 2.0\n");
  REQUIRE(r.config.has_value());
  CHECK(r.config->k_lo == doctest::Approx(1.0));
}

TEST_CASE("violations are itemized, not fail-fast") {
  const auto r = config::parse(
      "command = optimize\nc_tol = -1\neps0 = 0\nnodes_per_arc = 2\n");
  CHECK_FALSE(r.config.has_value());
  // One violation per bad field, all reported together.
  CHECK(r.violations.size() == 3);
}

TEST_CASE("unknown keys are rejected for typo safety") {
  const auto r = config::parse("command = eig-scan\nk_low = 2.0\n");
  CHECK_FALSE(r.config.has_value());
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].find("k_low") != std::string::npos);
}

TEST_CASE("malformed values are reported with their line") {
  const auto r = config::parse("command = eig-scan\nk_lo = twelve\n");
  CHECK_FALSE(r.config.has_value());
}

TEST_CASE("round-trip: parse(emit(c)) == c") {
  config::RunConfig c;
  c.command = "optimize";
  c.curve = "custom";
  c.curve_x_c0 = -0.65;
  c.curve_x_cos = {1.0, 0.65};
  c.curve_y_sin = {1.5};
  c.arc_centers = {1.0, 4.25};
  c.arc_half_lengths = {0.125, 0.03125};
  c.k_star = 1.5;
  c.c_tol = 1e-2;
  c.eps0 = 0.05;
  c.nodes_per_arc = 96;
  c.source_x = 0.1;
  c.source_y = -1.0 / 3.0;  // not exactly representable in decimal
  c.receiver_x = 0.2;
  c.receiver_y = 0.3;
  c.output_dir = "/tmp/run1";
  const auto r = config::parse(config::emit(c));
  REQUIRE(r.config.has_value());
  CHECK(*r.config == c);
  // Emission is deterministic.
  CHECK(config::emit(c) == config::emit(*r.config));
}

TEST_CASE("mirror of the kite optimization parameters survives the round trip") {
  const std::string doc =
      "command = optimize\n"
      "curve = kite\n"
      "k_star = 1.5\n"
      "c_tol = 0.01\n"
      "eps0 = 0.05\n"
      "source_x = -0.5\nsource_y = 0.5\n"
      "receiver_x = -0.5\nreceiver_y = -0.5\n";
  const auto r = config::parse(doc);
  REQUIRE(r.config.has_value());
  CHECK(r.config->k_star == doctest::Approx(1.5));
  CHECK(r.config->c_tol == doctest::Approx(1e-2));
  CHECK(r.config->eps0 == doctest::Approx(0.05));
  const auto r2 = config::parse(config::emit(*r.config));
  REQUIRE(r2.config.has_value());
  CHECK(*r2.config == *r.config);
}

static std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("emit_table writes a header even with no rows") {
  const auto dir = std::filesystem::temp_directory_path() / "zaremba_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "empty.csv").string();
  io::emit_table({"k", "sigma_min"}, {}, path);
  CHECK(slurp(path) == "k,sigma_min\n");
}

TEST_CASE("emit_table rejects ragged rows and bad paths") {
  const auto dir = std::filesystem::temp_directory_path() / "zaremba_io_test";
  std::filesystem::create_directories(dir);
  CHECK_THROWS_AS(io::emit_table({"a", "b"}, {{1.0}}, (dir / "ragged.csv").string()),
                  std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      io::emit_table({"a"}, {}, "/nonexistent_dir_zzz/out.csv"),
      doctest::Contains("/nonexistent_dir_zzz/out.csv"), std::runtime_error);
}

TEST_CASE("emit_table output is byte-identical across writes") {
  const auto dir = std::filesystem::temp_directory_path() / "zaremba_io_test";
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<double>> rows = {{1.0, 2.5}, {3.0, 4.5}};
  const std::string p1 = (dir / "a.csv").string(), p2 = (dir / "b.csv").string();
  io::emit_table({"x", "y"}, rows, p1);
  io::emit_table({"x", "y"}, rows, p2);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("emit_grid masks exterior samples to zero") {
  const auto dir = std::filesystem::temp_directory_path() / "zaremba_io_test";
  std::filesystem::create_directories(dir);
  std::vector<io::GridSample> samples(2);
  samples[0] = {0.0, 0.0, 1.25, -0.5, true};
  samples[1] = {2.0, 0.0, 99.0, 99.0, false};  // exterior: value suppressed
  const std::string path = (dir / "grid.csv").string();
  io::emit_grid(samples, path);
  const std::string text = slurp(path);
  CHECK(text.find("x,y,re_z,im_z,mask") == 0);
  CHECK(text.find("99") == std::string::npos);
  std::istringstream in(text);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);  // header + 2 samples
}
