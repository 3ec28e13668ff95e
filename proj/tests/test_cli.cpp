#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

// End-to-end checks of the installed binary: exit codes and output files.
// ZAREMBA_CLI_PATH is injected by the build.

namespace fs = std::filesystem;

static int run(const std::string& args) {
  const int rc = std::system((std::string(ZAREMBA_CLI_PATH) + " " + args +
                              " > /dev/null 2>&1")
                                 .c_str());
  return WEXITSTATUS(rc);
}

static fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "zaremba_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

static int count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

TEST_CASE("help exits cleanly") {
  CHECK(run("--help") == 0);
  CHECK(run("eig-scan --help") == 0);
}

TEST_CASE("missing subcommand or config file is a config error") {
  CHECK(run("") == 2);
  CHECK(run("eig-scan /nonexistent/config.cfg") == 4);  // unreadable file: I/O
}

TEST_CASE("config violations exit 2") {
  const auto p = write_config("bad.cfg", "command = eig-scan\nc_tol = -1\n");
  CHECK(run("eig-scan " + p.string()) == 2);
  const auto q = write_config("typo.cfg", "command = eig-scan\nk_low = 2\n");
  CHECK(run("eig-scan " + q.string()) == 2);
}

TEST_CASE("subcommand must match the config's command field") {
  const auto p = write_config("mismatch.cfg", "command = optimize\n");
  CHECK(run("eig-scan " + p.string()) == 2);
}

TEST_CASE("unwritable output directory exits 4") {
  const auto p = write_config("noout.cfg",
                              "command = zaremba-eval\nk = 1.0\n"
                              "output_dir = /dev/null/out\n");
  CHECK(run("zaremba-eval " + p.string()) == 4);
}

TEST_CASE("zaremba-eval writes the transmission value") {
  const fs::path out = fs::temp_directory_path() / "zaremba_cli_test" / "ev";
  const auto p = write_config("eval.cfg",
                              "command = zaremba-eval\nk = 1.0\n"
                              "source_x = 0\nsource_y = 0\n"
                              "receiver_x = 0\nreceiver_y = 0.5\n"
                              "output_dir = " + out.string() + "\n");
  REQUIRE(run("zaremba-eval " + p.string()) == 0);
  std::ifstream in(out / "zaremba_eval.csv");
  std::string header, row;
  REQUIRE(std::getline(in, header));
  REQUIRE(std::getline(in, row));
  CHECK(header == "k,re_z,im_z");
  // Pure-Dirichlet disk at k=1, r=0.5: the -0.138 baseline.
  std::stringstream ss(row);
  std::string tok;
  std::getline(ss, tok, ',');
  std::getline(ss, tok, ',');
  CHECK(std::abs(std::stod(tok) + 0.138) < 5e-4);
}

TEST_CASE("eval at a characteristic value is a numerical failure") {
  const auto p = write_config("res.cfg",
                              "command = zaremba-eval\nk = 2.404825557695773\n"
                              "receiver_y = 0.5\noutput_dir = " +
                                  (fs::temp_directory_path() / "zaremba_cli_test").string() +
                                  "\n");
  CHECK(run("zaremba-eval " + p.string()) == 3);
}

TEST_CASE("eig-scan emits samples and refined characteristic values") {
  const fs::path out = fs::temp_directory_path() / "zaremba_cli_test" / "scan";
  const auto p = write_config("scan.cfg",
                              "command = eig-scan\nk_lo = 2.3\nk_hi = 2.5\n"
                              "nodes_per_arc = 32\noutput_dir = " + out.string() + "\n");
  REQUIRE(run("eig-scan " + p.string()) == 0);
  CHECK(count_lines(out / "scan_samples.csv") >= 21);  // header + the grid samples
  REQUIRE(count_lines(out / "char_values.csv") == 2);  // header + the J0 root
  std::ifstream in(out / "char_values.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(std::abs(std::stod(row) - 2.404826) < 1e-5);
}

TEST_CASE("field-grid writes a full masked grid") {
  const fs::path out = fs::temp_directory_path() / "zaremba_cli_test" / "grid";
  const auto p = write_config("grid.cfg",
                              "command = field-grid\nk = 1.0\n"
                              "grid_resolution = 16\nnodes_per_arc = 128\n"
                              "output_dir = " + out.string() + "\n");
  REQUIRE(run("field-grid " + p.string()) == 0);
  CHECK(count_lines(out / "grid.csv") == 1 + 16 * 16);
  // Corners of the bounding box are outside the disk: masked rows exist.
  std::ifstream in(out / "grid.csv");
  std::string line;
  std::getline(in, line);  // header
  bool saw_masked = false, saw_interior = false;
  while (std::getline(in, line)) {
    if (line.size() >= 2 && line.substr(line.size() - 2) == ",0") saw_masked = true;
    if (line.size() >= 2 && line.substr(line.size() - 2) == ",1") saw_interior = true;
  }
  CHECK(saw_masked);
  CHECK(saw_interior);
}

TEST_CASE("source outside the domain is a config error") {
  const auto p = write_config("out.cfg",
                              "command = zaremba-eval\nk = 1.0\nsource_x = 3\n");
  CHECK(run("zaremba-eval " + p.string()) == 2);
}
