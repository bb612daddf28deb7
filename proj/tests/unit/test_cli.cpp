#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string output;
};

Run run(const std::string& args) {
  const auto log = fs::temp_directory_path() / "setsens_cli_test.log";
  const std::string cmd = std::string(SETSENS_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("misspelled key exits with code 2 and names the key") {
  const auto cfg = write_config("setsens_typo.ini", "[study]\npermutattions = 99\n");
  const auto r = run("sa --config " + cfg.string());
  CHECK(r.code == 2);
  CHECK(r.output.find("permutattions") != std::string::npos);
}

TEST_CASE("bad command lines exit with code 2") {
  CHECK(run("").code == 2);
  CHECK(run("sa --threads zero").code == 2);
  CHECK(run("sa --config /does/not/exist.ini").code == 2);
  CHECK(run("risk --replicates 3").code == 2);
  CHECK(run("--version").code == 0);
}

TEST_CASE("sa writes identical files across runs and thread counts") {
  const auto cfg = write_config("setsens_small.ini",
                                "[study]\nn = 30\nm = 30\nreplicates = 4\npermutations = 39\n");
  const auto a = fs::temp_directory_path() / "setsens_cli_a";
  const auto b = fs::temp_directory_path() / "setsens_cli_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const auto ra = run("sa --config " + cfg.string() + " --seed 5 --threads 1 --out " + a.string());
  const auto rb = run("sa --config " + cfg.string() + " --seed 5 --threads 3 --out " + b.string());
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(ra.output.find("U3") != std::string::npos);
  const auto csv = slurp(a / "sa_results.csv");
  CHECK(csv == slurp(b / "sa_results.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 3);
  CHECK(fs::exists(a / "sa_report.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("unwritable output directory is a runtime error") {
  const auto cfg = write_config("setsens_tiny.ini", "[study]\nn = 10\nm = 10\nreplicates = 1\npermutations = 19\n");
  CHECK(run("sa --config " + cfg.string() + " --out /proc/setsens").code == 3);
}

TEST_CASE("risk and validate subcommands") {
  const auto out = fs::temp_directory_path() / "setsens_cli_risk";
  fs::remove_all(out);
  const auto r = run("risk --grid 30,50 --replicates 20 --out " + out.string());
  REQUIRE(r.code == 0);
  const auto csv = slurp(out / "risk.csv");
  CHECK(csv.rfind("n,m,estimator,empirical_risk,bound_shared,bound_independent\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  fs::remove_all(out);

  CHECK(run("risk --estimator nested").code == 2);
  const auto v = run("validate --seed 3");
  CHECK(v.code == 0);
  CHECK(v.output.find("checks passed") != std::string::npos);
}
