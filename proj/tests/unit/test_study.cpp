#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "setsens/config.hpp"
#include "setsens/errors.hpp"
#include "setsens/study.hpp"

using namespace setsens;

namespace {

StudyConfig small_toy(std::size_t replicates = 4) {
  StudyConfig c;
  c.n = 30;
  c.m = 40;
  c.replicates = replicates;
  c.permutations = 39;
  return c;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# toy run\n"
      "[study]\nmodel = toy\nn = 50\nm = 60\nreplicates = 3\nseed = 12\nalpha = 0.1\npermutations = 99\n"
      "[kernel]\ninput = anova_matern52\nlengthscale = 0.3\n"
      "[bandwidth]\nmode = fixed\nsigma2 = 12.5\n"
      "[risk]\ngrid = 30, 60\nestimator = both\n"
      "[output]\ndir = results\n");
  CHECK(c.n == 50);
  CHECK(c.m == 60);
  CHECK(c.master_seed == 12);
  CHECK(c.alpha == 0.1);
  CHECK(c.input_kernel == InputKernelFamily::anova_matern52);
  CHECK(c.lengthscale == 0.3);
  CHECK(c.bandwidth == BandwidthMode::fixed);
  CHECK(c.sigma2 == 12.5);
  CHECK(c.risk.grid == std::vector<std::size_t>{30, 60});
  CHECK(c.risk.estimator == RiskEstimator::both);
  CHECK(c.output_dir == "results");

  const auto again = parse_config(c.to_ini());
  CHECK(again.to_ini() == c.to_ini());
  CHECK(again.hash() == c.hash());
  CHECK(parse_config("").hash() != c.hash());
}

TEST_CASE("config errors name the offending key") {
  CHECK_THROWS_WITH_AS(parse_config("[study]\npermutattions = 99\n"), doctest::Contains("permutattions"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[studdy]\nn = 3\n"), doctest::Contains("studdy"), ConfigError);
  CHECK_THROWS_AS(parse_config("[study]\nn = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[study]\nn = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[study]\nalpha = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[study]\npermutations = 18\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[study]\nmodel = beam\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[bandwidth]\nmode = fixed\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[risk]\nreplicates = 5\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/setsens.ini"), ConfigError);
}

TEST_CASE("quartiles") {
  const auto q = quartiles({4.0, 1.0, 3.0, 2.0});
  CHECK(q.min == 1.0);
  CHECK(q.q1 == doctest::Approx(1.75));
  CHECK(q.median == doctest::Approx(2.5));
  CHECK(q.q3 == doctest::Approx(3.25));
  CHECK(q.max == 4.0);
  const auto one = quartiles({0.3});
  CHECK((one.min == 0.3 && one.q1 == 0.3 && one.median == 0.3 && one.q3 == 0.3 && one.max == 0.3));
}

TEST_CASE("study runs are deterministic and thread independent") {
  auto cfg = small_toy();
  const auto a = run_study(cfg);
  const auto b = run_study(cfg);
  cfg.threads = 3;
  const auto c = run_study(cfg);
  CHECK(results_csv(a) == results_csv(b));
  CHECK(results_csv(a) == results_csv(c));
  CHECK(a.replicates == c.replicates);
}

TEST_CASE("adding replicates keeps earlier ones") {
  const auto few = run_study(small_toy(2));
  const auto more = run_study(small_toy(4));
  CHECK(few.replicates[0] == more.replicates[0]);
  CHECK(few.replicates[1] == more.replicates[1]);
}

TEST_CASE("report shape and accounting") {
  const auto cfg = small_toy(3);
  const auto r = run_study(cfg);
  CHECK(r.input_names == std::vector<std::string>{"U1", "U2", "U3"});
  CHECK(r.failed_replicates == 0);
  for (const auto& rep : r.replicates) {
    CHECK(rep.ok);
    CHECK(rep.model_evaluations == cfg.n * cfg.m);
    CHECK(rep.p_values.size() == 3);
  }
  CHECK(count_lines(results_csv(r)) == 1 + 3 * 3);
  CHECK(results_csv(r).rfind("replicate,input,first_order,total_order,p_value,label\n", 0) == 0);
}

TEST_CASE("single replicate collapses quartiles") {
  const auto r = run_study(small_toy(1));
  for (const auto& a : r.aggregates) {
    CHECK(a.first_order.min == a.first_order.max);
    CHECK(a.first_order.q1 == a.first_order.median);
    CHECK(a.total_order.q3 == a.total_order.min);
  }
}

TEST_CASE("acceptance rate counts p-values above alpha") {
  const auto r = run_study(small_toy(5));
  for (std::size_t j = 0; j < 3; ++j) {
    std::size_t above = 0;
    for (const auto& rep : r.replicates) above += rep.p_values[j] > r.config.alpha;
    CHECK(r.aggregates[j].acceptance_rate == doctest::Approx(above / 5.0));
  }
}

TEST_CASE("JSON round trip") {
  const auto r = run_study(small_toy(2));
  const auto text = report_json(r);
  const auto back = parse_report_json(text);
  CHECK(back.replicates == r.replicates);
  CHECK(back.aggregates == r.aggregates);
  CHECK(back.config_hash == r.config_hash);
  CHECK(back.config_text == r.config_text);
  CHECK(report_json(back) == text);
}

TEST_CASE("degenerate outputs become failed replicates") {
  StudyConfig cfg = small_toy(2);
  cfg.model = "oscillator_g1";
  cfg.oscillator.forcing = parse_forcing("step:0");  // the system never moves
  const auto r = run_study(cfg);
  CHECK(r.failed_replicates == 2);
  for (const auto& rep : r.replicates) {
    CHECK_FALSE(rep.ok);
    CHECK(rep.diagnostic.find("degenerate") != std::string::npos);
  }
  CHECK(count_lines(results_csv(r)) == 1 + 2 * 6);
}

TEST_CASE("write_outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "setsens_study_test";
  std::filesystem::remove_all(dir);
  const auto r = run_study(small_toy(2));
  write_outputs(r, dir.string());
  std::ifstream csv(dir / "sa_results.csv"), json(dir / "sa_report.json");
  REQUIRE(csv.good());
  REQUIRE(json.good());
  std::stringstream js;
  js << json.rdbuf();
  CHECK(parse_report_json(js.str()).replicates == r.replicates);
  std::filesystem::remove_all(dir);

  CHECK_THROWS(write_outputs(r, "/proc/setsens/out"));
}
