#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "setsens/setsens.h"

namespace {

const char* kSmallToy =
    "[study]\nn = 25\nm = 30\nreplicates = 3\npermutations = 39\n";

}  // namespace

TEST_CASE("version and primitives") {
  CHECK(std::strlen(setsens_version()) > 0);
  double k = 0.0;
  REQUIRE(setsens_sobolev_kernel(0.5, 0.5, &k) == SETSENS_OK);
  CHECK(k == doctest::Approx(13.0 / 12.0).epsilon(1e-15));
  CHECK(setsens_sobolev_kernel(2.0, 0.5, &k) == SETSENS_ERR_ARGUMENT);
  CHECK(std::strlen(setsens_last_error()) > 0);
  CHECK(setsens_sobolev_kernel(0.1, 0.5, nullptr) == SETSENS_ERR_ARGUMENT);

  const double a[] = {1.0, 3.0, 3.0, 1.0}, b[] = {1.0, 0.5, 0.5, 1.0};
  double h = 0.0;
  REQUIRE(setsens_hsic_ustat(a, b, 2, &h) == SETSENS_OK);
  CHECK(h == doctest::Approx(1.0));
  CHECK(setsens_hsic_ustat(a, b, 1, &h) == SETSENS_ERR_ARGUMENT);

  // one of ten inner points differs, volume 100, sigma^2 25
  std::vector<std::uint8_t> bits(20, 0);
  bits[3] = 1;
  double g[4];
  REQUIRE(setsens_set_kernel_gram(bits.data(), 2, 10, 100.0, 25.0, g) == SETSENS_OK);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == doctest::Approx(std::exp(-0.2)).epsilon(1e-15));
  CHECK(setsens_set_kernel_gram(bits.data(), 2, 10, 100.0, 0.0, g) == SETSENS_ERR_ARGUMENT);
}

TEST_CASE("config handles") {
  setsens_config* cfg = nullptr;
  CHECK(setsens_config_from_string("[study]\npermutattions = 3\n", &cfg) == SETSENS_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(setsens_last_error()).find("permutattions") != std::string::npos);
  CHECK(setsens_config_from_file("/does/not/exist.ini", &cfg) == SETSENS_ERR_CONFIG);

  REQUIRE(setsens_config_from_string(kSmallToy, &cfg) == SETSENS_OK);
  CHECK(setsens_config_set_threads(cfg, 0) == SETSENS_ERR_CONFIG);
  CHECK(setsens_config_set_risk_replicates(cfg, 5) == SETSENS_ERR_CONFIG);
  CHECK(setsens_config_set_risk_estimator(cfg, "nested") == SETSENS_ERR_CONFIG);
  CHECK(setsens_config_set_output_dir(cfg, "elsewhere") == SETSENS_OK);
  CHECK(std::string(setsens_config_output_dir(cfg)) == "elsewhere");
  CHECK(std::string(setsens_config_text(cfg)).find("elsewhere") != std::string::npos);
  CHECK(setsens_config_set_seed(nullptr, 1) == SETSENS_ERR_ARGUMENT);
  setsens_config_free(cfg);
  setsens_config_free(nullptr);
}

TEST_CASE("study through the C interface") {
  setsens_config* cfg = nullptr;
  REQUIRE(setsens_config_from_string(kSmallToy, &cfg) == SETSENS_OK);
  setsens_report* rep = nullptr;
  REQUIRE(setsens_study_run(cfg, &rep) == SETSENS_OK);
  CHECK(setsens_report_num_inputs(rep) == 3);
  CHECK(setsens_report_num_replicates(rep) == 3);
  CHECK(setsens_report_num_failed(rep) == 0);
  CHECK(std::string(setsens_report_input_name(rep, 2)) == "U3");
  CHECK(setsens_report_input_name(rep, 3) == nullptr);
  CHECK(setsens_report_model_evaluations(rep, 0) == 25u * 30u);

  double s = 0, st = 0, p = 0;
  int infl = -1, ok = -1;
  REQUIRE(setsens_report_value(rep, 1, 0, &s, &st, &p, &infl, &ok) == SETSENS_OK);
  CHECK(ok == 1);
  CHECK((p > 0.0 && p <= 1.0));
  CHECK(setsens_report_value(rep, 3, 0, &s, &st, &p, &infl, &ok) == SETSENS_ERR_ARGUMENT);

  double acc = -1, med = 0, medt = 0;
  REQUIRE(setsens_report_aggregate(rep, 2, &acc, &med, &medt) == SETSENS_OK);
  CHECK((acc >= 0.0 && acc <= 1.0));
  CHECK(std::string(setsens_report_summary(rep)).find("U2") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "setsens_c_api_test";
  std::filesystem::remove_all(dir);
  CHECK(setsens_report_write(rep, dir.string().c_str()) == SETSENS_OK);
  CHECK(std::filesystem::exists(dir / "sa_results.csv"));
  CHECK(std::filesystem::exists(dir / "sa_report.json"));
  std::filesystem::remove_all(dir);
  CHECK(setsens_report_write(rep, "/proc/setsens/out") == SETSENS_ERR_RUNTIME);

  setsens_report_free(rep);
  setsens_config_free(cfg);
}

TEST_CASE("risk benchmark through the C interface") {
  setsens_config* cfg = nullptr;
  REQUIRE(setsens_config_from_string("", &cfg) == SETSENS_OK);
  const std::size_t grid[] = {30, 60};
  REQUIRE(setsens_config_set_risk_grid(cfg, grid, 2) == SETSENS_OK);
  REQUIRE(setsens_config_set_risk_replicates(cfg, 20) == SETSENS_OK);
  setsens_risk* risk = nullptr;
  REQUIRE(setsens_risk_run(cfg, &risk) == SETSENS_OK);
  CHECK(setsens_risk_num_points(risk) == 2);
  std::size_t n = 0, m = 0;
  const char* est = nullptr;
  double r = 0, bs = 0, bi = 0;
  REQUIRE(setsens_risk_point(risk, 1, &n, &m, &est, &r, &bs, &bi) == SETSENS_OK);
  CHECK(n == 60);
  CHECK(m == 60);
  CHECK(std::string(est) == "shared");
  CHECK(r > 0.0);
  CHECK(r <= bs);
  CHECK(setsens_risk_point(risk, 2, &n, &m, &est, &r, &bs, &bi) == SETSENS_ERR_ARGUMENT);
  setsens_risk_free(risk);

  const std::size_t too_big[] = {400};
  REQUIRE(setsens_config_set_risk_grid(cfg, too_big, 1) == SETSENS_OK);
  CHECK(setsens_risk_run(cfg, &risk) == SETSENS_ERR_CONFIG);
  setsens_config_free(cfg);
}

TEST_CASE("validation suite through the C interface") {
  setsens_validation* v = nullptr;
  REQUIRE(setsens_validate_run(5, &v) == SETSENS_OK);
  const std::size_t count = setsens_validation_num_checks(v);
  CHECK(count > 5);
  for (std::size_t i = 0; i < count; ++i) {
    const char* name = nullptr;
    const char* detail = nullptr;
    int passed = 0;
    REQUIRE(setsens_validation_check(v, i, &name, &passed, &detail) == SETSENS_OK);
    CHECK_MESSAGE(passed == 1, name, ": ", detail);
  }
  setsens_validation_free(v);
}
