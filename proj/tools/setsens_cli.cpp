// Command-line front end. Talks to the library only through setsens.h.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "setsens/setsens.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::vector<std::size_t> grid;
  std::optional<std::size_t> replicates;
  std::optional<std::string> estimator;
};

int report_error(setsens_status status) {
  std::fprintf(stderr, "setsens: error: %s\n", setsens_last_error());
  return status == SETSENS_ERR_RUNTIME ? kExitRuntime : kExitConfig;
}

// Loads the config file (or defaults) and applies command-line overrides.
setsens_status load(const Options& opt, setsens_config** cfg) {
  setsens_status s = opt.config_path.empty() ? setsens_config_from_string("", cfg)
                                             : setsens_config_from_file(opt.config_path.c_str(), cfg);
  if (s != SETSENS_OK) return s;
  if (opt.seed) s = setsens_config_set_seed(*cfg, *opt.seed);
  if (s == SETSENS_OK && opt.threads) s = setsens_config_set_threads(*cfg, *opt.threads);
  if (s == SETSENS_OK && opt.out) s = setsens_config_set_output_dir(*cfg, opt.out->c_str());
  if (s == SETSENS_OK && !opt.grid.empty())
    s = setsens_config_set_risk_grid(*cfg, opt.grid.data(), opt.grid.size());
  if (s == SETSENS_OK && opt.replicates) s = setsens_config_set_risk_replicates(*cfg, *opt.replicates);
  if (s == SETSENS_OK && opt.estimator) s = setsens_config_set_risk_estimator(*cfg, opt.estimator->c_str());
  if (s != SETSENS_OK) {
    setsens_config_free(*cfg);
    *cfg = nullptr;
  }
  return s;
}

int run_sa(const Options& opt) {
  setsens_config* cfg = nullptr;
  if (auto s = load(opt, &cfg); s != SETSENS_OK) return report_error(s);
  setsens_report* report = nullptr;
  auto s = setsens_study_run(cfg, &report);
  if (s == SETSENS_OK) {
    std::fputs(setsens_report_summary(report), stdout);
    s = setsens_report_write(report, setsens_config_output_dir(cfg));
    if (s == SETSENS_OK)
      std::printf("wrote %s/sa_results.csv and %s/sa_report.json\n", setsens_config_output_dir(cfg),
                  setsens_config_output_dir(cfg));
  }
  int code = s == SETSENS_OK ? 0 : report_error(s);
  setsens_report_free(report);
  setsens_config_free(cfg);
  return code;
}

int run_risk(const Options& opt) {
  setsens_config* cfg = nullptr;
  if (auto s = load(opt, &cfg); s != SETSENS_OK) return report_error(s);
  setsens_risk* risk = nullptr;
  auto s = setsens_risk_run(cfg, &risk);
  if (s == SETSENS_OK) {
    std::fputs(setsens_risk_summary(risk), stdout);
    const std::filesystem::path dir = setsens_config_output_dir(cfg);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = (dir / "risk.csv").string();
    s = setsens_risk_write_csv(risk, path.c_str());
    if (s == SETSENS_OK) std::printf("wrote %s\n", path.c_str());
  }
  int code = s == SETSENS_OK ? 0 : report_error(s);
  setsens_risk_free(risk);
  setsens_config_free(cfg);
  return code;
}

int run_validate(const Options& opt) {
  setsens_config* cfg = nullptr;
  if (auto s = load(opt, &cfg); s != SETSENS_OK) return report_error(s);
  // the suite only needs the seed
  std::uint64_t seed = 20240101;
  if (opt.seed) seed = *opt.seed;
  setsens_config_free(cfg);

  setsens_validation* v = nullptr;
  if (auto s = setsens_validate_run(seed, &v); s != SETSENS_OK) return report_error(s);
  std::size_t failed = 0;
  const std::size_t count = setsens_validation_num_checks(v);
  for (std::size_t i = 0; i < count; ++i) {
    const char* name = nullptr;
    const char* detail = nullptr;
    int passed = 0;
    setsens_validation_check(v, i, &name, &passed, &detail);
    std::printf("%-4s %-40s %s\n", passed ? "ok" : "FAIL", name, detail);
    if (!passed) ++failed;
  }
  std::printf("%zu/%zu checks passed\n", count - failed, count);
  setsens_validation_free(v);
  return failed == 0 ? 0 : kExitRuntime;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "study description (INI)")->check(CLI::ExistingFile);
  sub->add_option("--seed", opt.seed, "master seed");
  sub->add_option("--threads", opt.threads, "worker threads");
  sub->add_option("--out", opt.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensitivity analysis of set-valued outputs with HSIC-ANOVA indices"};
  app.set_version_flag("--version", std::string(setsens_version()));
  app.require_subcommand(1);

  Options opt;
  auto* sa = app.add_subcommand("sa", "run a replicated screening and ranking study");
  add_common(sa, opt);
  auto* risk = app.add_subcommand("risk", "empirical risk of the nested estimators against the bounds");
  add_common(risk, opt);
  risk->add_option("--grid", opt.grid, "sample sizes n = m")->delimiter(',');
  risk->add_option("--replicates", opt.replicates, "replicates per grid point");
  risk->add_option("--estimator", opt.estimator, "shared, independent_nmc or both");
  auto* validate = app.add_subcommand("validate", "run the invariant suite");
  add_common(validate, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*sa) return run_sa(opt);
  if (*risk) return run_risk(opt);
  return run_validate(opt);
}
