#include "setsens/setsens.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <exception>
#include <string>
#include <vector>

#include "setsens/config.hpp"
#include "setsens/errors.hpp"
#include "setsens/hsic.hpp"
#include "setsens/kernels.hpp"
#include "setsens/riskbench.hpp"
#include "setsens/study.hpp"
#include "setsens/validation.hpp"

struct setsens_config {
  setsens::StudyConfig config;
  std::string text;
};

struct setsens_report {
  setsens::StudyReport report;
  std::string summary;
};

struct setsens_risk {
  setsens::RiskCurve curve;
  std::string summary;
  std::vector<std::string> estimator_names;
};

struct setsens_validation {
  std::vector<setsens::ValidationCheck> checks;
};

namespace {

thread_local std::string g_last_error;

setsens_status fail(setsens_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions to status codes. Configuration problems map
// to SETSENS_ERR_CONFIG, everything else to `otherwise`.
template <class F>
setsens_status guarded(setsens_status otherwise, F&& fn) noexcept {
  try {
    fn();
    return SETSENS_OK;
  } catch (const setsens::ConfigError& e) {
    return fail(SETSENS_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(otherwise, e.what());
  } catch (...) {
    return fail(otherwise, "unknown error");
  }
}

setsens_status null_argument(const char* what) {
  return fail(SETSENS_ERR_ARGUMENT, std::string("null argument: ") + what);
}

}  // namespace

extern "C" {

const char* setsens_version(void) { return SETSENS_VERSION; }

const char* setsens_last_error(void) { return g_last_error.c_str(); }

setsens_status setsens_config_from_file(const char* path, setsens_config** out) {
  if (!path || !out) return null_argument("path/out");
  return guarded(SETSENS_ERR_RUNTIME, [&] {
    auto cfg = setsens::load_config(path);
    *out = new setsens_config{cfg, cfg.to_ini()};
  });
}

setsens_status setsens_config_from_string(const char* text, setsens_config** out) {
  if (!text || !out) return null_argument("text/out");
  return guarded(SETSENS_ERR_RUNTIME, [&] {
    auto cfg = setsens::parse_config(text);
    *out = new setsens_config{cfg, cfg.to_ini()};
  });
}

setsens_status setsens_config_set_seed(setsens_config* cfg, uint64_t seed) {
  if (!cfg) return null_argument("cfg");
  cfg->config.master_seed = seed;
  cfg->text = cfg->config.to_ini();
  return SETSENS_OK;
}

setsens_status setsens_config_set_threads(setsens_config* cfg, int threads) {
  if (!cfg) return null_argument("cfg");
  if (threads < 1) return fail(SETSENS_ERR_CONFIG, "threads must be at least 1");
  cfg->config.threads = threads;
  cfg->text = cfg->config.to_ini();
  return SETSENS_OK;
}

setsens_status setsens_config_set_output_dir(setsens_config* cfg, const char* dir) {
  if (!cfg || !dir) return null_argument("cfg/dir");
  cfg->config.output_dir = dir;
  cfg->text = cfg->config.to_ini();
  return SETSENS_OK;
}

setsens_status setsens_config_set_risk_grid(setsens_config* cfg, const size_t* sizes, size_t count) {
  if (!cfg || (!sizes && count)) return null_argument("cfg/sizes");
  return guarded(SETSENS_ERR_CONFIG, [&] {
    auto next = cfg->config;
    next.risk.grid.assign(sizes, sizes + count);
    next.validate();
    cfg->config = std::move(next);
    cfg->text = cfg->config.to_ini();
  });
}

setsens_status setsens_config_set_risk_replicates(setsens_config* cfg, size_t replicates) {
  if (!cfg) return null_argument("cfg");
  return guarded(SETSENS_ERR_CONFIG, [&] {
    auto next = cfg->config;
    next.risk.replicates = replicates;
    next.validate();
    cfg->config = std::move(next);
    cfg->text = cfg->config.to_ini();
  });
}

setsens_status setsens_config_set_risk_estimator(setsens_config* cfg, const char* name) {
  if (!cfg || !name) return null_argument("cfg/name");
  return guarded(SETSENS_ERR_CONFIG, [&] {
    cfg->config.risk.estimator = setsens::parse_risk_estimator(name);
    cfg->text = cfg->config.to_ini();
  });
}

const char* setsens_config_output_dir(const setsens_config* cfg) {
  return cfg ? cfg->config.output_dir.c_str() : "";
}

const char* setsens_config_text(const setsens_config* cfg) { return cfg ? cfg->text.c_str() : ""; }

void setsens_config_free(setsens_config* cfg) { delete cfg; }

setsens_status setsens_study_run(const setsens_config* cfg, setsens_report** out) {
  if (!cfg || !out) return null_argument("cfg/out");
  return guarded(SETSENS_ERR_RUNTIME, [&] {
    auto report = setsens::run_study(cfg->config);
    auto summary = setsens::summary_table(report);
    *out = new setsens_report{std::move(report), std::move(summary)};
  });
}

size_t setsens_report_num_inputs(const setsens_report* r) { return r ? r->report.input_names.size() : 0; }

size_t setsens_report_num_replicates(const setsens_report* r) { return r ? r->report.replicates.size() : 0; }

size_t setsens_report_num_failed(const setsens_report* r) { return r ? r->report.failed_replicates : 0; }

const char* setsens_report_input_name(const setsens_report* r, size_t input) {
  if (!r || input >= r->report.input_names.size()) return nullptr;
  return r->report.input_names[input].c_str();
}

setsens_status setsens_report_value(const setsens_report* r, size_t replicate, size_t input,
                                    double* first_order, double* total_order, double* p_value,
                                    int* influential, int* ok) {
  if (!r) return null_argument("report");
  if (replicate >= r->report.replicates.size() || input >= r->report.input_names.size())
    return fail(SETSENS_ERR_ARGUMENT, "replicate or input index out of range");
  const auto& rep = r->report.replicates[replicate];
  const double nan = std::nan("");
  if (first_order) *first_order = rep.ok ? rep.first_order[input] : nan;
  if (total_order) *total_order = rep.ok ? rep.total_order[input] : nan;
  if (p_value) *p_value = rep.ok ? rep.p_values[input] : nan;
  if (influential) *influential = rep.ok && rep.labels[input] == setsens::Label::influential;
  if (ok) *ok = rep.ok ? 1 : 0;
  return SETSENS_OK;
}

setsens_status setsens_report_aggregate(const setsens_report* r, size_t input, double* acceptance_rate,
                                        double* median_first_order, double* median_total_order) {
  if (!r) return null_argument("report");
  if (input >= r->report.aggregates.size()) return fail(SETSENS_ERR_ARGUMENT, "input index out of range");
  const auto& a = r->report.aggregates[input];
  if (acceptance_rate) *acceptance_rate = a.acceptance_rate;
  if (median_first_order) *median_first_order = a.first_order.median;
  if (median_total_order) *median_total_order = a.total_order.median;
  return SETSENS_OK;
}

uint64_t setsens_report_model_evaluations(const setsens_report* r, size_t replicate) {
  if (!r || replicate >= r->report.replicates.size()) return 0;
  return r->report.replicates[replicate].model_evaluations;
}

setsens_status setsens_report_write(const setsens_report* r, const char* dir) {
  if (!r || !dir) return null_argument("report/dir");
  return guarded(SETSENS_ERR_RUNTIME, [&] { setsens::write_outputs(r->report, dir); });
}

const char* setsens_report_summary(const setsens_report* r) { return r ? r->summary.c_str() : ""; }

void setsens_report_free(setsens_report* r) { delete r; }

setsens_status setsens_risk_run(const setsens_config* cfg, setsens_risk** out) {
  if (!cfg || !out) return null_argument("cfg/out");
  return guarded(SETSENS_ERR_RUNTIME, [&] {
    auto curve = setsens::run_risk(cfg->config);
    auto summary = setsens::risk_summary(curve);
    std::vector<std::string> names;
    for (const auto& p : curve.points) names.emplace_back(setsens::to_string(p.estimator));
    *out = new setsens_risk{std::move(curve), std::move(summary), std::move(names)};
  });
}

size_t setsens_risk_num_points(const setsens_risk* risk) { return risk ? risk->curve.points.size() : 0; }

setsens_status setsens_risk_point(const setsens_risk* risk, size_t index, size_t* n, size_t* m,
                                  const char** estimator, double* empirical_risk,
                                  double* bound_shared, double* bound_independent) {
  if (!risk) return null_argument("risk");
  if (index >= risk->curve.points.size()) return fail(SETSENS_ERR_ARGUMENT, "grid index out of range");
  const auto& p = risk->curve.points[index];
  if (n) *n = p.n;
  if (m) *m = p.m;
  if (estimator) *estimator = risk->estimator_names[index].c_str();
  if (empirical_risk) *empirical_risk = p.empirical_risk;
  if (bound_shared) *bound_shared = p.bound_shared;
  if (bound_independent) *bound_independent = p.bound_independent;
  return SETSENS_OK;
}

setsens_status setsens_risk_write_csv(const setsens_risk* risk, const char* path) {
  if (!risk || !path) return null_argument("risk/path");
  return guarded(SETSENS_ERR_RUNTIME, [&] {
    std::FILE* f = std::fopen(path, "wb");
    if (!f) throw std::runtime_error(std::string("cannot write '") + path + "'");
    const auto csv = setsens::risk_csv(risk->curve);
    const bool okw = std::fwrite(csv.data(), 1, csv.size(), f) == csv.size();
    const bool okc = std::fclose(f) == 0;
    if (!okw || !okc) throw std::runtime_error(std::string("write failed for '") + path + "'");
  });
}

const char* setsens_risk_summary(const setsens_risk* risk) { return risk ? risk->summary.c_str() : ""; }

void setsens_risk_free(setsens_risk* risk) { delete risk; }

setsens_status setsens_validate_run(uint64_t seed, setsens_validation** out) {
  if (!out) return null_argument("out");
  return guarded(SETSENS_ERR_RUNTIME,
                 [&] { *out = new setsens_validation{setsens::run_validation(seed)}; });
}

size_t setsens_validation_num_checks(const setsens_validation* v) { return v ? v->checks.size() : 0; }

setsens_status setsens_validation_check(const setsens_validation* v, size_t index, const char** name,
                                        int* passed, const char** detail) {
  if (!v) return null_argument("validation");
  if (index >= v->checks.size()) return fail(SETSENS_ERR_ARGUMENT, "check index out of range");
  const auto& c = v->checks[index];
  if (name) *name = c.name.c_str();
  if (passed) *passed = c.passed ? 1 : 0;
  if (detail) *detail = c.detail.c_str();
  return SETSENS_OK;
}

void setsens_validation_free(setsens_validation* v) { delete v; }

setsens_status setsens_sobolev_kernel(double x, double y, double* out) {
  if (!out) return null_argument("out");
  return guarded(SETSENS_ERR_ARGUMENT, [&] { *out = setsens::sobolev_kernel(x, y); });
}

setsens_status setsens_hsic_ustat(const double* input_gram, const double* output_gram, size_t n,
                                  double* out) {
  if (!input_gram || !output_gram || !out) return null_argument("grams/out");
  return guarded(SETSENS_ERR_ARGUMENT, [&] {
    setsens::GramMatrix a(n), b(n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        a(i, j) = input_gram[i * n + j];
        b(i, j) = output_gram[i * n + j];
      }
    *out = setsens::hsic_ustat(a, b);
  });
}

setsens_status setsens_set_kernel_gram(const uint8_t* membership, size_t n, size_t m,
                                       double domain_volume, double sigma2, double* out_gram) {
  if ((!membership && n * m) || !out_gram) return null_argument("membership/out_gram");
  return guarded(SETSENS_ERR_ARGUMENT, [&] {
    setsens::MembershipMatrix bits(n, m, domain_volume);
    for (size_t i = 0; i < n; ++i)
      for (size_t k = 0; k < m; ++k) bits.set(i, k, membership[i * m + k] != 0);
    const auto g = setsens::set_kernel_gram(bits, {sigma2, domain_volume});
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) out_gram[i * n + j] = g(i, j);
  });
}

}  // extern "C"
