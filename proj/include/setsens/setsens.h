/* C interface to the set-output sensitivity analysis library.
 *
 * All objects are opaque handles created by a *_run / *_from_* call and
 * released with the matching *_free. Every fallible call returns a
 * setsens_status; on failure setsens_last_error() describes the problem
 * (thread-local, valid until the next call on the same thread).
 */
#ifndef SETSENS_SETSENS_H
#define SETSENS_SETSENS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SETSENS_BUILDING_LIBRARY)
#    define SETSENS_API __declspec(dllexport)
#  else
#    define SETSENS_API __declspec(dllimport)
#  endif
#else
#  define SETSENS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum setsens_status {
  SETSENS_OK = 0,
  SETSENS_ERR_ARGUMENT = 1, /* null handle, index out of range, bad numeric input */
  SETSENS_ERR_CONFIG = 2,   /* invalid study description */
  SETSENS_ERR_RUNTIME = 3   /* failure while running (I/O, numerical breakdown) */
} setsens_status;

typedef struct setsens_config setsens_config;
typedef struct setsens_report setsens_report;
typedef struct setsens_risk setsens_risk;
typedef struct setsens_validation setsens_validation;

SETSENS_API const char* setsens_version(void);
SETSENS_API const char* setsens_last_error(void);

/* ---- configuration ---------------------------------------------------- */

SETSENS_API setsens_status setsens_config_from_file(const char* path, setsens_config** out);
SETSENS_API setsens_status setsens_config_from_string(const char* text, setsens_config** out);
SETSENS_API setsens_status setsens_config_set_seed(setsens_config* cfg, uint64_t seed);
SETSENS_API setsens_status setsens_config_set_threads(setsens_config* cfg, int threads);
SETSENS_API setsens_status setsens_config_set_output_dir(setsens_config* cfg, const char* dir);
SETSENS_API setsens_status setsens_config_set_risk_grid(setsens_config* cfg, const size_t* sizes,
                                                        size_t count);
SETSENS_API setsens_status setsens_config_set_risk_replicates(setsens_config* cfg, size_t replicates);
/* "shared", "independent_nmc" or "both" */
SETSENS_API setsens_status setsens_config_set_risk_estimator(setsens_config* cfg, const char* name);
/* Output directory currently configured (owned by the handle). */
SETSENS_API const char* setsens_config_output_dir(const setsens_config* cfg);
/* Canonical text of the configuration (owned by the handle). */
SETSENS_API const char* setsens_config_text(const setsens_config* cfg);
SETSENS_API void setsens_config_free(setsens_config* cfg);

/* ---- sensitivity study ------------------------------------------------ */

SETSENS_API setsens_status setsens_study_run(const setsens_config* cfg, setsens_report** out);
SETSENS_API size_t setsens_report_num_inputs(const setsens_report* report);
SETSENS_API size_t setsens_report_num_replicates(const setsens_report* report);
SETSENS_API size_t setsens_report_num_failed(const setsens_report* report);
SETSENS_API const char* setsens_report_input_name(const setsens_report* report, size_t input);
/* Per-replicate values; *ok is 0 for failed replicates (values then NaN). */
SETSENS_API setsens_status setsens_report_value(const setsens_report* report, size_t replicate,
                                                size_t input, double* first_order,
                                                double* total_order, double* p_value,
                                                int* influential, int* ok);
SETSENS_API setsens_status setsens_report_aggregate(const setsens_report* report, size_t input,
                                                    double* acceptance_rate,
                                                    double* median_first_order,
                                                    double* median_total_order);
SETSENS_API uint64_t setsens_report_model_evaluations(const setsens_report* report, size_t replicate);
/* Writes sa_results.csv and sa_report.json into dir. */
SETSENS_API setsens_status setsens_report_write(const setsens_report* report, const char* dir);
/* Human-readable summary (owned by the handle). */
SETSENS_API const char* setsens_report_summary(const setsens_report* report);
SETSENS_API void setsens_report_free(setsens_report* report);

/* ---- risk benchmark --------------------------------------------------- */

SETSENS_API setsens_status setsens_risk_run(const setsens_config* cfg, setsens_risk** out);
SETSENS_API size_t setsens_risk_num_points(const setsens_risk* risk);
SETSENS_API setsens_status setsens_risk_point(const setsens_risk* risk, size_t index, size_t* n,
                                              size_t* m, const char** estimator,
                                              double* empirical_risk, double* bound_shared,
                                              double* bound_independent);
SETSENS_API setsens_status setsens_risk_write_csv(const setsens_risk* risk, const char* path);
SETSENS_API const char* setsens_risk_summary(const setsens_risk* risk);
SETSENS_API void setsens_risk_free(setsens_risk* risk);

/* ---- invariant suite -------------------------------------------------- */

SETSENS_API setsens_status setsens_validate_run(uint64_t seed, setsens_validation** out);
SETSENS_API size_t setsens_validation_num_checks(const setsens_validation* v);
SETSENS_API setsens_status setsens_validation_check(const setsens_validation* v, size_t index,
                                                    const char** name, int* passed,
                                                    const char** detail);
SETSENS_API void setsens_validation_free(setsens_validation* v);

/* ---- numerical primitives --------------------------------------------- */

SETSENS_API setsens_status setsens_sobolev_kernel(double x, double y, double* out);
/* Row-major n x n grams. */
SETSENS_API setsens_status setsens_hsic_ustat(const double* input_gram, const double* output_gram,
                                              size_t n, double* out);
/* membership: row-major n x m bytes (0/1); out_gram: n x n. */
SETSENS_API setsens_status setsens_set_kernel_gram(const uint8_t* membership, size_t n, size_t m,
                                                   double domain_volume, double sigma2,
                                                   double* out_gram);

#ifdef __cplusplus
}
#endif

#endif /* SETSENS_SETSENS_H */
