#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "setsens/config.hpp"
#include "setsens/models.hpp"
#include "setsens/rng.hpp"
#include "setsens/screening.hpp"

namespace setsens {

// Raw draw of n input vectors from the model marginals, plus its [0,1] image.
struct InputSample {
  PointSet raw;
  PointSet uniform;
};

InputSample sample_inputs(const ModelInstance& model, std::size_t n, Rng& rng);

// Per-input ANOVA grams on the transformed sample. `lengthscale` empty means
// the sample standard deviation of each transformed column.
std::vector<GramMatrix> input_grams(const PointSet& uniform, InputKernelFamily family,
                                    std::optional<double> lengthscale,
                                    std::size_t quadrature_nodes,
                                    std::vector<double>* used_lengthscales = nullptr);

struct OutputGram {
  GramMatrix gram;
  std::vector<double> sigma2;  // one per output component
};

// Membership tables and set-kernel gram for every output component (product
// when there are several). Throws DegenerateOutputError on a zero bandwidth.
OutputGram output_gram(const ModelInstance& model, const PointSet& inputs, const PointSet& points,
                       BandwidthMode mode, double fixed_sigma2, int threads = 1);

struct ReplicateResult {
  std::size_t index = 0;
  bool ok = false;
  std::string diagnostic;
  std::vector<double> sigma2;
  std::vector<double> lengthscales;
  double hsic_total = 0.0;
  std::vector<double> first_order;
  std::vector<double> total_order;
  std::vector<double> p_values;
  std::vector<Label> labels;
  std::vector<std::size_t> ranking;
  std::uint64_t model_evaluations = 0;

  bool operator==(const ReplicateResult&) const = default;
};

// min, lower quartile, median, upper quartile, max (linear interpolation).
struct Quartiles {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  bool operator==(const Quartiles&) const = default;
};

Quartiles quartiles(std::vector<double> values);

struct InputAggregate {
  std::string name;
  double acceptance_rate = 0.0;  // fraction of successful replicates with p > alpha
  Quartiles first_order;
  Quartiles total_order;
  bool operator==(const InputAggregate&) const = default;
};

struct StudyReport {
  StudyConfig config;
  std::string config_text;
  std::string config_hash;
  std::string software_version;
  std::vector<std::string> input_names;
  bool product_output = false;  // product of set kernels; may not be characteristic
  std::vector<ReplicateResult> replicates;
  std::vector<InputAggregate> aggregates;
  std::size_t failed_replicates = 0;

  // Ranking by median first-order index across successful replicates.
  std::vector<std::size_t> median_ranking() const;
};

ReplicateResult run_replicate(const StudyConfig& config, std::size_t replicate);
StudyReport run_study(const StudyConfig& config);

// sa_results.csv and sa_report.json in `dir` (created if missing).
void write_outputs(const StudyReport& report, const std::string& dir);
std::string results_csv(const StudyReport& report);
std::string report_json(const StudyReport& report);
StudyReport parse_report_json(const std::string& text);
std::string summary_table(const StudyReport& report);

// "%.17g" formatting used for every float in machine-readable outputs.
std::string format_real(double v);

}  // namespace setsens
