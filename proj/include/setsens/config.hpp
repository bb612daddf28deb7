#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "setsens/kernels.hpp"
#include "setsens/models.hpp"

namespace setsens {

enum class BandwidthMode { heuristic, fixed };
enum class RiskEstimator { shared, independent_nmc, both };

std::string_view to_string(RiskEstimator e) noexcept;
RiskEstimator parse_risk_estimator(std::string_view s);

struct RiskSettings {
  std::vector<std::size_t> grid{30, 50, 100, 200};  // n = m at each point
  std::size_t replicates = 100;
  RiskEstimator estimator = RiskEstimator::shared;
  std::size_t n_ref = 1000;
  std::size_t m_ref = 1000;
  std::size_t target_input = 0;
  std::uint64_t budget = 2'000'000'000;  // oracle calls per grid point, independent estimator
};

// Full description of a study. INI layout:
//
//   [study]      model, n, m, replicates, seed, alpha, permutations, threads
//   [kernel]     input, lengthscale (number or "auto"), quadrature_nodes
//   [bandwidth]  mode (heuristic|fixed), sigma2
//   [oscillator] forcing, horizon, dt
//   [risk]       grid, replicates, estimator, n_ref, m_ref, target_input, budget
//   [output]     dir
//
// Unknown sections or keys are rejected.
struct StudyConfig {
  std::string model = "toy";
  OscillatorSettings oscillator;
  std::size_t n = 100;
  std::size_t m = 100;
  std::size_t replicates = 20;
  std::uint64_t master_seed = 20240101;
  double alpha = 0.05;
  std::size_t permutations = 199;
  int threads = 1;

  InputKernelFamily input_kernel = InputKernelFamily::sobolev1;
  std::optional<double> lengthscale;  // empty: sd of the transformed sample
  std::size_t quadrature_nodes = 64;

  BandwidthMode bandwidth = BandwidthMode::heuristic;
  double sigma2 = 0.0;

  RiskSettings risk;
  std::string output_dir = "out";

  // Throws ConfigError on any violated constraint.
  void validate() const;
  // Canonical text form; parse_config(to_ini()) reproduces the config.
  std::string to_ini() const;
  // FNV-1a of the canonical text, hex encoded.
  std::string hash() const;
};

StudyConfig parse_config(std::string_view text);
StudyConfig load_config(const std::string& path);

}  // namespace setsens
