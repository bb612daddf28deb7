#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "setsens/config.hpp"
#include "setsens/kernels.hpp"

namespace setsens {

// Plug-in constants of the quadratic-risk bounds for HSIC(U_A, Gamma).
struct RiskConstants {
  double sigma1_sq = 0.0;  // Var of (K_A - 1) k_set over pairs
  double sigma2_sq = 0.0;  // Var of row-conditional means of the same summand
  double sigma3_sq = 0.0;  // mean of (K_A - 1)^2 f (1 - f)
  double sigma4_sq = 0.0;  // mean of |K_A - 1| f (1 - f)
  double rate = 0.0;       // L = volume / (2 sigma^2)
  double h_ref = 0.0;      // reference HSIC value
  double bandwidth = 0.0;  // sigma^2 of the set kernel, fixed for the whole benchmark
  std::size_t n_ref = 0;
  std::size_t m_ref = 0;
};

// What is being estimated: HSIC(U_target, Gamma) for a single-component model.
struct RiskSetup {
  std::string model = "toy";
  OscillatorSettings oscillator;
  std::size_t target_input = 0;
  InputKernelSpec kernel{InputKernelFamily::sobolev1, 1.0, 64};
  bool auto_lengthscale = true;  // sd of the transformed column for non-Sobolev kernels

  static RiskSetup from_config(const StudyConfig& config);
};

// Constants from one sample; f is the estimated symmetric-difference fraction.
RiskConstants constants_from_sample(const GramMatrix& input_gram, const MembershipMatrix& bits,
                                    double sigma2);

// Reference run at (n_ref, m_ref): heuristic bandwidth, H_ref and the constants.
RiskConstants estimate_constants(const RiskSetup& setup, std::size_t n_ref, std::size_t m_ref,
                                 std::uint64_t seed);

enum class BoundKind { shared, independent };

// Bound on E(H_hat - H)^2 divided by H_ref^2.
double theoretical_bound(const RiskConstants& c, std::size_t n, std::size_t m, BoundKind which);

// One replicate of the shared-inner-sample estimator (n*m oracle calls).
double shared_estimate(const RiskSetup& setup, double sigma2, std::size_t n, std::size_t m,
                       std::uint64_t seed, std::uint64_t* oracle_calls = nullptr);

// One replicate of the nested estimator with a fresh m-sample per pair
// (n(n-1)m oracle calls).
double independent_estimate(const RiskSetup& setup, double sigma2, std::size_t n, std::size_t m,
                            std::uint64_t seed, int threads = 1,
                            std::uint64_t* oracle_calls = nullptr);

struct RiskPoint {
  std::size_t n = 0;
  std::size_t m = 0;
  RiskEstimator estimator = RiskEstimator::shared;
  double empirical_risk = 0.0;
  double bound_shared = 0.0;
  double bound_independent = 0.0;
  double mean_estimate = 0.0;
  double standard_error = 0.0;  // of mean_estimate
};

struct RiskCurve {
  RiskConstants constants;
  std::size_t replicates = 0;
  std::vector<RiskPoint> points;
};

struct GridPoint {
  std::size_t n;
  std::size_t m;
};

// R replicates per grid point; replicate r of grid point g uses the stream
// derived from (seed, g, r). `estimator` may be `both`.
RiskCurve risk_curve(const RiskSetup& setup, const RiskConstants& constants,
                     const std::vector<GridPoint>& grid, std::size_t replicates,
                     RiskEstimator estimator, std::uint64_t seed, int threads = 1,
                     std::uint64_t budget = 2'000'000'000);

// Reference constants plus the configured grid (n = m at each point). Grid
// values above n_ref / 3 are rejected.
RiskCurve run_risk(const StudyConfig& config);

// Least-squares slope of log(risk) against log(n) for one estimator.
double log_risk_slope(const RiskCurve& curve, RiskEstimator estimator);

// Columns: n, m, estimator, empirical_risk, bound_shared, bound_independent.
std::string risk_csv(const RiskCurve& curve);
std::string risk_summary(const RiskCurve& curve);

}  // namespace setsens
