#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "setsens/kernels.hpp"

namespace setsens {

struct HsicEstimate {
  double value = 0.0;
  std::vector<std::size_t> subset;
  std::size_t n = 0;
};

// Unbiased U-statistic with an ANOVA input gram:
//   2/(n(n-1)) * sum_{i<j} (K_A[i][j] - 1) * k_Z[i][j]
double hsic_ustat(const GramMatrix& input_gram, const GramMatrix& output_gram);

// Same statistic with the input gram relabelled by perm, i.e. K_A[perm[i]][perm[j]].
double hsic_ustat_permuted(const GramMatrix& input_gram, const GramMatrix& output_gram,
                           std::span<const std::size_t> perm);

// HSIC(U_A, Z) for a subset A of the per-input grams (empty A gives 0).
HsicEstimate hsic_subset(std::span<const GramMatrix> grams, const GramMatrix& output_gram,
                         std::vector<std::size_t> subset);

struct IndexTable {
  std::vector<double> first_order;
  std::vector<double> total_order;
  std::vector<double> hsic_single;   // HSIC(U_i, Z)
  std::vector<double> hsic_without;  // HSIC(U_{-i}, Z)
  double denominator = 0.0;          // HSIC(U, Z)

  std::size_t inputs() const noexcept { return first_order.size(); }
  // Descending first-order index, ties by ascending input index.
  std::vector<std::size_t> ranking() const;
};

IndexTable indices(std::span<const GramMatrix> grams, const GramMatrix& output_gram);

// |HSIC(U) - sum_{A} sum_{B subset A} (-1)^{|A|-|B|} HSIC(U_B)| on one sample.
double decomposition_residual(std::span<const GramMatrix> grams, const GramMatrix& output_gram);

// Finite joint law of (U, Z) with kernel tables on each support.
struct DiscreteJointModel {
  std::vector<std::vector<double>> joint;          // P(U = a, Z = b)
  std::vector<std::vector<double>> input_kernel;   // K(a, a')
  std::vector<std::vector<double>> output_kernel;  // k(b, b')

  std::size_t input_support() const noexcept { return joint.size(); }
  std::size_t output_support() const noexcept { return joint.empty() ? 0 : joint.front().size(); }
  std::vector<double> input_marginal() const;
  std::vector<double> output_marginal() const;
  void validate() const;
  // Whether K - 1 integrates to zero against the input marginal.
  bool input_kernel_is_anova(double tol = 1e-12) const;
};

enum class HsicFormula { three_term, anova_simplified };

double population_hsic_oracle(const DiscreteJointModel& model, HsicFormula formula);

}  // namespace setsens
