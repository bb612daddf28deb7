#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "setsens/hsic.hpp"

namespace setsens {

struct PermutationTestResult {
  double statistic = 0.0;  // T_0
  std::size_t exceedances = 0;  // #{b : T_b >= T_0}
  std::size_t permutations = 0;
  double p_value = 1.0;
};

// Uniform permutation of 0..n-1 drawn from the stream derived from (seed, b).
std::vector<std::size_t> permutation_for(std::uint64_t seed, std::uint64_t b, std::size_t n);

// p = (1 + #{b : T_b >= T_0}) / (B + 1) with T_b the statistic on the input
// gram relabelled by the b-th permutation. Permutation b depends only on
// (seed, b), so the result is independent of `threads`.
PermutationTestResult permutation_test(const GramMatrix& input_gram, const GramMatrix& output_gram,
                                       std::size_t permutations, std::uint64_t seed,
                                       int threads = 1);

inline double permutation_pvalue(const GramMatrix& input_gram, const GramMatrix& output_gram,
                                 std::size_t permutations, std::uint64_t seed, int threads = 1) {
  return permutation_test(input_gram, output_gram, permutations, seed, threads).p_value;
}

enum class Label { influential, negligible };
std::string_view to_string(Label l) noexcept;

struct ScreeningResult {
  std::vector<double> p_values;
  std::vector<Label> labels;
  std::vector<std::size_t> ranking;  // by first-order index; negligible inputs included
  double alpha = 0.05;
};

ScreeningResult screen_and_rank(const IndexTable& table, std::span<const double> p_values,
                                double alpha);

}  // namespace setsens
