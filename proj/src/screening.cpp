#include "setsens/screening.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "setsens/rng.hpp"

namespace setsens {

std::vector<std::size_t> permutation_for(std::uint64_t seed, std::uint64_t b, std::size_t n) {
  Rng rng(derive_seed(seed, {tag(StreamTag::permutations), b}));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  return perm;
}

PermutationTestResult permutation_test(const GramMatrix& input_gram, const GramMatrix& output_gram,
                                       std::size_t permutations, std::uint64_t seed, int threads) {
  if (permutations < 19) throw std::invalid_argument("resolution below alpha=0.05");
  PermutationTestResult r;
  r.statistic = hsic_ustat(input_gram, output_gram);
  r.permutations = permutations;
  const std::size_t n = input_gram.size();
  std::vector<char> exceeds(permutations, 0);

#pragma omp parallel for schedule(static) num_threads(std::max(threads, 1)) if (threads > 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(permutations); ++b) {
    const auto perm = permutation_for(seed, static_cast<std::uint64_t>(b), n);
    exceeds[static_cast<std::size_t>(b)] =
        hsic_ustat_permuted(input_gram, output_gram, perm) >= r.statistic;
  }
  r.exceedances = static_cast<std::size_t>(std::count(exceeds.begin(), exceeds.end(), 1));
  r.p_value = static_cast<double>(1 + r.exceedances) / static_cast<double>(permutations + 1);
  return r;
}

std::string_view to_string(Label l) noexcept {
  return l == Label::influential ? "influential" : "negligible";
}

ScreeningResult screen_and_rank(const IndexTable& table, std::span<const double> p_values,
                                double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (p_values.size() != table.inputs())
    throw std::invalid_argument("screening: one p-value per input is required");
  ScreeningResult s;
  s.alpha = alpha;
  s.p_values.assign(p_values.begin(), p_values.end());
  for (double p : p_values) s.labels.push_back(p <= alpha ? Label::influential : Label::negligible);
  s.ranking = table.ranking();
  return s;
}

}  // namespace setsens
