#include <cmath>
#include <vector>

#include "doctest.h"
#include "setsens/errors.hpp"
#include "setsens/hsic.hpp"
#include "setsens/kernels.hpp"
#include "setsens/rng.hpp"
#include "setsens/validation.hpp"

using namespace setsens;

namespace {

GramMatrix random_sobolev_gram(Rng& rng, std::size_t n, std::vector<double>* xs_out = nullptr) {
  std::vector<double> xs(n);
  for (auto& x : xs) x = rng.uniform();
  if (xs_out) *xs_out = xs;
  return anovaize_gram({InputKernelFamily::sobolev1, 1.0, 64}, xs);
}

GramMatrix random_output_gram(Rng& rng, std::size_t n) {
  std::vector<double> z(n);
  for (auto& v : z) v = rng.uniform();
  GramMatrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = std::exp(-std::abs(z[i] - z[j]) / 0.3);
  return g;
}

double naive_ustat(const GramMatrix& a, const GramMatrix& b) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += (a(i, j) - 1.0) * b(i, j);
  return s / (static_cast<double>(n) * (n - 1));
}

}  // namespace

TEST_CASE("U-statistic closed forms") {
  GramMatrix a(2, 1.0), b(2, 1.0);
  a.set_sym(0, 1, 2.5);
  b.set_sym(0, 1, 0.4);
  CHECK(hsic_ustat(a, b) == doctest::Approx(1.5 * 0.4).epsilon(1e-15));

  Rng rng(11);
  const auto k = random_sobolev_gram(rng, 7);
  const GramMatrix ones(7, 1.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = i + 1; j < 7; ++j) mean += k(i, j) - 1.0;
  mean /= 21.0;
  CHECK(hsic_ustat(k, ones) == doctest::Approx(mean).epsilon(1e-13));
}

TEST_CASE("U-statistic equals the naive double loop") {
  Rng rng(12);
  for (int t = 0; t < 5; ++t) {
    const auto a = random_sobolev_gram(rng, 50);
    const auto b = random_output_gram(rng, 50);
    const double fast = hsic_ustat(a, b), slow = naive_ustat(a, b);
    CHECK(std::abs(fast - slow) <= 1e-12 * std::abs(slow));
  }
}

TEST_CASE("permuted statistic relabels the input gram") {
  Rng rng(13);
  const auto a = random_sobolev_gram(rng, 20);
  const auto b = random_output_gram(rng, 20);
  std::vector<std::size_t> perm(20);
  for (std::size_t i = 0; i < 20; ++i) perm[i] = (i * 7 + 3) % 20;
  GramMatrix ap(20);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j) ap(i, j) = a(perm[i], perm[j]);
  CHECK(hsic_ustat_permuted(a, b, perm) == doctest::Approx(naive_ustat(ap, b)).epsilon(1e-12));

  std::vector<std::size_t> id(20);
  for (std::size_t i = 0; i < 20; ++i) id[i] = i;
  CHECK(hsic_ustat_permuted(a, b, id) == doctest::Approx(hsic_ustat(a, b)).epsilon(1e-14));
}

TEST_CASE("size mismatches are rejected") {
  GramMatrix a(3, 1.0), b(4, 1.0);
  CHECK_THROWS(hsic_ustat(a, b));
  GramMatrix one(1, 1.0);
  CHECK_THROWS(hsic_ustat(one, one));
}

TEST_CASE("indices") {
  Rng rng(14);
  const auto b = random_output_gram(rng, 30);

  SUBCASE("single input") {
    std::vector<GramMatrix> g{random_sobolev_gram(rng, 30)};
    const auto t = indices(g, b);
    CHECK(t.first_order[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.total_order[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("two inputs") {
    std::vector<GramMatrix> g{random_sobolev_gram(rng, 30), random_sobolev_gram(rng, 30)};
    const auto t = indices(g, b);
    const double h_all = hsic_subset(g, b, {0, 1}).value;
    const double h2 = hsic_subset(g, b, {1}).value;
    CHECK(t.denominator == doctest::Approx(h_all).epsilon(1e-14));
    CHECK(t.total_order[0] == doctest::Approx(1.0 - h2 / h_all).epsilon(1e-12));
    CHECK(t.first_order[1] == doctest::Approx(h2 / h_all).epsilon(1e-12));
    CHECK(hsic_subset(g, b, {}).value == 0.0);
  }
  SUBCASE("inputs without signal are non-informative") {
    std::vector<GramMatrix> flat{GramMatrix(30, 1.0), GramMatrix(30, 1.0)};
    CHECK_THROWS_AS(indices(flat, b), NonInformativeOutputError);
  }
}

TEST_CASE("ranking is descending with stable ties") {
  IndexTable t;
  t.first_order = {0.2, 0.7, 0.2, -0.01};
  CHECK(t.ranking() == std::vector<std::size_t>{1, 0, 2, 3});
}

TEST_CASE("decomposition residual") {
  Rng rng(15);
  const auto b = random_output_gram(rng, 50);
  std::vector<GramMatrix> g1{random_sobolev_gram(rng, 50)};
  CHECK(decomposition_residual(g1, b) == 0.0);

  for (std::size_t p : {2u, 3u, 4u}) {
    std::vector<GramMatrix> g;
    for (std::size_t j = 0; j < p; ++j) g.push_back(random_sobolev_gram(rng, 50));
    std::vector<std::size_t> all(p);
    for (std::size_t j = 0; j < p; ++j) all[j] = j;
    const double scale = std::abs(hsic_subset(g, b, all).value);
    CHECK(decomposition_residual(g, b) <= (p == 2 ? 1e-12 : 1e-10) * scale);
  }
  std::vector<GramMatrix> g5(5, GramMatrix(4, 1.0));
  CHECK_THROWS_WITH(decomposition_residual(g5, GramMatrix(4, 1.0)), doctest::Contains("enumeration budget"));
}

TEST_CASE("population oracle") {
  SUBCASE("two-point support with Z = U") {
    DiscreteJointModel m;
    m.joint = {{0.5, 0.0}, {0.0, 0.5}};
    m.input_kernel = {{2.0, 0.5}, {0.5, 1.0}};
    m.output_kernel = {{1.0, 0.3}, {0.3, 1.0}};
    // E[KK'] = (2 + 2*0.5*0.3 + 1)/4 = 0.825, E K = 1, E k = 0.65,
    // cross = 0.5*(1.25*0.65) + 0.5*(0.75*0.65) = 0.65
    CHECK(population_hsic_oracle(m, HsicFormula::three_term) == doctest::Approx(0.175).epsilon(1e-14));
    // not ANOVA: rows average to 1.25 and 0.75 under the marginal
    CHECK_FALSE(m.input_kernel_is_anova());
    CHECK_THROWS(population_hsic_oracle(m, HsicFormula::anova_simplified));
  }
  SUBCASE("independent law gives zero") {
    Rng rng(16);
    auto m = random_anova_model(rng);
    const auto pu = m.input_marginal();
    const auto pz = m.output_marginal();
    for (std::size_t a = 0; a < pu.size(); ++a)
      for (std::size_t b = 0; b < pz.size(); ++b) m.joint[a][b] = pu[a] * pz[b];
    CHECK(std::abs(population_hsic_oracle(m, HsicFormula::three_term)) < 1e-14);
    CHECK(std::abs(population_hsic_oracle(m, HsicFormula::anova_simplified)) < 1e-14);
  }
  SUBCASE("formulas agree for ANOVA kernels") {
    Rng rng(17);
    for (int t = 0; t < 50; ++t) {
      const auto m = random_anova_model(rng);
      CHECK(m.input_kernel_is_anova());
      const double a = population_hsic_oracle(m, HsicFormula::three_term);
      const double b = population_hsic_oracle(m, HsicFormula::anova_simplified);
      CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
    }
  }
  SUBCASE("invalid joints are rejected") {
    DiscreteJointModel m;
    m.joint = {{0.5, 0.6}};
    m.input_kernel = {{1.0}};
    m.output_kernel = {{1.0, 0.0}, {0.0, 1.0}};
    CHECK_THROWS(population_hsic_oracle(m, HsicFormula::three_term));
  }
}

TEST_CASE("U-statistic is unbiased for the population value") {
  Rng rng(18);
  const auto m = random_anova_model(rng);
  const double truth = population_hsic_oracle(m, HsicFormula::three_term);
  const std::size_t na = m.input_support(), nb = m.output_support();
  std::vector<double> cdf;
  double acc = 0.0;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) cdf.push_back(acc += m.joint[a][b]);

  const std::size_t n = 20, reps = 500;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    std::vector<std::size_t> ua(n), zb(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = rng.uniform() * acc;
      std::size_t cell = 0;
      while (cell + 1 < cdf.size() && cdf[cell] < p) ++cell;
      ua[i] = cell / nb;
      zb[i] = cell % nb;
    }
    GramMatrix ka(n), kz(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        ka(i, j) = m.input_kernel[ua[i]][ua[j]];
        kz(i, j) = m.output_kernel[zb[i]][zb[j]];
      }
    const double h = hsic_ustat(ka, kz);
    sum += h;
    sum2 += h * h;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / (reps - 1));
  CHECK(std::abs(mean - truth) < 4 * se);
}
