#include "setsens/hsic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "setsens/errors.hpp"

namespace setsens {

namespace {

void check_pair(const GramMatrix& a, const GramMatrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("HSIC: gram sizes differ");
  if (a.size() < 2) throw std::invalid_argument("HSIC: at least two samples are required");
}

double pair_normaliser(std::size_t n) {
  return 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
}

// Mean absolute summand; the reference scale for "non-informative" checks.
double summand_scale(const GramMatrix& input_gram, const GramMatrix& output_gram) {
  const std::size_t n = input_gram.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      s += std::abs((input_gram(i, j) - 1.0) * output_gram(i, j));
  return s * pair_normaliser(n);
}

}  // namespace

double hsic_ustat(const GramMatrix& input_gram, const GramMatrix& output_gram) {
  check_pair(input_gram, output_gram);
  const std::size_t n = input_gram.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) row += (input_gram(i, j) - 1.0) * output_gram(i, j);
    s += row;
  }
  return s * pair_normaliser(n);
}

double hsic_ustat_permuted(const GramMatrix& input_gram, const GramMatrix& output_gram,
                           std::span<const std::size_t> perm) {
  check_pair(input_gram, output_gram);
  const std::size_t n = input_gram.size();
  if (perm.size() != n) throw std::invalid_argument("HSIC: permutation length differs from n");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pi = perm[i];
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) row += (input_gram(pi, perm[j]) - 1.0) * output_gram(i, j);
    s += row;
  }
  return s * pair_normaliser(n);
}

HsicEstimate hsic_subset(std::span<const GramMatrix> grams, const GramMatrix& output_gram,
                         std::vector<std::size_t> subset) {
  std::vector<const GramMatrix*> chosen;
  for (auto i : subset) {
    if (i >= grams.size()) throw std::out_of_range("HSIC: input index out of range");
    chosen.push_back(&grams[i]);
  }
  const GramMatrix k = product_gram(chosen, output_gram.size());
  return {hsic_ustat(k, output_gram), std::move(subset), output_gram.size()};
}

std::vector<std::size_t> IndexTable::ranking() const {
  std::vector<std::size_t> order(first_order.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return first_order[a] > first_order[b];
  });
  return order;
}

IndexTable indices(std::span<const GramMatrix> grams, const GramMatrix& output_gram) {
  const std::size_t p = grams.size();
  if (p == 0) throw std::invalid_argument("indices: at least one input is required");
  const std::size_t n = output_gram.size();

  std::vector<const GramMatrix*> all;
  for (const auto& g : grams) all.push_back(&g);
  const GramMatrix full = product_gram(all, n);

  IndexTable t;
  t.denominator = hsic_ustat(full, output_gram);
  const double scale = summand_scale(full, output_gram);
  if (!(std::abs(t.denominator) >= 1e-14 * scale) || scale == 0.0)
    throw NonInformativeOutputError();

  t.first_order.resize(p);
  t.total_order.resize(p);
  t.hsic_single.resize(p);
  t.hsic_without.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    t.hsic_single[i] = hsic_ustat(grams[i], output_gram);
    std::vector<const GramMatrix*> rest;
    for (std::size_t j = 0; j < p; ++j)
      if (j != i) rest.push_back(&grams[j]);
    t.hsic_without[i] = hsic_ustat(product_gram(rest, n), output_gram);
    t.first_order[i] = t.hsic_single[i] / t.denominator;
    t.total_order[i] = 1.0 - t.hsic_without[i] / t.denominator;
  }
  return t;
}

double decomposition_residual(std::span<const GramMatrix> grams, const GramMatrix& output_gram) {
  const std::size_t p = grams.size();
  if (p > 4) throw std::invalid_argument("enumeration budget");
  const std::size_t n = output_gram.size();
  const std::size_t subsets = std::size_t{1} << p;

  std::vector<double> h(subsets, 0.0);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    std::vector<const GramMatrix*> chosen;
    for (std::size_t i = 0; i < p; ++i)
      if (mask >> i & 1u) chosen.push_back(&grams[i]);
    h[mask] = hsic_ustat(product_gram(chosen, n), output_gram);
  }

  double total = 0.0;
  for (std::size_t a = 0; a < subsets; ++a) {
    // Enumerate B subset of A, including the empty set.
    double inner = 0.0;
    for (std::size_t b = a;; b = (b - 1) & a) {
      const int sign = ((std::popcount(a) - std::popcount(b)) & 1) ? -1 : 1;
      inner += sign * h[b];
      if (b == 0) break;
    }
    total += inner;
  }
  return std::abs(h[subsets - 1] - total);
}

std::vector<double> DiscreteJointModel::input_marginal() const {
  std::vector<double> p(input_support(), 0.0);
  for (std::size_t a = 0; a < p.size(); ++a)
    for (double v : joint[a]) p[a] += v;
  return p;
}

std::vector<double> DiscreteJointModel::output_marginal() const {
  std::vector<double> q(output_support(), 0.0);
  for (const auto& row : joint)
    for (std::size_t b = 0; b < q.size(); ++b) q[b] += row[b];
  return q;
}

void DiscreteJointModel::validate() const {
  const std::size_t na = input_support(), nb = output_support();
  if (na == 0 || nb == 0) throw std::invalid_argument("discrete model: empty support");
  double total = 0.0;
  for (const auto& row : joint) {
    if (row.size() != nb) throw std::invalid_argument("discrete model: ragged probability table");
    for (double v : row) {
      if (!(v >= 0.0)) throw std::invalid_argument("discrete model: negative probability");
      total += v;
    }
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("discrete model: probabilities must sum to 1");
  auto square = [](const auto& m, std::size_t k) {
    if (m.size() != k) return false;
    for (const auto& r : m)
      if (r.size() != k) return false;
    return true;
  };
  if (!square(input_kernel, na) || !square(output_kernel, nb))
    throw std::invalid_argument("discrete model: kernel tables must match the supports");
}

bool DiscreteJointModel::input_kernel_is_anova(double tol) const {
  const auto p = input_marginal();
  for (std::size_t a = 0; a < p.size(); ++a) {
    double s = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) s += p[c] * (input_kernel[a][c] - 1.0);
    if (std::abs(s) > tol) return false;
  }
  return true;
}

double population_hsic_oracle(const DiscreteJointModel& model, HsicFormula formula) {
  model.validate();
  const std::size_t na = model.input_support(), nb = model.output_support();
  const auto& P = model.joint;
  const auto& K = model.input_kernel;
  const auto& kz = model.output_kernel;

  if (formula == HsicFormula::anova_simplified) {
    if (!model.input_kernel_is_anova(1e-10))
      throw std::invalid_argument("input kernel is not ANOVA w.r.t. the input marginal");
    long double s = 0.0L;
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t c = 0; c < na; ++c)
          for (std::size_t d = 0; d < nb; ++d)
            s += (long double)P[a][b] * P[c][d] * (K[a][c] - 1.0L) * kz[b][d];
    return static_cast<double>(s);
  }

  const auto pu = model.input_marginal();
  const auto pz = model.output_marginal();
  long double joint_term = 0.0L;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t c = 0; c < na; ++c)
        for (std::size_t d = 0; d < nb; ++d) joint_term += (long double)P[a][b] * P[c][d] * K[a][c] * kz[b][d];

  long double mean_k = 0.0L, mean_kz = 0.0L;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t c = 0; c < na; ++c) mean_k += (long double)pu[a] * pu[c] * K[a][c];
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t d = 0; d < nb; ++d) mean_kz += (long double)pz[b] * pz[d] * kz[b][d];

  long double cross = 0.0L;
  for (std::size_t a = 0; a < na; ++a) {
    long double ek = 0.0L;
    for (std::size_t c = 0; c < na; ++c) ek += (long double)pu[c] * K[a][c];
    for (std::size_t b = 0; b < nb; ++b) {
      long double ez = 0.0L;
      for (std::size_t d = 0; d < nb; ++d) ez += (long double)pz[d] * kz[b][d];
      cross += P[a][b] * ek * ez;
    }
  }
  return static_cast<double>(joint_term + mean_k * mean_kz - 2.0L * cross);
}

}  // namespace setsens
