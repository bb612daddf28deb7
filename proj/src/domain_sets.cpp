#include "setsens/domain_sets.hpp"

#include <algorithm>
#include <bit>
#include <exception>
#include <stdexcept>
#include <string>

namespace setsens {

BoxDomain::BoxDomain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)), volume_(1.0) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw std::invalid_argument("box domain: bounds must be non-empty and of equal length");
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!(lower_[j] < upper_[j]))
      throw std::invalid_argument("box domain: lower bound must be below upper bound in dimension " +
                                  std::to_string(j));
    volume_ *= upper_[j] - lower_[j];
  }
}

bool BoxDomain::contains(std::span<const double> x) const noexcept {
  if (x.size() != dim()) return false;
  for (std::size_t j = 0; j < dim(); ++j)
    if (x[j] < lower_[j] || x[j] > upper_[j]) return false;
  return true;
}

namespace {

double box_volume(const Box& b) {
  double v = 1.0;
  for (std::size_t j = 0; j < b.lower.size(); ++j) v *= std::max(0.0, b.upper[j] - b.lower[j]);
  return v;
}

bool intersect_into(const Box& a, const Box& b, Box& out) {
  out.lower.resize(a.lower.size());
  out.upper.resize(a.lower.size());
  for (std::size_t j = 0; j < a.lower.size(); ++j) {
    out.lower[j] = std::max(a.lower[j], b.lower[j]);
    out.upper[j] = std::min(a.upper[j], b.upper[j]);
    if (!(out.lower[j] < out.upper[j])) return false;
  }
  return true;
}

// Inclusion-exclusion over subsets, pruning branches whose running
// intersection is already empty.
double union_measure_from(const std::vector<Box>& boxes, std::size_t start, const Box& running,
                          int sign) {
  double total = 0.0;
  Box next;
  for (std::size_t i = start; i < boxes.size(); ++i) {
    if (!intersect_into(running, boxes[i], next)) continue;
    total += sign * box_volume(next);
    total += union_measure_from(boxes, i + 1, next, -sign);
  }
  return total;
}

double union_measure(const std::vector<Box>& boxes, const BoxDomain& domain) {
  Box whole{domain.lower(), domain.upper()};
  return union_measure_from(boxes, 0, whole, +1);
}

}  // namespace

AnalyticRegion::AnalyticRegion(BoxDomain domain, std::vector<Box> boxes)
    : domain_(std::move(domain)), boxes_(std::move(boxes)) {
  for (const auto& b : boxes_)
    if (b.lower.size() != domain_.dim() || b.upper.size() != domain_.dim())
      throw std::invalid_argument("analytic region: box dimension does not match domain");
}

bool AnalyticRegion::contains(std::span<const double> x) const noexcept {
  for (const auto& b : boxes_) {
    bool inside = true;
    for (std::size_t j = 0; j < b.lower.size() && inside; ++j)
      inside = x[j] >= b.lower[j] && x[j] < b.upper[j];
    if (inside) return true;
  }
  return false;
}

double AnalyticRegion::measure() const { return union_measure(boxes_, domain_); }

MembershipMatrix::MembershipMatrix(std::size_t rows, std::size_t cols, double domain_volume)
    : rows_(rows),
      cols_(cols),
      words_((cols + 63) / 64),
      domain_volume_(domain_volume),
      bits_(rows * words_, 0) {}

void MembershipMatrix::set(std::size_t i, std::size_t k, bool value) noexcept {
  auto& w = bits_[i * words_ + k / 64];
  const std::uint64_t mask = std::uint64_t{1} << (k % 64);
  w = value ? (w | mask) : (w & ~mask);
}

std::size_t MembershipMatrix::xor_count(std::size_t i, std::size_t j) const noexcept {
  const std::uint64_t* a = bits_.data() + i * words_;
  const std::uint64_t* b = bits_.data() + j * words_;
  std::size_t c = 0;
  for (std::size_t w = 0; w < words_; ++w) c += std::popcount(a[w] ^ b[w]);
  return c;
}

std::size_t MembershipMatrix::row_count(std::size_t i) const noexcept {
  std::size_t c = 0;
  for (auto w : row_words(i)) c += std::popcount(w);
  return c;
}

PointSet sample_domain(const BoxDomain& domain, std::size_t m, Rng& rng) {
  PointSet out{domain.dim(), {}};
  out.coords.reserve(m * domain.dim());
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < domain.dim(); ++j)
      out.coords.push_back(rng.uniform(domain.lower()[j], domain.upper()[j]));
  return out;
}

MembershipMatrix membership_matrix(const RegionOracle& oracle, const PointSet& inputs,
                                   const PointSet& points, double domain_volume, int threads) {
  const std::size_t n = inputs.size();
  const std::size_t m = points.size();
  MembershipMatrix out(n, m, domain_volume);
  std::vector<std::exception_ptr> failures(n);

#pragma omp parallel for schedule(dynamic, 4) num_threads(std::max(threads, 1)) if (threads > 1)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::size_t k = 0;
    try {
      for (; k < m; ++k) out.set(i, k, oracle.membership(points[k], inputs[i]));
    } catch (const std::exception& e) {
      failures[i] = std::make_exception_ptr(std::runtime_error(
          "oracle failed at input " + std::to_string(i) + ", point " + std::to_string(k) + ": " +
          e.what()));
    }
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

double sym_diff_fraction(const MembershipMatrix& matrix, std::size_t i, std::size_t j) {
  if (matrix.cols() == 0) throw std::invalid_argument("empty inner sample");
  if (i >= matrix.rows() || j >= matrix.rows()) throw std::out_of_range("row index out of range");
  return static_cast<double>(matrix.xor_count(i, j)) / static_cast<double>(matrix.cols());
}

double estimated_measure(const MembershipMatrix& matrix, std::size_t i) {
  if (matrix.cols() == 0) throw std::invalid_argument("empty inner sample");
  return matrix.domain_volume() * static_cast<double>(matrix.row_count(i)) /
         static_cast<double>(matrix.cols());
}

double exact_sym_diff_measure(const AnalyticRegion& a, const AnalyticRegion& b) {
  if (!(a.domain() == b.domain()))
    throw std::invalid_argument("regions belong to different domains");
  std::vector<Box> both;
  Box tmp;
  for (const auto& p : a.boxes())
    for (const auto& q : b.boxes())
      if (intersect_into(p, q, tmp)) both.push_back(tmp);
  const double d = a.measure() + b.measure() - 2.0 * union_measure(both, a.domain());
  return std::max(0.0, d);
}

}  // namespace setsens
