#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "setsens/rng.hpp"

namespace setsens {

// Compact hyper-rectangle X in R^d.
class BoxDomain {
public:
  BoxDomain(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  double volume() const noexcept { return volume_; }

  bool contains(std::span<const double> x) const noexcept;
  bool operator==(const BoxDomain&) const = default;

private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  double volume_;
};

// Row-major list of points, each of a fixed dimension.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> operator[](std::size_t k) const {
    return {coords.data() + k * dim, dim};
  }
};

// Membership predicate x in Gamma(u). Must be pure.
using MembershipFn = std::function<bool(std::span<const double> x, std::span<const double> u)>;

struct RegionOracle {
  MembershipFn membership;
};

// Union of axis-aligned boxes inside a domain; used as an exact reference.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

class AnalyticRegion {
public:
  AnalyticRegion(BoxDomain domain, std::vector<Box> boxes);

  const BoxDomain& domain() const noexcept { return domain_; }
  const std::vector<Box>& boxes() const noexcept { return boxes_; }
  bool contains(std::span<const double> x) const noexcept;
  // Exact Lebesgue measure of the union.
  double measure() const;

private:
  BoxDomain domain_;
  std::vector<Box> boxes_;
};

// n x m bit table; bit (i, k) is the membership of inner point k in set i.
class MembershipMatrix {
public:
  MembershipMatrix(std::size_t rows, std::size_t cols, double domain_volume);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double domain_volume() const noexcept { return domain_volume_; }

  bool get(std::size_t i, std::size_t k) const noexcept {
    return (bits_[i * words_ + k / 64] >> (k % 64)) & 1u;
  }
  void set(std::size_t i, std::size_t k, bool value) noexcept;

  // Number of inner points in exactly one of the sets i and j.
  std::size_t xor_count(std::size_t i, std::size_t j) const noexcept;
  std::size_t row_count(std::size_t i) const noexcept;
  std::span<const std::uint64_t> row_words(std::size_t i) const noexcept {
    return {bits_.data() + i * words_, words_};
  }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t words_;
  double domain_volume_;
  std::vector<std::uint64_t> bits_;
};

PointSet sample_domain(const BoxDomain& domain, std::size_t m, Rng& rng);

// bits[i][k] = oracle(points[k], inputs[i]); exactly rows*cols oracle calls.
// Rows are evaluated in parallel when threads > 1; the result does not depend
// on the thread count.
MembershipMatrix membership_matrix(const RegionOracle& oracle, const PointSet& inputs,
                                   const PointSet& points, double domain_volume,
                                   int threads = 1);

double sym_diff_fraction(const MembershipMatrix& matrix, std::size_t i, std::size_t j);

// Estimated measure of set i: volume * (fraction of inner points inside).
double estimated_measure(const MembershipMatrix& matrix, std::size_t i);

double exact_sym_diff_measure(const AnalyticRegion& a, const AnalyticRegion& b);

}  // namespace setsens
