#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "setsens/domain_sets.hpp"
#include "setsens/quadrature.hpp"

namespace setsens {

// Dense symmetric n x n matrix of kernel values.
class GramMatrix {
public:
  GramMatrix() = default;
  explicit GramMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  void set_sym(std::size_t i, std::size_t j, double v) noexcept {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  std::span<const double> data() const noexcept { return data_; }

private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Sobolev kernel of order 1 on [0,1]; ANOVA w.r.t. the uniform law.
double sobolev_kernel(double x, double y);

enum class BaseFamily { gaussian, laplace, matern32, matern52 };

// Stationary kernel of r = |x - y| / lengthscale.
double base_kernel(BaseFamily family, double lengthscale, double x, double y);

enum class InputKernelFamily { sobolev1, anova_gaussian, anova_laplace, anova_matern32, anova_matern52 };

std::string_view to_string(InputKernelFamily f) noexcept;
InputKernelFamily parse_input_kernel(std::string_view name);
inline constexpr InputKernelFamily kAllInputKernels[] = {
    InputKernelFamily::sobolev1, InputKernelFamily::anova_gaussian,
    InputKernelFamily::anova_laplace, InputKernelFamily::anova_matern32,
    InputKernelFamily::anova_matern52};

struct InputKernelSpec {
  InputKernelFamily family = InputKernelFamily::sobolev1;
  double lengthscale = 1.0;  // ignored by sobolev1
  std::size_t quadrature_nodes = 64;
};

// ANOVA kernel on [0,1] w.r.t. the uniform law:
//   K(x,y) = 1 + k(x,y) - m(x) - m(y) + M,  m(x) = int k(x,z) dz,  M = int m.
// For sobolev1 the closed form is used.
class AnovaKernel {
public:
  explicit AnovaKernel(const InputKernelSpec& spec);

  const InputKernelSpec& spec() const noexcept { return spec_; }
  double embedding(double x) const;  // m(x)
  double embedding_mean() const noexcept { return total_; }  // M
  double operator()(double x, double y) const;

private:
  double base(double x, double y) const;

  InputKernelSpec spec_;
  BaseFamily base_family_ = BaseFamily::gaussian;
  GaussLegendre rule_;
  double total_ = 0.0;
};

GramMatrix anovaize_gram(const InputKernelSpec& spec, std::span<const double> sample);

// Entrywise product; an empty list yields the all-ones matrix of size n.
GramMatrix product_gram(std::span<const GramMatrix* const> grams, std::size_t n);

struct OutputKernelSpec {
  double sigma2 = 1.0;
  double domain_volume = 1.0;
  double rate() const noexcept { return domain_volume / (2.0 * sigma2); }  // L
};

// exp(-L * fraction of inner points in the symmetric difference).
GramMatrix set_kernel_gram(const MembershipMatrix& matrix, const OutputKernelSpec& out);

struct BandwidthEstimate {
  double sigma2 = 0.0;
  bool degenerate = false;
};

// Mean over unordered pairs of the estimated symmetric-difference measure.
BandwidthEstimate bandwidth_heuristic(const MembershipMatrix& matrix);

class MarginalDistribution {
public:
  enum class Family { uniform, normal };

  static MarginalDistribution uniform(double a, double b);
  static MarginalDistribution normal(double mean, double sd);

  Family family() const noexcept { return family_; }
  double p1() const noexcept { return p1_; }
  double p2() const noexcept { return p2_; }

  bool in_support(double x) const noexcept;
  double cdf(double x) const;
  double quantile(double p) const;
  std::string describe() const;

private:
  MarginalDistribution(Family f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}
  Family family_;
  double p1_;
  double p2_;
};

// Column-wise CDF transform of an n x p sample onto [0,1].
PointSet quantile_transform(const PointSet& raw, std::span<const MarginalDistribution> marginals);

// Column j of a point set.
std::vector<double> column(const PointSet& points, std::size_t j);

// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> values);

}  // namespace setsens
