#include "setsens/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace setsens {

double sobolev_kernel(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::domain_error("sobolev kernel: arguments must lie in [0,1]");
  const double d = x - y;
  return 1.0 + (x - 0.5) * (y - 0.5) + 0.5 * (d * d - std::abs(d) + 1.0 / 6.0);
}

double base_kernel(BaseFamily family, double lengthscale, double x, double y) {
  if (!(lengthscale > 0.0)) throw std::invalid_argument("kernel lengthscale must be positive");
  const double r = std::abs(x - y) / lengthscale;
  switch (family) {
    case BaseFamily::gaussian:
      return std::exp(-0.5 * r * r);
    case BaseFamily::laplace:
      return std::exp(-r);
    case BaseFamily::matern32: {
      const double s = std::numbers::sqrt3 * r;
      return (1.0 + s) * std::exp(-s);
    }
    case BaseFamily::matern52: {
      const double s = std::sqrt(5.0) * r;
      return (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
  }
  return 0.0;
}

std::string_view to_string(InputKernelFamily f) noexcept {
  switch (f) {
    case InputKernelFamily::sobolev1: return "sobolev1";
    case InputKernelFamily::anova_gaussian: return "anova_gaussian";
    case InputKernelFamily::anova_laplace: return "anova_laplace";
    case InputKernelFamily::anova_matern32: return "anova_matern32";
    case InputKernelFamily::anova_matern52: return "anova_matern52";
  }
  return "?";
}

InputKernelFamily parse_input_kernel(std::string_view name) {
  for (auto f : kAllInputKernels)
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown input kernel family '" + std::string(name) + "'");
}

namespace {

BaseFamily base_family_of(InputKernelFamily f) {
  switch (f) {
    case InputKernelFamily::anova_laplace: return BaseFamily::laplace;
    case InputKernelFamily::anova_matern32: return BaseFamily::matern32;
    case InputKernelFamily::anova_matern52: return BaseFamily::matern52;
    default: return BaseFamily::gaussian;
  }
}

std::size_t rule_size(const InputKernelSpec& spec) {
  if (spec.family == InputKernelFamily::sobolev1) return 1;
  if (spec.quadrature_nodes < 8) throw std::invalid_argument("insufficient quadrature");
  if (!(spec.lengthscale > 0.0)) throw std::invalid_argument("kernel lengthscale must be positive");
  return spec.quadrature_nodes;
}

}  // namespace

AnovaKernel::AnovaKernel(const InputKernelSpec& spec)
    : spec_(spec), base_family_(base_family_of(spec.family)), rule_(rule_size(spec)) {
  if (spec_.family == InputKernelFamily::sobolev1) return;
  // m is smooth on [0,1] even when k has a kink on the diagonal.
  total_ = rule_.integrate([this](double x) { return embedding(x); }, 0.0, 1.0);
}

double AnovaKernel::base(double x, double y) const {
  return base_kernel(base_family_, spec_.lengthscale, x, y);
}

double AnovaKernel::embedding(double x) const {
  if (spec_.family == InputKernelFamily::sobolev1) return 1.0;
  // Split at z = x where Laplace/Matern are not smooth.
  auto f = [this, x](double z) { return base(x, z); };
  double s = 0.0;
  if (x > 0.0) s += rule_.integrate(f, 0.0, x);
  if (x < 1.0) s += rule_.integrate(f, x, 1.0);
  return s;
}

double AnovaKernel::operator()(double x, double y) const {
  if (spec_.family == InputKernelFamily::sobolev1) return sobolev_kernel(x, y);
  return 1.0 + base(x, y) - embedding(x) - embedding(y) + total_;
}

GramMatrix anovaize_gram(const InputKernelSpec& spec, std::span<const double> sample) {
  const std::size_t n = sample.size();
  for (double v : sample)
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("ANOVA gram: sample values must lie in [0,1]");
  GramMatrix g(n);
  if (spec.family == InputKernelFamily::sobolev1) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g.set_sym(i, j, sobolev_kernel(sample[i], sample[j]));
    return g;
  }
  const AnovaKernel kernel(spec);
  std::vector<double> emb(n);
  for (std::size_t i = 0; i < n; ++i) emb[i] = kernel.embedding(sample[i]);
  const double total = kernel.embedding_mean();
  const BaseFamily fam = base_family_of(spec.family);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      g.set_sym(i, j,
                1.0 + base_kernel(fam, spec.lengthscale, sample[i], sample[j]) - emb[i] - emb[j] +
                    total);
  return g;
}

GramMatrix product_gram(std::span<const GramMatrix* const> grams, std::size_t n) {
  GramMatrix out(n, 1.0);
  for (const GramMatrix* g : grams) {
    if (g->size() != n) throw std::invalid_argument("product gram: mismatched sample sizes");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) *= (*g)(i, j);
  }
  return out;
}

GramMatrix set_kernel_gram(const MembershipMatrix& matrix, const OutputKernelSpec& out) {
  if (!(out.sigma2 > 0.0)) throw std::invalid_argument("degenerate bandwidth");
  if (matrix.cols() == 0) throw std::invalid_argument("empty inner sample");
  const std::size_t n = matrix.rows();
  const double scale = out.rate() / static_cast<double>(matrix.cols());
  GramMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j)
      g.set_sym(i, j, std::exp(-scale * static_cast<double>(matrix.xor_count(i, j))));
  }
  return g;
}

BandwidthEstimate bandwidth_heuristic(const MembershipMatrix& matrix) {
  const std::size_t n = matrix.rows();
  if (n < 2) throw std::invalid_argument("bandwidth heuristic needs at least two sets");
  if (matrix.cols() == 0) throw std::invalid_argument("empty inner sample");
  // Integer accumulation keeps the result independent of pair order.
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) hits += matrix.xor_count(i, j);
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  BandwidthEstimate est;
  est.sigma2 = matrix.domain_volume() * static_cast<double>(hits) /
               (static_cast<double>(matrix.cols()) * pairs);
  est.degenerate = hits == 0;
  return est;
}

MarginalDistribution MarginalDistribution::uniform(double a, double b) {
  if (!(b > a)) throw std::invalid_argument("uniform marginal needs b > a");
  return {Family::uniform, a, b};
}

MarginalDistribution MarginalDistribution::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("normal marginal needs a positive standard deviation");
  return {Family::normal, mean, sd};
}

bool MarginalDistribution::in_support(double x) const noexcept {
  if (family_ == Family::uniform) return x >= p1_ && x <= p2_;
  return std::isfinite(x);
}

double MarginalDistribution::cdf(double x) const {
  if (family_ == Family::uniform) return std::clamp((x - p1_) / (p2_ - p1_), 0.0, 1.0);
  return 0.5 * std::erfc(-(x - p1_) / (p2_ * std::numbers::sqrt2));
}

double MarginalDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile level must lie in (0,1)");
  if (family_ == Family::uniform) return p1_ + (p2_ - p1_) * p;
  return p1_ - p2_ * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

std::string MarginalDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (family_ == Family::uniform)
    os << "uniform(" << p1_ << "," << p2_ << ")";
  else
    os << "normal(" << p1_ << "," << p2_ << ")";
  return os.str();
}

PointSet quantile_transform(const PointSet& raw, std::span<const MarginalDistribution> marginals) {
  if (raw.dim != marginals.size())
    throw std::invalid_argument("quantile transform: one marginal per input column is required");
  PointSet out{raw.dim, std::vector<double>(raw.coords.size())};
  const std::size_t n = raw.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < raw.dim; ++j) {
      const double v = raw.coords[i * raw.dim + j];
      if (!marginals[j].in_support(v))
        throw std::domain_error("value outside support at row " + std::to_string(i) + ", column " +
                                std::to_string(j));
      out.coords[i * raw.dim + j] = marginals[j].cdf(v);
    }
  return out;
}

std::vector<double> column(const PointSet& points, std::size_t j) {
  std::vector<double> c(points.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = points.coords[i * points.dim + j];
  return c;
}

double sample_sd(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace setsens
