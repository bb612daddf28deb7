#include "setsens/riskbench.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "setsens/errors.hpp"
#include "setsens/hsic.hpp"
#include "setsens/study.hpp"

namespace setsens {

RiskSetup RiskSetup::from_config(const StudyConfig& config) {
  RiskSetup s;
  s.model = config.model;
  s.oscillator = config.oscillator;
  s.target_input = config.risk.target_input;
  s.kernel = {config.input_kernel, config.lengthscale.value_or(1.0), config.quadrature_nodes};
  s.auto_lengthscale = !config.lengthscale.has_value();
  return s;
}

namespace {

struct PreparedSample {
  ModelInstance model;
  InputSample inputs;
  GramMatrix input_gram;
};

PreparedSample prepare(const RiskSetup& setup, std::size_t n, std::uint64_t seed) {
  auto model = make_model(setup.model, setup.oscillator);
  if (model.components.size() != 1)
    throw std::invalid_argument("risk benchmark needs a single-set output model");
  if (setup.target_input >= model.marginals.size())
    throw std::invalid_argument("risk benchmark: target input out of range");
  Rng rng(derive_seed(seed, {tag(StreamTag::inputs)}));
  auto inputs = sample_inputs(model, n, rng);
  const auto col = column(inputs.uniform, setup.target_input);
  auto spec = setup.kernel;
  if (setup.auto_lengthscale && spec.family != InputKernelFamily::sobolev1) spec.lengthscale = sample_sd(col);
  auto gram = anovaize_gram(spec, col);
  return {std::move(model), std::move(inputs), std::move(gram)};
}

}  // namespace

RiskConstants constants_from_sample(const GramMatrix& input_gram, const MembershipMatrix& bits,
                                    double sigma2) {
  const std::size_t n = input_gram.size();
  if (n < 3 || bits.rows() != n) throw std::invalid_argument("risk constants: need matching samples with n >= 3");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("degenerate bandwidth");
  const auto kset = set_kernel_gram(bits, {sigma2, bits.domain_volume()});

  RiskConstants c;
  c.bandwidth = sigma2;
  c.rate = bits.domain_volume() / (2.0 * sigma2);
  c.n_ref = n;
  c.m_ref = bits.cols();
  c.h_ref = hsic_ustat(input_gram, kset);

  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  std::vector<double> row_mean(n, 0.0);
  double ss = 0.0, s3 = 0.0, s4 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = input_gram(i, j) - 1.0;
      const double w = a * kset(i, j);
      const double d = w - c.h_ref;
      ss += d * d;
      row_mean[i] += w;
      row_mean[j] += w;
      const double f = sym_diff_fraction(bits, i, j);
      const double bern = f * (1.0 - f);
      s3 += a * a * bern;
      s4 += std::abs(a) * bern;
    }
  c.sigma1_sq = ss / (pairs - 1.0);
  double mean_rows = 0.0;
  for (auto& r : row_mean) {
    r /= static_cast<double>(n - 1);
    mean_rows += r;
  }
  mean_rows /= static_cast<double>(n);
  double sr = 0.0;
  for (double r : row_mean) sr += (r - mean_rows) * (r - mean_rows);
  c.sigma2_sq = sr / static_cast<double>(n - 1);
  c.sigma3_sq = s3 / pairs;
  c.sigma4_sq = s4 / pairs;
  return c;
}

RiskConstants estimate_constants(const RiskSetup& setup, std::size_t n_ref, std::size_t m_ref,
                                 std::uint64_t seed) {
  if (n_ref < 1000) throw std::invalid_argument("reference sample size must be at least 1000");
  const auto prep = prepare(setup, n_ref, seed);
  Rng point_rng(derive_seed(seed, {tag(StreamTag::inner_points)}));
  const auto points = sample_domain(prep.model.domain, m_ref, point_rng);
  const auto bits = membership_matrix(prep.model.components[0], prep.inputs.raw, points,
                                      prep.model.domain.volume());
  const auto bw = bandwidth_heuristic(bits);
  if (bw.degenerate) throw DegenerateOutputError("degenerate bandwidth in the reference sample");
  return constants_from_sample(prep.input_gram, bits, bw.sigma2);
}

double theoretical_bound(const RiskConstants& c, std::size_t n, std::size_t m, BoundKind which) {
  if (n < 2) throw std::invalid_argument("risk bound needs n >= 2");
  if (m < 1) throw std::invalid_argument("risk bound needs m >= 1");
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  const double pairs = nd * (nd - 1.0);
  const double outer = 2.0 * c.sigma1_sq / pairs + 4.0 * (nd - 2.0) * c.sigma2_sq / pairs;
  const double l2 = c.rate * c.rate;
  double inner = 0.0;
  if (which == BoundKind::shared) {
    inner = l2 * c.sigma3_sq / md;
  } else {
    inner = l2 * 2.0 * (2.0 * nd - 3.0) * c.sigma3_sq / (pairs * md) +
            l2 * l2 * (nd - 2.0) * (nd - 3.0) * c.sigma4_sq * c.sigma4_sq / (4.0 * pairs * md * md);
  }
  const double bound = 2.0 * (outer + inner);
  return c.h_ref == 0.0 ? bound : bound / (c.h_ref * c.h_ref);
}

double shared_estimate(const RiskSetup& setup, double sigma2, std::size_t n, std::size_t m,
                       std::uint64_t seed, std::uint64_t* oracle_calls) {
  const auto prep = prepare(setup, n, seed);
  Rng point_rng(derive_seed(seed, {tag(StreamTag::inner_points)}));
  const auto points = sample_domain(prep.model.domain, m, point_rng);
  const auto bits = membership_matrix(prep.model.components[0], prep.inputs.raw, points,
                                      prep.model.domain.volume());
  if (oracle_calls) *oracle_calls = prep.model.model_evaluations();
  return hsic_ustat(prep.input_gram, set_kernel_gram(bits, {sigma2, prep.model.domain.volume()}));
}

double independent_estimate(const RiskSetup& setup, double sigma2, std::size_t n, std::size_t m,
                            std::uint64_t seed, int threads, std::uint64_t* oracle_calls) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("degenerate bandwidth");
  if (m == 0) throw std::invalid_argument("empty inner sample");
  const auto prep = prepare(setup, n, seed);
  const auto& oracle = prep.model.components[0].membership;
  const double rate = prep.model.domain.volume() / (2.0 * sigma2);
  std::vector<double> row_sum(n, 0.0);
  std::vector<std::exception_ptr> errors(n);

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(threads, 1)) if (threads > 1)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      double acc = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        Rng rng(derive_seed(seed, {tag(StreamTag::pair_points), i, j}));
        const auto points = sample_domain(prep.model.domain, m, rng);
        std::size_t hits = 0;
        for (std::size_t k = 0; k < m; ++k)
          hits += oracle(points[k], prep.inputs.raw[i]) != oracle(points[k], prep.inputs.raw[j]);
        const double kset = std::exp(-rate * static_cast<double>(hits) / static_cast<double>(m));
        acc += (prep.input_gram(i, j) - 1.0) * kset;
      }
      row_sum[i] = acc;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (oracle_calls) *oracle_calls = prep.model.model_evaluations();
  double s = 0.0;
  for (double r : row_sum) s += r;
  return 2.0 * s / (static_cast<double>(n) * static_cast<double>(n - 1));
}

RiskCurve risk_curve(const RiskSetup& setup, const RiskConstants& constants,
                     const std::vector<GridPoint>& grid, std::size_t replicates,
                     RiskEstimator estimator, std::uint64_t seed, int threads,
                     std::uint64_t budget) {
  if (replicates < 20) throw std::invalid_argument("risk curve needs at least 20 replicates");
  if (!(constants.h_ref != 0.0)) throw std::invalid_argument("reference HSIC is zero; relative risk undefined");
  std::vector<RiskEstimator> kinds;
  if (estimator != RiskEstimator::independent_nmc) kinds.push_back(RiskEstimator::shared);
  if (estimator != RiskEstimator::shared) kinds.push_back(RiskEstimator::independent_nmc);

  for (const auto& g : grid) {
    if (g.n < 2 || g.m < 1) throw std::invalid_argument("risk grid needs n >= 2 and m >= 1");
    if (estimator != RiskEstimator::shared) {
      const double need = static_cast<double>(replicates) * static_cast<double>(g.n) *
                          static_cast<double>(g.n - 1) * static_cast<double>(g.m);
      if (need > static_cast<double>(budget)) {
        std::ostringstream os;
        os << "oracle budget exceeded: independent estimator at n=" << g.n << ", m=" << g.m
           << " needs " << std::setprecision(15) << need << " calls (budget " << budget << ")";
        throw std::runtime_error(os.str());
      }
    }
  }

  RiskCurve curve;
  curve.constants = constants;
  curve.replicates = replicates;
  for (auto kind : kinds)
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const auto [n, m] = grid[gi];
      std::vector<double> est(replicates);
      std::vector<std::exception_ptr> errors(replicates);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(threads, 1)) if (threads > 1)
      for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(replicates); ++r) {
        const auto idx = static_cast<std::size_t>(r);
        const auto s = derive_seed(seed, {tag(StreamTag::replicate), gi, idx});
        try {
          est[idx] = kind == RiskEstimator::shared
                         ? shared_estimate(setup, constants.bandwidth, n, m, s)
                         : independent_estimate(setup, constants.bandwidth, n, m, s);
        } catch (...) {
          errors[idx] = std::current_exception();
        }
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);

      RiskPoint pt;
      pt.n = n;
      pt.m = m;
      pt.estimator = kind;
      double sum = 0.0, risk = 0.0;
      for (double e : est) {
        sum += e;
        const double rel = (e - constants.h_ref) / constants.h_ref;
        risk += rel * rel;
      }
      const double rd = static_cast<double>(replicates);
      pt.mean_estimate = sum / rd;
      double ss = 0.0;
      for (double e : est) ss += (e - pt.mean_estimate) * (e - pt.mean_estimate);
      pt.standard_error = std::sqrt(ss / (rd - 1.0) / rd);
      pt.empirical_risk = risk / rd;
      pt.bound_shared = theoretical_bound(constants, n, m, BoundKind::shared);
      pt.bound_independent = theoretical_bound(constants, n, m, BoundKind::independent);
      curve.points.push_back(pt);
    }
  return curve;
}

RiskCurve run_risk(const StudyConfig& config) {
  config.validate();
  if (config.risk.n_ref < 1000) throw ConfigError("risk n_ref must be at least 1000");
  std::vector<GridPoint> grid;
  for (auto g : config.risk.grid) {
    if (g > config.risk.n_ref / 3 || g > config.risk.m_ref / 3)
      throw ConfigError("risk grid value " + std::to_string(g) + " exceeds a third of the reference size");
    grid.push_back({g, g});
  }
  const auto setup = RiskSetup::from_config(config);
  const auto constants = estimate_constants(setup, config.risk.n_ref, config.risk.m_ref,
                                            derive_seed(config.master_seed, {0x5EF}));
  return risk_curve(setup, constants, grid, config.risk.replicates, config.risk.estimator,
                    config.master_seed, config.threads, config.risk.budget);
}

double log_risk_slope(const RiskCurve& curve, RiskEstimator estimator) {
  std::vector<double> xs, ys;
  for (const auto& p : curve.points)
    if (p.estimator == estimator && p.empirical_risk > 0.0) {
      xs.push_back(std::log(static_cast<double>(p.n)));
      ys.push_back(std::log(p.empirical_risk));
    }
  if (xs.size() < 2) throw std::invalid_argument("slope needs at least two grid points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

std::string risk_csv(const RiskCurve& curve) {
  std::ostringstream os;
  os << "n,m,estimator,empirical_risk,bound_shared,bound_independent\n";
  for (const auto& p : curve.points)
    os << p.n << ',' << p.m << ',' << to_string(p.estimator) << ',' << format_real(p.empirical_risk)
       << ',' << format_real(p.bound_shared) << ',' << format_real(p.bound_independent) << '\n';
  return os.str();
}

std::string risk_summary(const RiskCurve& curve) {
  std::ostringstream os;
  const auto& c = curve.constants;
  os << "reference: n=" << c.n_ref << " m=" << c.m_ref << " H_ref=" << c.h_ref
     << " sigma^2=" << c.bandwidth << " L=" << c.rate << "\n"
     << "constants: s1^2=" << c.sigma1_sq << " s2^2=" << c.sigma2_sq << " s3^2=" << c.sigma3_sq
     << " s4^2=" << c.sigma4_sq << "\n"
     << std::setw(6) << "n" << std::setw(6) << "m" << std::setw(17) << "estimator" << std::setw(14)
     << "risk" << std::setw(14) << "bound_shared" << std::setw(14) << "bound_indep" << "\n";
  for (const auto& p : curve.points)
    os << std::setw(6) << p.n << std::setw(6) << p.m << std::setw(17) << to_string(p.estimator)
       << std::setw(14) << std::setprecision(5) << p.empirical_risk << std::setw(14)
       << p.bound_shared << std::setw(14) << p.bound_independent << "\n";
  return os.str();
}

}  // namespace setsens
