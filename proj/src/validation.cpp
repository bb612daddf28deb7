#include "setsens/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "setsens/domain_sets.hpp"
#include "setsens/kernels.hpp"
#include "setsens/screening.hpp"

namespace setsens {

DiscreteJointModel random_anova_model(Rng& rng, std::size_t max_support) {
  const std::size_t na = 2 + rng.below(max_support - 1);
  const std::size_t nb = 2 + rng.below(max_support - 1);
  DiscreteJointModel model;
  model.joint.assign(na, std::vector<double>(nb));
  // Mixture of a random product law and a random coupling a -> b. Pure
  // noise weights give near-independent laws whose HSIC is of the order of
  // the kernel's rounding, which makes a relative comparison meaningless.
  std::vector<double> wa(na), wb(nb);
  for (auto& w : wa) w = 0.2 + rng.uniform();
  for (auto& w : wb) w = 0.2 + rng.uniform();
  const double mix = 0.3 + 0.6 * rng.uniform();
  const std::size_t offset = rng.below(nb);
  double total = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    const std::size_t partner = (a + offset) % nb;
    for (std::size_t b = 0; b < nb; ++b) {
      double& v = model.joint[a][b];
      v = (1.0 - mix) * wa[a] * wb[b] + (b == partner ? mix * wa[a] : 0.0);
      total += v;
    }
  }
  for (auto& row : model.joint)
    for (auto& v : row) v /= total;
  const auto pu = model.input_marginal();

  // stratified support points so atoms stay distinguishable by the kernels
  std::vector<double> us(na), zs(nb);
  for (std::size_t a = 0; a < na; ++a) us[a] = (a + 0.25 + 0.5 * rng.uniform()) / na;
  for (std::size_t b = 0; b < nb; ++b) zs[b] = (b + 0.25 + 0.5 * rng.uniform()) / nb;
  const double theta = 0.1 + 0.2 * rng.uniform();

  std::vector<std::vector<double>> k(na, std::vector<double>(na));
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t c = 0; c < na; ++c) k[a][c] = base_kernel(BaseFamily::gaussian, theta, us[a], us[c]);
  std::vector<long double> emb(na, 0.0L);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t c = 0; c < na; ++c) emb[a] += (long double)pu[c] * k[a][c];
  long double total_emb = 0.0L;
  for (std::size_t a = 0; a < na; ++a) total_emb += pu[a] * emb[a];
  model.input_kernel.assign(na, std::vector<double>(na));
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t c = 0; c < na; ++c)
      model.input_kernel[a][c] = static_cast<double>(1.0L + k[a][c] - emb[a] - emb[c] + total_emb);

  model.output_kernel.assign(nb, std::vector<double>(nb));
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t d = 0; d < nb; ++d)
      model.output_kernel[b][d] = base_kernel(BaseFamily::laplace, 0.2, zs[b], zs[d]);
  return model;
}

MembershipMatrix random_membership(Rng& rng, std::size_t n, std::size_t m, double volume) {
  MembershipMatrix bits(n, m, volume);
  const std::size_t prototypes = 3;
  std::vector<std::vector<bool>> proto(prototypes, std::vector<bool>(m));
  for (auto& p : proto)
    for (std::size_t k = 0; k < m; ++k) p[k] = rng.uniform() < 0.5;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = proto[rng.below(prototypes)];
    const double flip = 0.3 * rng.uniform();
    for (std::size_t k = 0; k < m; ++k) bits.set(i, k, p[k] != (rng.uniform() < flip));
  }
  return bits;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// Composite Simpson on a uniform grid.
template <class F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

ValidationCheck check_anova(InputKernelFamily family, Rng& rng) {
  const double tol = family == InputKernelFamily::sobolev1 ? 1e-12 : 1e-6;
  InputKernelSpec spec{family, 1.0 / std::sqrt(12.0), 64};
  const AnovaKernel kernel(spec);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double x = rng.uniform();
    auto f = [&](double y) { return kernel(x, y); };
    const double integral = simpson(f, 0.0, x, 400) + simpson(f, x, 1.0, 400);
    worst = std::max(worst, std::abs(integral - 1.0));
  }
  return {"anova_property:" + std::string(to_string(family)), worst <= tol,
          "max |int K(x,y)dy - 1| = " + fmt(worst)};
}

}  // namespace

std::vector<ValidationCheck> run_validation(std::uint64_t seed) {
  std::vector<ValidationCheck> out;
  Rng rng(derive_seed(seed, {0xA11}));

  for (auto f : kAllInputKernels) out.push_back(check_anova(f, rng));

  // Estimator-level ANOVA decomposition.
  for (std::size_t p : {2u, 3u}) {
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const std::size_t n = 40;
      std::vector<GramMatrix> grams;
      for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> xs(n);
        for (auto& x : xs) x = rng.uniform();
        grams.push_back(anovaize_gram({InputKernelFamily::sobolev1, 1.0, 64}, xs));
      }
      const auto bits = random_membership(rng, n, 64, 1.0);
      const auto kz = set_kernel_gram(bits, {0.2, 1.0});
      std::vector<const GramMatrix*> all;
      for (auto& g : grams) all.push_back(&g);
      const double total = std::abs(hsic_ustat(product_gram(all, n), kz));
      worst = std::max(worst, decomposition_residual(grams, kz) / std::max(total, 1e-300));
    }
    out.push_back({"decomposition_residual:p=" + std::to_string(p), worst <= 1e-10,
                   "max residual / |HSIC| = " + fmt(worst)});
  }

  // Population formulas.
  {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const auto model = random_anova_model(rng);
      const double a = population_hsic_oracle(model, HsicFormula::three_term);
      const double b = population_hsic_oracle(model, HsicFormula::anova_simplified);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    }
    out.push_back({"population_formulas_agree", worst <= 1e-12, "max relative gap = " + fmt(worst)});
  }

  // Monte-Carlo symmetric difference against exact box geometry.
  {
    const BoxDomain dom({0.0, 0.0}, {2.0, 1.0});
    int inside = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
      auto random_region = [&] {
        std::vector<Box> boxes;
        const std::size_t count = 1 + rng.below(3);
        for (std::size_t b = 0; b < count; ++b) {
          Box box{{0, 0}, {0, 0}};
          for (std::size_t j = 0; j < 2; ++j) {
            const double lo = dom.lower()[j], w = dom.upper()[j] - lo;
            double u = lo + w * rng.uniform(), v = lo + w * rng.uniform();
            if (u > v) std::swap(u, v);
            box.lower[j] = u;
            box.upper[j] = v;
          }
          boxes.push_back(box);
        }
        return AnalyticRegion(dom, boxes);
      };
      const auto a = random_region();
      const auto b = random_region();
      const std::size_t m = 10000;
      const auto pts = sample_domain(dom, m, rng);
      std::size_t hits = 0;
      for (std::size_t k = 0; k < m; ++k) hits += a.contains(pts[k]) != b.contains(pts[k]);
      const double est = dom.volume() * static_cast<double>(hits) / static_cast<double>(m);
      const double exact = exact_sym_diff_measure(a, b);
      const double p = exact / dom.volume();
      const double se = dom.volume() * std::sqrt(p * (1.0 - p) / static_cast<double>(m));
      if (std::abs(est - exact) <= 4.0 * se + 1e-12) ++inside;
    }
    out.push_back({"monte_carlo_symmetric_difference", inside >= trials - 1,
                   std::to_string(inside) + "/" + std::to_string(trials) + " within 4 standard errors"});
  }

  // Set-kernel gram: symmetric, bounded, positive semidefinite.
  {
    double worst_ratio = 0.0;
    bool bounded = true;
    for (int t = 0; t < 5; ++t) {
      const std::size_t n = 60;
      const auto bits = random_membership(rng, n, 200, 3.0);
      const auto bw = bandwidth_heuristic(bits);
      const auto g = set_kernel_gram(bits, {bw.sigma2, 3.0});
      Eigen::MatrixXd mat(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          mat(i, j) = g(i, j);
          bounded = bounded && g(i, j) > 0.0 && g(i, j) <= 1.0;
        }
      const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mat).eigenvalues().minCoeff();
      worst_ratio = std::min(worst_ratio, lmin / (mat.trace() / static_cast<double>(n)));
    }
    out.push_back({"set_gram_positive_semidefinite", bounded && worst_ratio >= -1e-8,
                   "min eigenvalue / (trace/n) = " + fmt(worst_ratio)});
  }

  // Permutation p-values live on the (k)/(B+1) lattice.
  {
    const std::size_t n = 30, B = 99;
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.uniform();
    const auto kin = anovaize_gram({InputKernelFamily::sobolev1, 1.0, 64}, xs);
    const auto bits = random_membership(rng, n, 64, 1.0);
    const auto kz = set_kernel_gram(bits, {0.3, 1.0});
    const double p = permutation_pvalue(kin, kz, B, seed);
    const double k = p * static_cast<double>(B + 1);
    const bool ok = std::abs(k - std::round(k)) < 1e-9 && k >= 1.0 && k <= static_cast<double>(B + 1);
    out.push_back({"permutation_pvalue_lattice", ok, "p = " + fmt(p)});
  }
  return out;
}

}  // namespace setsens
