#pragma once

#include <cstddef>
#include <vector>

namespace setsens {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(std::size_t count);

  // Integral of f over [a, b].
  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(mid + half * nodes[i]);
    return s * half;
  }
};

}  // namespace setsens
