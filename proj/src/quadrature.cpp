#include "setsens/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace setsens {

GaussLegendre::GaussLegendre(std::size_t count) : nodes(count), weights(count) {
  if (count == 0) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  const std::size_t half = (count + 1) / 2;
  const double nd = static_cast<double>(count);
  for (std::size_t i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= count; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[count - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[count - 1 - i] = w;
  }
}

}  // namespace setsens
