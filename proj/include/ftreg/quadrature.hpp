#pragma once

#include <cstddef>
#include <vector>

namespace ftreg {

// Gauss-Legendre rule on [-1, 1]; nodes/weights computed once per order and
// cached. Exact for polynomials of degree <= 2n - 1.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  static const GaussLegendre& rule(std::size_t n);
};

// Composite quadrature over consecutive [breaks[i], breaks[i+1]] intervals
// with n-point Gauss-Legendre per interval.
template <typename F>
double integrate(const std::vector<double>& breaks, std::size_t n, F&& f) {
  const auto& gl = GaussLegendre::rule(n);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    const double half = 0.5 * (breaks[i + 1] - breaks[i]);
    for (std::size_t k = 0; k < n; ++k) {
      total += half * gl.weights[k] * f(mid + half * gl.nodes[k]);
    }
  }
  return total;
}

// Splits each interval of `breaks` into `pieces` equal parts.
std::vector<double> refine_breaks(const std::vector<double>& breaks, std::size_t pieces);

}  // namespace ftreg
