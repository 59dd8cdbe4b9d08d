#include "ftreg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ftreg {

namespace {

// Newton iteration on the Legendre polynomial, seeded with the Chebyshev
// approximation of the roots.
GaussLegendre compute_rule(std::size_t n) {
  if (n == 0) throw std::invalid_argument("quadrature order must be positive");
  GaussLegendre out;
  out.nodes.resize(n);
  out.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    out.nodes[n - 1 - i] = x;
    out.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return out;
}

}  // namespace

const GaussLegendre& GaussLegendre::rule(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

std::vector<double> refine_breaks(const std::vector<double>& breaks, std::size_t pieces) {
  if (pieces <= 1) return breaks;
  std::vector<double> out;
  out.reserve((breaks.size() - 1) * pieces + 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    for (std::size_t k = 0; k < pieces; ++k) {
      out.push_back(breaks[i] + (breaks[i + 1] - breaks[i]) * static_cast<double>(k) /
                                    static_cast<double>(pieces));
    }
  }
  out.push_back(breaks.back());
  return out;
}

}  // namespace ftreg
