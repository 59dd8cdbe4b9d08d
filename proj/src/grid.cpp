#include "ftreg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ftreg/diagnostics.hpp"

namespace ftreg {

Grid::Grid(std::vector<double> points, double t_lo, double t_hi)
    : t_lo_(t_lo), t_hi_(t_hi), points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("grid needs at least one point");
  if (!(t_lo_ < t_hi_)) throw std::invalid_argument("grid endpoints must satisfy lo < hi");
  if (!(points_.front() > t_lo_) || !(points_.back() < t_hi_)) {
    throw std::invalid_argument("grid points must lie strictly inside the endpoints");
  }
  for (std::size_t j = 0; j + 1 < points_.size(); ++j) {
    if (!(points_[j] < points_[j + 1])) {
      throw std::invalid_argument("grid points must be strictly increasing");
    }
  }
  for (double t : points_) {
    if (!std::isfinite(t)) throw std::invalid_argument("grid points must be finite");
  }

  const std::size_t p0 = points_.size();
  weights_.resize(p0);
  for (std::size_t j = 0; j < p0; ++j) {
    const double left = (j == 0) ? t_lo_ : points_[j - 1];
    const double right = (j + 1 == p0) ? t_hi_ : points_[j + 1];
    weights_[j] = 0.5 * (right - left);
  }

  c0_ = 1.0;
  for (double w : weights_) {
    const double scaled = static_cast<double>(p0) * w;
    c0_ = std::max({c0_, scaled, 1.0 / scaled});
  }
  if (!std::isfinite(c0_)) throw std::invalid_argument("grid weights degenerate");
  if (c0_ > 10.0) {
    warn("grid quasi-uniformity constant C0 = " + std::to_string(c0_) + " exceeds 10");
  }
}

Grid Grid::midpoint_uniform(std::size_t p0, double t_lo, double t_hi) {
  if (p0 == 0) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> pts(p0);
  for (std::size_t j = 0; j < p0; ++j) {
    pts[j] = t_lo + (t_hi - t_lo) * (static_cast<double>(j) + 0.5) / static_cast<double>(p0);
  }
  return Grid(std::move(pts), t_lo, t_hi);
}

std::vector<double> Grid::breaks() const {
  std::vector<double> b;
  b.reserve(points_.size() + 2);
  b.push_back(t_lo_);
  b.insert(b.end(), points_.begin(), points_.end());
  b.push_back(t_hi_);
  return b;
}

}  // namespace ftreg
