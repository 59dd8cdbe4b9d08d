#pragma once

#include <cstddef>
#include <vector>

namespace ftreg {

// Observation grid t_1 < ... < t_{p0} strictly inside the domain
// [t_lo, t_hi], with trapezoid-midpoint weights dt_j = (t_{j+1} - t_{j-1})/2
// where t_0 = t_lo and t_{p0+1} = t_hi.
class Grid {
 public:
  Grid(std::vector<double> points, double t_lo, double t_hi);

  // The paper-standard rule t_j = lo + (j - 1/2)/p0 * (hi - lo).
  static Grid midpoint_uniform(std::size_t p0, double t_lo = 0.0, double t_hi = 1.0);

  std::size_t size() const { return points_.size(); }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  double domain_length() const { return t_hi_ - t_lo_; }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  double point(std::size_t j) const { return points_[j]; }
  double weight(std::size_t j) const { return weights_[j]; }

  // Quasi-uniformity constant C0 = max_j max(p0*dt_j, 1/(p0*dt_j)).
  double quasi_uniformity() const { return c0_; }

  // Knot-interval breakpoints {t_lo, t_1, ..., t_p0, t_hi}.
  std::vector<double> breaks() const;

  bool operator==(const Grid& other) const = default;

 private:
  double t_lo_ = 0.0;
  double t_hi_ = 1.0;
  std::vector<double> points_;
  std::vector<double> weights_;
  double c0_ = 1.0;
};

}  // namespace ftreg
