#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ftreg/dense_tensor.hpp"
#include "ftreg/grid.hpp"

namespace ftreg {

// Applies the grid weights to raw observations: slice j_0 of each sample is
// scaled by dt_{j_0}. raw_x has dims (n, p_0, ..., p_D); one weighted tensor
// of dims (p_0, ..., p_D) is returned per sample.
std::vector<DenseTensor> build_design(const DenseTensor& raw_x, const Grid& grid);

// Response vector plus weighted covariate tensors on a common grid.
class RegressionData {
 public:
  RegressionData(Eigen::VectorXd y, std::vector<DenseTensor> z, Grid grid);

  static RegressionData from_raw(const DenseTensor& raw_x, Eigen::VectorXd y,
                                 const Grid& grid);

  std::size_t sample_count() const { return z_.size(); }
  const Eigen::VectorXd& y() const { return y_; }
  const std::vector<DenseTensor>& z() const { return z_; }
  const DenseTensor& z(std::size_t i) const { return z_[i]; }
  const Grid& grid() const { return grid_; }
  const std::vector<std::size_t>& coeff_dims() const { return z_.front().dims(); }

  // New dataset holding the selected samples (used by cross-validation).
  RegressionData subset(std::span<const std::size_t> indices) const;
  // Same design with a different response (used by profiled fits).
  RegressionData with_response(Eigen::VectorXd y) const;

 private:
  Eigen::VectorXd y_;
  std::vector<DenseTensor> z_;
  Grid grid_;
};

// forward(theta)_i = <Z_i, theta>.
Eigen::VectorXd forward(const RegressionData& data, const DenseTensor& theta);
// adjoint(v) = sum_i v_i Z_i.
DenseTensor adjoint(const RegressionData& data, const Eigen::VectorXd& v);

}  // namespace ftreg
