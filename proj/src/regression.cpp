#include "ftreg/regression.hpp"

#include <stdexcept>

#include "ftreg/kernels.hpp"

namespace ftreg {

std::vector<DenseTensor> build_design(const DenseTensor& raw_x, const Grid& grid) {
  if (raw_x.order() < 2) {
    throw std::invalid_argument("build_design: raw tensor must be (n, p_0, ...)");
  }
  const std::size_t n = raw_x.dim(0);
  const std::size_t p0 = raw_x.dim(1);
  if (p0 != grid.size()) {
    throw std::invalid_argument("build_design: grid length must match mode p_0");
  }
  std::vector<std::size_t> slice_dims(raw_x.dims().begin() + 1, raw_x.dims().end());
  const std::size_t slice_size = raw_x.size() / n;

  std::vector<DenseTensor> out;
  out.reserve(n);
  const double* src = raw_x.data();
  for (std::size_t i = 0; i < n; ++i) {
    DenseTensor z(slice_dims);
    double* dst = z.data();
    // Sample i is strided with stride n in the raw layout; j_0 is the
    // fastest index of the slice.
    for (std::size_t lin = 0; lin < slice_size; ++lin) {
      dst[lin] = grid.weight(lin % p0) * src[i + n * lin];
    }
    if (!z.all_finite()) {
      throw std::invalid_argument("build_design: non-finite covariate entry");
    }
    out.push_back(std::move(z));
  }
  return out;
}

RegressionData::RegressionData(Eigen::VectorXd y, std::vector<DenseTensor> z, Grid grid)
    : y_(std::move(y)), z_(std::move(z)), grid_(std::move(grid)) {
  if (z_.empty()) throw std::invalid_argument("regression data needs n >= 1 samples");
  if (static_cast<std::size_t>(y_.size()) != z_.size()) {
    throw std::invalid_argument("response length must match sample count");
  }
  const auto& dims = z_.front().dims();
  for (const auto& zi : z_) {
    if (zi.dims() != dims) {
      throw std::invalid_argument("all covariate tensors must share dims");
    }
  }
  if (dims[0] != grid_.size()) {
    throw std::invalid_argument("covariate mode 0 must match the grid length");
  }
  if (!y_.allFinite()) throw std::invalid_argument("response contains non-finite values");
}

RegressionData RegressionData::from_raw(const DenseTensor& raw_x, Eigen::VectorXd y,
                                        const Grid& grid) {
  return RegressionData(std::move(y), build_design(raw_x, grid), grid);
}

RegressionData RegressionData::subset(std::span<const std::size_t> indices) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(indices.size()));
  std::vector<DenseTensor> z;
  z.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= z_.size()) throw std::out_of_range("subset index out of range");
    y(static_cast<Eigen::Index>(k)) = y_(static_cast<Eigen::Index>(indices[k]));
    z.push_back(z_[indices[k]]);
  }
  return RegressionData(std::move(y), std::move(z), grid_);
}

RegressionData RegressionData::with_response(Eigen::VectorXd y) const {
  return RegressionData(std::move(y), z_, grid_);
}

Eigen::VectorXd forward(const RegressionData& data, const DenseTensor& theta) {
  if (theta.dims() != data.coeff_dims()) {
    throw std::invalid_argument("forward: coefficient dims mismatch");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(data.sample_count()));
  for (std::size_t i = 0; i < data.sample_count(); ++i) {
    out(static_cast<Eigen::Index>(i)) =
        kernels::dot(data.z(i).data(), theta.data(), theta.size());
  }
  return out;
}

DenseTensor adjoint(const RegressionData& data, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != data.sample_count()) {
    throw std::invalid_argument("adjoint: vector length mismatch");
  }
  DenseTensor out(data.coeff_dims());
  for (std::size_t i = 0; i < data.sample_count(); ++i) {
    kernels::axpy(v(static_cast<Eigen::Index>(i)), data.z(i).data(), out.data(),
                  out.size());
  }
  return out;
}

}  // namespace ftreg
