#include "ftreg/dense_tensor.hpp"

#include <cmath>
#include <stdexcept>

#include "ftreg/kernels.hpp"

namespace ftreg {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& dims) {
  if (dims.empty()) throw std::invalid_argument("tensor must have at least one mode");
  if (dims.size() > DenseTensor::kMaxOrder) {
    throw std::invalid_argument("tensor order exceeds supported maximum of 8");
  }
  std::size_t total = 1;
  for (std::size_t q : dims) {
    if (q == 0) throw std::invalid_argument("tensor extents must be positive");
    total *= q;
  }
  return total;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), values_(checked_size(dims_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
  if (checked_size(dims_) != values_.size()) {
    throw std::invalid_argument("value count does not match tensor extents");
  }
}

namespace {

std::size_t linear_index(const std::vector<std::size_t>& dims,
                         std::span<const std::size_t> idx) {
  if (idx.size() != dims.size()) throw std::invalid_argument("index order mismatch");
  std::size_t linear = 0;
  std::size_t stride = 1;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (idx[d] >= dims[d]) throw std::out_of_range("tensor index out of range");
    linear += idx[d] * stride;
    stride *= dims[d];
  }
  return linear;
}

}  // namespace

double DenseTensor::at(std::span<const std::size_t> idx) const {
  return values_[linear_index(dims_, idx)];
}

double& DenseTensor::at(std::span<const std::size_t> idx) {
  return values_[linear_index(dims_, idx)];
}

std::size_t DenseTensor::stride(std::size_t d) const {
  std::size_t s = 1;
  for (std::size_t f = 0; f < d; ++f) s *= dims_[f];
  return s;
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
  if (!same_dims(other)) throw std::invalid_argument("tensor dimension mismatch");
  kernels::axpy(1.0, other.data(), data(), size());
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
  if (!same_dims(other)) throw std::invalid_argument("tensor dimension mismatch");
  kernels::axpy(-1.0, other.data(), data(), size());
  return *this;
}

DenseTensor& DenseTensor::operator*=(double alpha) {
  kernels::scale(alpha, data(), size());
  return *this;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
DenseTensor operator*(double alpha, DenseTensor t) { return t *= alpha; }

bool DenseTensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double inner(const DenseTensor& a, const DenseTensor& b) {
  if (!a.same_dims(b)) throw std::invalid_argument("inner: dimension mismatch");
  return kernels::dot(a.data(), b.data(), a.size());
}

double norm(const DenseTensor& t) { return std::sqrt(inner(t, t)); }

Eigen::MatrixXd matricize(const DenseTensor& t, std::size_t mode) {
  if (mode >= t.order()) throw std::invalid_argument("matricize: mode out of range");
  const std::size_t rows = t.dim(mode);
  const std::size_t cols = t.size() / rows;
  Eigen::MatrixXd out(rows, cols);
  if (mode == 0) {
    // Mode 0 is the fastest index, so this is a straight reshape.
    std::copy(t.data(), t.data() + t.size(), out.data());
    return out;
  }
  const std::size_t inner_stride = t.stride(mode);
  const std::size_t block = inner_stride * rows;
  const double* src = t.data();
  for (std::size_t lin = 0; lin < t.size(); ++lin) {
    const std::size_t low = lin % inner_stride;
    const std::size_t mid = (lin / inner_stride) % rows;
    const std::size_t high = lin / block;
    out(static_cast<Eigen::Index>(mid),
        static_cast<Eigen::Index>(low + high * inner_stride)) = src[lin];
  }
  return out;
}

DenseTensor tensorize(const Eigen::Ref<const Eigen::MatrixXd>& m, std::size_t mode,
                      std::vector<std::size_t> dims) {
  if (mode >= dims.size()) throw std::invalid_argument("tensorize: mode out of range");
  DenseTensor out(std::move(dims));
  const std::size_t rows = out.dim(mode);
  const std::size_t cols = out.size() / rows;
  if (static_cast<std::size_t>(m.rows()) != rows ||
      static_cast<std::size_t>(m.cols()) != cols) {
    throw std::invalid_argument("tensorize: matrix shape does not match dims");
  }
  if (mode == 0) {
    std::copy(m.data(), m.data() + out.size(), out.data());
    return out;
  }
  const std::size_t inner_stride = out.stride(mode);
  const std::size_t block = inner_stride * rows;
  double* dst = out.data();
  for (std::size_t lin = 0; lin < out.size(); ++lin) {
    const std::size_t low = lin % inner_stride;
    const std::size_t mid = (lin / inner_stride) % rows;
    const std::size_t high = lin / block;
    dst[lin] = m(static_cast<Eigen::Index>(mid),
                 static_cast<Eigen::Index>(low + high * inner_stride));
  }
  return out;
}

DenseTensor mode_product(const DenseTensor& t, const Eigen::Ref<const Eigen::MatrixXd>& m,
                         std::size_t mode) {
  if (mode >= t.order()) throw std::invalid_argument("mode_product: mode out of range");
  if (static_cast<std::size_t>(m.cols()) != t.dim(mode)) {
    throw std::invalid_argument("mode_product: matrix columns must match mode extent");
  }
  std::vector<std::size_t> out_dims = t.dims();
  out_dims[mode] = static_cast<std::size_t>(m.rows());
  DenseTensor out(std::move(out_dims));

  const std::size_t q = t.dim(mode);
  const std::size_t q_new = static_cast<std::size_t>(m.rows());
  if (mode == 0) {
    const std::size_t cols = t.size() / q;
    Eigen::Map<const Eigen::MatrixXd> in(t.data(), q, cols);
    Eigen::Map<Eigen::MatrixXd> dst(out.data(), q_new, cols);
    dst.noalias() = m * in;
    return out;
  }
  // Each contiguous block of inner_stride*q entries is an inner_stride x q
  // column-major slab; right-multiplying by m^T transforms the mode.
  const std::size_t inner_stride = t.stride(mode);
  const std::size_t blocks = t.size() / (inner_stride * q);
  for (std::size_t b = 0; b < blocks; ++b) {
    Eigen::Map<const Eigen::MatrixXd> in(t.data() + b * inner_stride * q, inner_stride, q);
    Eigen::Map<Eigen::MatrixXd> dst(out.data() + b * inner_stride * q_new, inner_stride,
                                    q_new);
    dst.noalias() = in * m.transpose();
  }
  return out;
}

DenseTensor multi_mode_product(const DenseTensor& t, std::span<const Eigen::MatrixXd> ms) {
  if (ms.size() != t.order()) {
    throw std::invalid_argument("multi_mode_product: need one matrix per mode");
  }
  DenseTensor out = mode_product(t, ms[0], 0);
  for (std::size_t d = 1; d < ms.size(); ++d) out = mode_product(out, ms[d], d);
  return out;
}

}  // namespace ftreg
