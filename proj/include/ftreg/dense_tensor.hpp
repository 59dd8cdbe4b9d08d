#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace ftreg {

// Dense real tensor of order D+1 with a mode-0-fastest linear layout:
// entry (j_0, ..., j_D) lives at j_0 + q_0*(j_1 + q_1*(j_2 + ...)).
// Under this layout the mode-0 matricization is a plain reshape, and the
// mode-d matricization column index matches
//   k = sum_{e != d} j_e * prod_{f < e, f != d} q_f.
class DenseTensor {
 public:
  static constexpr std::size_t kMaxOrder = 8;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<std::size_t> dims);
  DenseTensor(std::vector<std::size_t> dims, std::vector<double> values);

  std::size_t order() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t d) const { return dims_[d]; }
  std::size_t size() const { return values_.size(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double operator[](std::size_t linear) const { return values_[linear]; }
  double& operator[](std::size_t linear) { return values_[linear]; }

  // Multi-index access; slow, intended for tests and small tensors.
  double at(std::span<const std::size_t> idx) const;
  double& at(std::span<const std::size_t> idx);

  // Product of dims f < d; the linear stride of mode d.
  std::size_t stride(std::size_t d) const;

  bool same_dims(const DenseTensor& other) const { return dims_ == other.dims_; }

  DenseTensor& operator+=(const DenseTensor& other);
  DenseTensor& operator-=(const DenseTensor& other);
  DenseTensor& operator*=(double alpha);

  bool all_finite() const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> values_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(double alpha, DenseTensor t);

// Frobenius inner product; throws on dimension mismatch.
double inner(const DenseTensor& a, const DenseTensor& b);
double norm(const DenseTensor& t);

// Mode-d unfolding into a q_d x (size/q_d) matrix.
Eigen::MatrixXd matricize(const DenseTensor& t, std::size_t mode);
// Inverse of matricize for the given target dims.
DenseTensor tensorize(const Eigen::Ref<const Eigen::MatrixXd>& m, std::size_t mode,
                      std::vector<std::size_t> dims);

// t x_d m where m has cols(m) == dims(t)[d]; mode d extent becomes rows(m).
DenseTensor mode_product(const DenseTensor& t, const Eigen::Ref<const Eigen::MatrixXd>& m,
                         std::size_t mode);
// Folds mode_product over every mode; ms.size() must equal the order.
DenseTensor multi_mode_product(const DenseTensor& t, std::span<const Eigen::MatrixXd> ms);

}  // namespace ftreg
