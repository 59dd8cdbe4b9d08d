#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ftreg/dense_tensor.hpp"

namespace ftreg {

// Tucker-form tensor: core of extents (r_0,...,r_D) with one orthonormal
// p_d x r_d factor per mode.
struct TuckerTensor {
  DenseTensor core;
  std::vector<Eigen::MatrixXd> factors;

  std::size_t order() const { return factors.size(); }
  std::vector<std::size_t> outer_dims() const;
  std::vector<std::size_t> rank() const { return core.dims(); }

  DenseTensor to_dense() const;

  // Checks factor orthonormality and r_d <= p_d; throws on violation.
  void validate(double tol = 1e-10) const;
};

// Flips each column's sign so its largest-magnitude entry (first such entry
// on ties) is positive. Gives SVD/QR outputs a reproducible orientation.
void fix_column_signs(Eigen::MatrixXd& m);

// Orthonormal basis of the leading r-dimensional left singular subspace.
// If sigma_r < 1e-12 * sigma_1 the trailing columns are an arbitrary
// orthonormal completion and *degenerate is set when provided (callers treat
// this as a warning, not an error).
Eigen::MatrixXd leading_singular_vectors(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                         Eigen::Index r, bool* degenerate = nullptr);

// Sign-fixed Q factor of a Householder QR.
Eigen::MatrixXd qr_orthonormal(const Eigen::Ref<const Eigen::MatrixXd>& m);

// p x (p - r) orthonormal complement of an orthonormal u (p x r).
Eigen::MatrixXd orthonormal_complement(const Eigen::Ref<const Eigen::MatrixXd>& u);

// Truncated HOSVD: per-mode leading singular vectors of the matricizations
// of t, core = t contracted with the factor transposes.
TuckerTensor thosvd(const DenseTensor& t, const std::vector<std::size_t>& rank,
                    bool* degenerate = nullptr);

}  // namespace ftreg
