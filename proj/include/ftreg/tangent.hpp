#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ftreg/dense_tensor.hpp"
#include "ftreg/tucker.hpp"

namespace ftreg {

class TangentFrame;

// Coordinates of a tangent vector at a Tucker point: a core-sized block plus
// one (p_d - r_d) x r_d block per mode. Total coordinate count equals the
// manifold dimension prod r_d + sum r_d (p_d - r_d).
struct TangentCoords {
  DenseTensor core;
  std::vector<Eigen::MatrixXd> mode;

  std::size_t dim() const;
  Eigen::VectorXd pack() const;

  TangentCoords& operator+=(const TangentCoords& other);
  TangentCoords& operator*=(double alpha);
};

// Frame at a fixed-Tucker-rank point: complements U_d_perp, core row-space
// bases V_d = QR(M_d(core)^T). The row-space matrices W_d of the ambient
// matricizations are never materialized; contractions against them go
// factor-by-factor through the Kronecker structure.
class TangentFrame {
 public:
  explicit TangentFrame(TuckerTensor point);

  const TuckerTensor& point() const { return point_; }
  std::size_t order() const { return point_.order(); }
  const std::vector<std::size_t>& outer_dims() const { return outer_dims_; }
  const std::vector<std::size_t>& rank() const { return rank_; }
  const Eigen::MatrixXd& factor(std::size_t d) const { return point_.factors[d]; }
  const Eigen::MatrixXd& complement(std::size_t d) const { return complement_[d]; }
  const Eigen::MatrixXd& core_row_basis(std::size_t d) const { return v_[d]; }

  std::size_t tangent_dim() const { return dim_; }

  // Extension R: coordinates -> ambient tangent tensor.
  DenseTensor extend(const TangentCoords& xi) const;
  // Contraction R*: ambient tensor -> coordinates; adjoint of extend, and
  // contract(extend(xi)) == xi.
  TangentCoords contract(const DenseTensor& upsilon) const;
  // Orthogonal projector onto the tangent space: extend(contract(.)).
  DenseTensor project(const DenseTensor& upsilon) const;

  TangentCoords zero_coords() const;
  TangentCoords unpack(const Eigen::Ref<const Eigen::VectorXd>& packed) const;

  // Coordinates of the base point itself: (core, 0, ..., 0).
  TangentCoords point_coords() const;

 private:
  TuckerTensor point_;
  std::vector<std::size_t> outer_dims_;
  std::vector<std::size_t> rank_;
  std::vector<Eigen::MatrixXd> complement_;  // U_d_perp
  std::vector<Eigen::MatrixXd> v_;           // V_d
  std::vector<Eigen::MatrixXd> factor_t_;    // U_d' cached for contractions
  std::size_t dim_ = 0;
};

// The operator R* (. x_0 A) R on tangent coordinates for a symmetric p_0 x p_0
// matrix A, evaluated through the three structural blocks (mode-0 couplings
// via U_0' A U_0 and friends; modes d >= 1 couple only through V_d). Used for
// the roughness penalty in the Gauss-Newton system.
class Mode0PenaltyOperator {
 public:
  Mode0PenaltyOperator(const TangentFrame& frame, const Eigen::MatrixXd& a);

  TangentCoords apply(const TangentCoords& xi) const;
  // Dense matrix on packed coordinates (assembled column by column).
  Eigen::MatrixXd to_matrix() const;

 private:
  const TangentFrame& frame_;
  Eigen::MatrixXd a_cc_;  // U_0' A U_0
  Eigen::MatrixXd a_cp_;  // U_0' A U_0_perp
  Eigen::MatrixXd a_pp_;  // U_0_perp' A U_0_perp
};

TangentCoords penalty_on_tangent(const TangentFrame& frame, const Eigen::MatrixXd& a,
                                 const TangentCoords& xi);

}  // namespace ftreg
