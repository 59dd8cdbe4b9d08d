#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ftreg/dense_tensor.hpp"
#include "ftreg/grid.hpp"

namespace ftreg {

// Natural cubic spline machinery on a Grid: interpolation of knot values,
// the roughness matrix Omega_2, the weighted polynomial projector P_2, the
// positive-definite penalty A_2 = Omega_2 + Delta*P_2 and the L2 Gram
// Omega_0 of the interpolation map over the whole domain.
//
// Omega_2 acts on knot values directly via the banded Q/R representation
// (Omega_2 = Q R^{-1} Q^T), so b' Omega_2 b equals the integrated squared
// second derivative of the natural cubic interpolant of b.
class SplineSystem {
 public:
  explicit SplineSystem(Grid grid, int penalty_order = 2);

  const Grid& grid() const { return grid_; }
  int penalty_order() const { return m_; }
  std::size_t knot_count() const { return grid_.size(); }

  const Eigen::MatrixXd& roughness() const { return omega_m_; }        // Omega_m
  const Eigen::MatrixXd& polynomial_design() const { return g_; }      // G
  Eigen::VectorXd weight_diagonal() const;                             // diag of Delta
  const Eigen::MatrixXd& projector() const { return p_m_; }            // P_m
  const Eigen::MatrixXd& penalty() const { return a_m_; }              // A_m
  const Eigen::MatrixXd& l2_gram() const { return omega_0_; }          // Omega_0

  // Natural-spline second derivatives at all knots (boundary rows zero),
  // one column per interpolation problem.
  Eigen::MatrixXd second_derivatives(const Eigen::Ref<const Eigen::MatrixXd>& values) const;

  // Row vector w(t) with interpolant(t) = w(t)' * values; defined on the
  // whole domain (linear extension outside the knots).
  Eigen::VectorXd cardinal_weights(double t) const;

  // Interpolates every mode-0 fiber of theta and evaluates at the requested
  // times; theta must have dim(0) == knot_count().
  std::vector<DenseTensor> eval_coefficient(const DenseTensor& theta,
                                            std::span<const double> times) const;

  // J(theta) = <theta x_0 A_m, theta>.
  double penalty_value(const DenseTensor& theta) const;

  // <theta x_0 Omega_0, theta>; the integrated squared norm of the
  // interpolant of theta over the domain.
  double l2_form(const DenseTensor& theta) const;

 private:
  struct EvalCoeffs {
    // value = sum alpha_i * b_i + sum beta_i * M_i with at most two nonzero
    // terms each; indices into the knot sequence.
    int i0, i1;
    double alpha0, alpha1;
    double beta0, beta1;
  };
  EvalCoeffs eval_coeffs(double t) const;

  Grid grid_;
  int m_ = 2;
  Eigen::MatrixXd q_;        // p0 x (p0-2) second-difference map
  Eigen::MatrixXd r_;        // (p0-2) x (p0-2) tridiagonal Gram
  Eigen::LLT<Eigen::MatrixXd> r_llt_;
  Eigen::MatrixXd omega_m_;
  Eigen::MatrixXd g_;
  Eigen::MatrixXd p_m_;
  Eigen::MatrixXd a_m_;
  Eigen::MatrixXd omega_0_;
};

}  // namespace ftreg
