#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ftreg/regression.hpp"
#include "ftreg/spline.hpp"
#include "ftreg/tangent.hpp"
#include "ftreg/tucker.hpp"

namespace ftreg {

struct FitConfig {
  std::vector<std::size_t> rank;
  double rho = 0.0;
  int max_iter = 80;
  double rel_tol = 1e-8;
  std::optional<TuckerTensor> init;   // spectral initialization when absent
  const DenseTensor* truth = nullptr; // optional: records an error trace

  void validate(const std::vector<std::size_t>& coeff_dims) const;
};

struct FitResult {
  TuckerTensor theta;
  DenseTensor theta_dense;
  std::vector<double> objective_trace;  // penalized loss, index 0 = initializer
  std::vector<double> step_trace;       // relative iterate change per iteration
  std::vector<double> error_trace;      // relative error vs truth (when given)
  bool converged = false;
  int iterations = 0;
  double spectral_gap = 0.0;  // min_d sigma_{r_d}(M_d(theta_hat))
  int safeguard_events = 0;
  bool jitter_used = false;
};

// The tangent-space least-squares system at a frame: design rows contracted
// into coordinates, their Gram matrix, the penalty matrix and the gradient.
struct TangentSystem {
  Eigen::MatrixXd design;   // dimD x n, column i = pack(contract(Z_i))
  Eigen::MatrixXd gram;     // design * design'
  Eigen::MatrixXd penalty;  // R* A R on packed coordinates
  Eigen::VectorXd rhs;      // design * y
};

TangentSystem assemble_tangent_system(const RegressionData& data, const TangentFrame& frame,
                                      const SplineSystem& splines);

// Solves (gram + 2 n rho penalty) xi = rhs, the normal equations of
// (2n)^{-1} |y - Z R xi|^2 + rho <A R xi, R xi>. Adds a diagonal jitter of
// 1e-12 trace/dim only if the factorization fails (flagged via jitter_used).
Eigen::VectorXd solve_tangent_system(const TangentSystem& sys, double rho, std::size_t n,
                                     bool* jitter_used = nullptr);

// One Gauss-Newton step: the tangent tensor R (M + 2 n rho N)^{-1} R* Z* y.
DenseTensor gn_step(const RegressionData& data, const TangentFrame& frame,
                    const SplineSystem& splines, double rho);

// Spectral initializer: T-HOSVD of the adjoint applied to y.
TuckerTensor init_spectral(const RegressionData& data, const std::vector<std::size_t>& rank);

// Functional Riemannian Gauss-Newton: tangent least-squares step followed by
// T-HOSVD retraction, iterated until the relative change drops below rel_tol
// or max_iter is reached.
FitResult fit(const RegressionData& data, const SplineSystem& splines,
              const FitConfig& config);

struct ProfiledFitResult {
  Eigen::VectorXd gamma;
  FitResult fit;
  int outer_iterations = 0;
  std::vector<double> joint_objective_trace;
};

// Alternates ordinary least squares for the scalar-covariate coefficients with
// a full tensor fit on the residual; OLS runs first. Stops when the joint
// objective's relative decrease falls below rel_tol or after outer_cap passes.
ProfiledFitResult profiled_fit(const RegressionData& data,
                               const Eigen::MatrixXd& scalar_covariates,
                               const SplineSystem& splines, const FitConfig& config,
                               int outer_cap = 20);

}  // namespace ftreg
