#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ftreg/solver.hpp"

namespace ftreg {

// Effective degrees of freedom reached or exceeded the sample size, so the
// GCV denominator is not positive.
class OverParameterizedError : public std::runtime_error {
 public:
  explicit OverParameterizedError(const std::string& what) : std::runtime_error(what) {}
};

// Generalized cross-validation score of a fit, evaluated with the local
// smoother at the fitted point:
//   GCV = n^{-1} |y - H y|^2 / (1 - n^{-1} tr H)^2.
// The trace uses the small-matrix identity tr H = tr{(n^{-1}M + 2 rho N)^{-1}
// n^{-1} M} on the tangent coordinates; no n x n matrix is formed.
double gcv(const RegressionData& data, const FitResult& fit, const SplineSystem& splines,
           double rho);

struct SelectionCandidate {
  std::vector<std::size_t> rank;
  double rho = 0.0;
  double gcv = 0.0;
  double rise = std::numeric_limits<double>::quiet_NaN();  // set when truth known
  int iterations = 0;
  bool converged = false;
};

struct SelectionReport {
  std::vector<SelectionCandidate> candidates;
  std::size_t chosen = 0;  // index of the GCV minimizer
  FitResult best_fit;
};

struct SelectionOptions {
  FitConfig base;                      // rank field is overwritten per candidate
  const DenseTensor* truth = nullptr;  // optional: adds RISE to the report
  bool warm_start = true;              // warm start along the descending rho ladder
};

// Fits at every rho in the grid (descending order with warm starts) and
// returns the GCV minimizer for a fixed rank.
SelectionReport select_rho(const RegressionData& data, const SplineSystem& splines,
                           const std::vector<std::size_t>& rank,
                           const std::vector<double>& rho_grid,
                           const SelectionOptions& options = {});

// Two-level selection: rho by GCV within each rank candidate, then the rank
// with the smallest selected GCV.
SelectionReport select_rank(const RegressionData& data, const SplineSystem& splines,
                            const std::vector<std::vector<std::size_t>>& rank_grid,
                            const std::vector<double>& rho_grid,
                            const SelectionOptions& options = {});

// Relative integrated squared error of the interpolated coefficient:
// <(d theta) x_0 Omega_0, d theta> / <theta x_0 Omega_0, theta>.
double rise(const DenseTensor& theta_hat, const DenseTensor& theta_true,
            const SplineSystem& splines);

// K-fold cross-validation with seeded contiguous folds of a permuted index
// set; refits with the supplied config on each training split.
double kfold_cv(const RegressionData& data, const SplineSystem& splines,
                const FitConfig& config, std::size_t folds, std::uint64_t seed = 0);

// The 14 Tucker-rank candidates used by the order-3 simulation study.
std::vector<std::vector<std::size_t>> table1_rank_candidates();

// rho grid 10^lo ... 10^hi with `count` log-spaced points.
std::vector<double> logspace(double lo_exp, double hi_exp, std::size_t count);

}  // namespace ftreg
