#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftreg/regression.hpp"
#include "ftreg/selection.hpp"
#include "ftreg/solver.hpp"
#include "ftreg/tucker.hpp"

namespace ftreg {

// Synthetic functional-tensor regression generator: covariates are
// X_i(t) = sum_{k=1}^{K} k^{-1} sin(k pi u(t)) Ups_ik with standard normal
// tensors Ups_ik, observed on the grid with additive N(0, sigma_x^2) entry
// noise; responses integrate <X_i(t), B(t)> over the domain (B the natural
// spline interpolant of the truth) plus N(0, sigma_y^2) noise.
struct SimConfig {
  std::size_t n = 500;
  std::vector<std::size_t> dims = {12, 8, 8};  // (p_0, ..., p_D)
  std::vector<std::size_t> rank = {2, 3, 3};
  int kl_terms = 30;
  double sigma_x = 0.05;
  double sigma_y = 0.1;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  std::vector<double> grid_points;  // empty: midpoint-uniform rule
  double t_lo = 0.0;
  double t_hi = 1.0;

  // The exact discretized rule y_i = <Z_i, theta> + eps is used by the
  // noiseless convergence experiments, where the fixed point must be theta.
  enum class Response { integral, discretized };
  Response response = Response::integral;

  Grid make_grid() const;
};

struct SimTruth {
  TuckerTensor tucker;
  DenseTensor theta;
};

struct SimDataset {
  DenseTensor raw_x;  // (n, p_0, ..., p_D) observations
  Eigen::VectorXd y;
  RegressionData data;
};

// Core entries i.i.d. standard normal; factors are sign-fixed Q factors of
// standard Gaussian matrices (Haar-uniform up to the sign convention).
SimTruth gen_truth(const SimConfig& config);

SimDataset gen_dataset(const SimConfig& config, const SimTruth& truth);

// Moment vectors s_k = int sin(k pi u(t)) w(t) dt of the cardinal
// interpolation weights, computed by composite Gauss-Legendre on
// frequency-refined knot intervals.
std::vector<Eigen::VectorXd> sine_moments(const SplineSystem& splines, int kl_terms,
                                          std::size_t nodes = 8);

enum class ExperimentKind {
  convergence,
  rho_sweep,
  sigma_sweep,
  n_sweep,
  p0_sweep,
  rank_table,
};

ExperimentKind parse_experiment_kind(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

struct ExperimentConfig {
  SimConfig base;
  FitConfig fit;  // rank/rho fields are overwritten per task
  std::vector<double> rho_grid = logspace(-4.0, 2.0, 13);
  std::vector<std::vector<std::size_t>> rank_grid = table1_rank_candidates();
  std::vector<double> sigma_grid = {0.02, 0.04, 0.06, 0.08, 0.10};
  std::vector<std::size_t> n_grid = {125, 250, 500, 1000};
  std::vector<std::size_t> p0_grid = {3, 6, 9, 12, 15, 18};
};

struct ExperimentRow {
  std::string sweep_value;
  std::uint64_t replication = 0;
  double gcv = std::numeric_limits<double>::quiet_NaN();
  double rise = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
  std::string error;  // non-empty when the replication failed
};

struct ExperimentSummaryRow {
  std::string sweep_value;
  std::size_t replications = 0;
  double gcv_mean = 0.0, gcv_std = 0.0;
  double rise_mean = 0.0, rise_std = 0.0;
};

struct ExperimentTable {
  std::string name;
  std::vector<ExperimentRow> rows;
  std::vector<ExperimentSummaryRow> summary;
};

// Runs the named sweep with one independent RNG stream per (replication,
// role); replications execute in parallel and fill preassigned slots, so the
// table is identical regardless of scheduling. Per-replication failures are
// recorded in their rows rather than aborting the sweep.
ExperimentTable run_experiment(ExperimentKind kind, const ExperimentConfig& config,
                               std::size_t replications, unsigned threads);

}  // namespace ftreg
