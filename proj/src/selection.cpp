#include "ftreg/selection.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "ftreg/rng.hpp"

namespace ftreg {

double gcv(const RegressionData& data, const FitResult& fit, const SplineSystem& splines,
           double rho) {
  const double n = static_cast<double>(data.sample_count());
  TangentFrame frame(fit.theta);
  TangentSystem sys = assemble_tangent_system(data, frame, splines);

  Eigen::MatrixXd lhs = sys.gram / n;
  lhs += (2.0 * rho) * sys.penalty;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("gcv: smoother system could not be factorized");
  }

  // tr(H) = tr{(n^{-1}M + 2 rho N)^{-1} n^{-1} M}.
  const double trace_h = ldlt.solve(sys.gram / n).trace();
  if (trace_h >= n) {
    throw OverParameterizedError(
        "gcv: effective degrees of freedom " + std::to_string(trace_h) +
        " reach the sample size " + std::to_string(data.sample_count()));
  }

  // H y = n^{-1} design' (n^{-1}M + 2 rho N)^{-1} design y.
  const Eigen::VectorXd smoothed =
      sys.design.transpose() * ldlt.solve(sys.rhs / n);
  const double rss = (data.y() - smoothed).squaredNorm() / n;
  const double denom = 1.0 - trace_h / n;
  return rss / (denom * denom);
}

SelectionReport select_rho(const RegressionData& data, const SplineSystem& splines,
                           const std::vector<std::size_t>& rank,
                           const std::vector<double>& rho_grid,
                           const SelectionOptions& options) {
  if (rho_grid.empty()) throw std::invalid_argument("select_rho: empty grid");

  // Fit from large rho downward so each solution warm-starts the next.
  std::vector<double> ladder = rho_grid;
  std::sort(ladder.begin(), ladder.end(), std::greater<double>());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

  SelectionReport report;
  FitConfig config = options.base;
  config.rank = rank;
  std::optional<TuckerTensor> warm;
  double best_gcv = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (double rho : ladder) {
    config.rho = rho;
    config.init = (options.warm_start && warm) ? warm : options.base.init;
    SelectionCandidate candidate;
    candidate.rank = rank;
    candidate.rho = rho;
    try {
      FitResult fit_result = fit(data, splines, config);
      candidate.gcv = gcv(data, fit_result, splines, rho);
      candidate.iterations = fit_result.iterations;
      candidate.converged = fit_result.converged;
      if (options.truth) {
        candidate.rise = rise(fit_result.theta_dense, *options.truth, splines);
      }
      warm = fit_result.theta;
      if (!have_best || candidate.gcv < best_gcv) {
        best_gcv = candidate.gcv;
        report.best_fit = std::move(fit_result);
        report.chosen = report.candidates.size();
        have_best = true;
      }
    } catch (const std::exception&) {
      candidate.gcv = std::numeric_limits<double>::quiet_NaN();
    }
    report.candidates.push_back(std::move(candidate));
  }
  if (!have_best) {
    throw OverParameterizedError("select_rho: every candidate failed");
  }
  // Report in ascending rho order; keep `chosen` pointing at the minimizer.
  std::vector<std::size_t> order(report.candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.candidates[a].rho < report.candidates[b].rho;
  });
  std::vector<SelectionCandidate> sorted;
  sorted.reserve(order.size());
  std::size_t chosen_sorted = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] == report.chosen) chosen_sorted = k;
    sorted.push_back(std::move(report.candidates[order[k]]));
  }
  report.candidates = std::move(sorted);
  report.chosen = chosen_sorted;
  return report;
}

SelectionReport select_rank(const RegressionData& data, const SplineSystem& splines,
                            const std::vector<std::vector<std::size_t>>& rank_grid,
                            const std::vector<double>& rho_grid,
                            const SelectionOptions& options) {
  if (rank_grid.empty()) throw std::invalid_argument("select_rank: empty rank grid");
  SelectionReport report;
  double best_gcv = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (const auto& rank : rank_grid) {
    try {
      SelectionReport inner = select_rho(data, splines, rank, rho_grid, options);
      const SelectionCandidate& best = inner.candidates[inner.chosen];
      if (!have_best || best.gcv < best_gcv) {
        best_gcv = best.gcv;
        report.chosen = report.candidates.size();
        report.best_fit = std::move(inner.best_fit);
        have_best = true;
      }
      report.candidates.push_back(best);
    } catch (const std::exception&) {
      SelectionCandidate failed;
      failed.rank = rank;
      failed.gcv = std::numeric_limits<double>::quiet_NaN();
      report.candidates.push_back(std::move(failed));
    }
  }
  if (!have_best) {
    throw OverParameterizedError("select_rank: every rank candidate failed");
  }
  return report;
}

double rise(const DenseTensor& theta_hat, const DenseTensor& theta_true,
            const SplineSystem& splines) {
  if (!theta_hat.same_dims(theta_true)) {
    throw std::invalid_argument("rise: shape mismatch");
  }
  const double denom = splines.l2_form(theta_true);
  if (denom <= 0.0) throw std::invalid_argument("rise: zero-norm truth");
  return splines.l2_form(theta_hat - theta_true) / denom;
}

double kfold_cv(const RegressionData& data, const SplineSystem& splines,
                const FitConfig& config, std::size_t folds, std::uint64_t seed) {
  const std::size_t n = data.sample_count();
  if (folds < 2 || folds > n) {
    throw std::invalid_argument("kfold_cv: need 2 <= K <= n");
  }

  // Seeded Fisher-Yates permutation, then contiguous blocks as folds.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng::Stream stream = rng::Stream::derive(seed, 0, rng::Role::folds);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(stream.next_u64() % i);
    std::swap(perm[i - 1], perm[j]);
  }

  double total = 0.0;
  std::size_t at = 0;
  for (std::size_t k = 0; k < folds; ++k) {
    const std::size_t fold_size = n / folds + (k < n % folds ? 1 : 0);
    if (fold_size == 0) throw std::invalid_argument("kfold_cv: empty fold");
    std::vector<std::size_t> test(perm.begin() + at, perm.begin() + at + fold_size);
    std::vector<std::size_t> train;
    train.reserve(n - fold_size);
    train.insert(train.end(), perm.begin(), perm.begin() + at);
    train.insert(train.end(), perm.begin() + at + fold_size, perm.end());
    at += fold_size;

    FitResult fold_fit = fit(data.subset(train), splines, config);
    for (std::size_t idx : test) {
      const double predicted = inner(data.z(idx), fold_fit.theta_dense);
      const double err = data.y()(static_cast<Eigen::Index>(idx)) - predicted;
      total += err * err;
    }
  }
  return total / static_cast<double>(n);
}

std::vector<std::vector<std::size_t>> table1_rank_candidates() {
  return {{2, 3, 3}, {2, 4, 3}, {3, 3, 3}, {3, 4, 3}, {3, 4, 4}, {4, 4, 4}, {4, 4, 3},
          {5, 5, 5}, {2, 3, 2}, {2, 4, 2}, {3, 3, 2}, {3, 4, 2}, {2, 2, 2}, {3, 2, 2}};
}

std::vector<double> logspace(double lo_exp, double hi_exp, std::size_t count) {
  if (count == 0) throw std::invalid_argument("logspace: count must be positive");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = std::pow(10.0, lo_exp);
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double e =
        lo_exp + (hi_exp - lo_exp) * static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::pow(10.0, e);
  }
  return out;
}

}  // namespace ftreg
