#include "ftreg/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ftreg/diagnostics.hpp"

namespace ftreg {

namespace {

std::size_t manifold_dim(const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& rank) {
  std::size_t core = 1;
  for (std::size_t r : rank) core *= r;
  std::size_t total = core;
  for (std::size_t d = 0; d < rank.size(); ++d) total += rank[d] * (dims[d] - rank[d]);
  return total;
}

double penalized_loss(const RegressionData& data, const SplineSystem& splines,
                      const DenseTensor& theta, double rho) {
  const Eigen::VectorXd resid = data.y() - forward(data, theta);
  const double n = static_cast<double>(data.sample_count());
  double value = resid.squaredNorm() / (2.0 * n);
  if (rho > 0.0) value += rho * splines.penalty_value(theta);
  return value;
}

double min_mode_singular_value(const DenseTensor& t, const std::vector<std::size_t>& rank) {
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < t.order(); ++d) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(matricize(t, d));
    const auto& sigma = svd.singularValues();
    const Eigen::Index idx = static_cast<Eigen::Index>(rank[d]) - 1;
    smallest = std::min(smallest, sigma(std::min(idx, sigma.size() - 1)));
  }
  return smallest;
}

}  // namespace

void FitConfig::validate(const std::vector<std::size_t>& coeff_dims) const {
  if (rank.size() != coeff_dims.size()) {
    throw std::invalid_argument("fit config: rank order must match coefficient order");
  }
  for (std::size_t d = 0; d < rank.size(); ++d) {
    if (rank[d] == 0 || rank[d] > coeff_dims[d]) {
      throw std::invalid_argument("fit config: rank out of range for mode " +
                                  std::to_string(d));
    }
  }
  if (rho < 0.0) throw std::invalid_argument("fit config: rho must be >= 0");
  if (max_iter < 1) throw std::invalid_argument("fit config: max_iter must be >= 1");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("fit config: rel_tol must be > 0");
}

TangentSystem assemble_tangent_system(const RegressionData& data, const TangentFrame& frame,
                                      const SplineSystem& splines) {
  const std::size_t n = data.sample_count();
  const Eigen::Index dim = static_cast<Eigen::Index>(frame.tangent_dim());
  TangentSystem sys;
  sys.design.resize(dim, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    sys.design.col(static_cast<Eigen::Index>(i)) = frame.contract(data.z(i)).pack();
  }
  sys.gram = Eigen::MatrixXd::Zero(dim, dim);
  sys.gram.selfadjointView<Eigen::Lower>().rankUpdate(sys.design);
  sys.gram = sys.gram.selfadjointView<Eigen::Lower>();
  sys.penalty = Mode0PenaltyOperator(frame, splines.penalty()).to_matrix();
  sys.rhs = sys.design * data.y();
  return sys;
}

Eigen::VectorXd solve_tangent_system(const TangentSystem& sys, double rho, std::size_t n,
                                     bool* jitter_used) {
  Eigen::MatrixXd lhs = sys.gram;
  if (rho > 0.0) lhs += (2.0 * rho * static_cast<double>(n)) * sys.penalty;
  Eigen::LLT<Eigen::MatrixXd> llt(lhs);
  if (llt.info() == Eigen::Success) {
    if (jitter_used) *jitter_used = false;
    return llt.solve(sys.rhs);
  }
  const double jitter = 1e-12 * lhs.trace() / static_cast<double>(lhs.rows());
  warn("tangent system factorization needed a diagonal jitter of " +
       std::to_string(jitter));
  if (jitter_used) *jitter_used = true;
  lhs.diagonal().array() += jitter;
  llt.compute(lhs);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "tangent least-squares system is singular; with rho = 0 this needs n >= dim of "
        "the tangent space");
  }
  return llt.solve(sys.rhs);
}

DenseTensor gn_step(const RegressionData& data, const TangentFrame& frame,
                    const SplineSystem& splines, double rho) {
  const std::size_t dim = frame.tangent_dim();
  if (rho == 0.0 && data.sample_count() < dim) {
    throw std::invalid_argument(
        "gn_step: under-determined with rho = 0; use rho > 0 or more samples");
  }
  TangentSystem sys = assemble_tangent_system(data, frame, splines);
  Eigen::VectorXd xi = solve_tangent_system(sys, rho, data.sample_count());
  return frame.extend(frame.unpack(xi));
}

TuckerTensor init_spectral(const RegressionData& data, const std::vector<std::size_t>& rank) {
  bool degenerate = false;
  TuckerTensor init = thosvd(adjoint(data, data.y()), rank, &degenerate);
  if (degenerate) warn("spectral initializer is rank degenerate");
  return init;
}

FitResult fit(const RegressionData& data, const SplineSystem& splines,
              const FitConfig& config) {
  config.validate(data.coeff_dims());
  if (data.coeff_dims()[0] != splines.knot_count()) {
    throw std::invalid_argument("fit: spline system does not match coefficient mode 0");
  }
  const std::size_t n = data.sample_count();
  const std::size_t dim = manifold_dim(data.coeff_dims(), config.rank);
  if (config.rho == 0.0 && n < dim) {
    throw std::invalid_argument(
        "fit: rho = 0 needs n >= dim of the tangent space (" + std::to_string(dim) +
        "); use a small rho > 0 instead");
  }

  FitResult result;
  TuckerTensor current =
      config.init ? *config.init : init_spectral(data, config.rank);
  current.validate();
  if (current.rank() != config.rank || current.outer_dims() != data.coeff_dims()) {
    throw std::invalid_argument("fit: initializer shape does not match rank/dims");
  }
  DenseTensor current_dense = current.to_dense();
  double objective = penalized_loss(data, splines, current_dense, config.rho);
  result.objective_trace.push_back(objective);

  const double truth_norm = config.truth ? norm(*config.truth) : 0.0;
  auto record_error = [&](const DenseTensor& dense) {
    if (config.truth) {
      result.error_trace.push_back(norm(dense - *config.truth) / truth_norm);
    }
  };
  record_error(current_dense);

  for (int k = 0; k < config.max_iter; ++k) {
    TangentFrame frame(current);
    TangentSystem sys = assemble_tangent_system(data, frame, splines);
    bool jitter = false;
    Eigen::VectorXd packed = solve_tangent_system(sys, config.rho, n, &jitter);
    result.jitter_used = result.jitter_used || jitter;
    TangentCoords xi = frame.unpack(packed);

    TuckerTensor next;
    DenseTensor next_dense;
    double next_objective = 0.0;
    const TangentCoords anchor = frame.point_coords();
    for (int attempt = 0;; ++attempt) {
      bool degenerate = false;
      next = thosvd(frame.extend(xi), config.rank, &degenerate);
      if (degenerate) warn("retraction produced a rank-degenerate iterate");
      next_dense = next.to_dense();
      next_objective = penalized_loss(data, splines, next_dense, config.rho);
      if (next_objective <= 10.0 * objective || attempt >= 5) break;
      // Step safeguard: move half-way back toward the current iterate.
      xi += anchor;
      xi *= 0.5;
      ++result.safeguard_events;
    }
    if (!std::isfinite(next_objective)) {
      throw std::runtime_error("fit: objective became non-finite at iteration " +
                               std::to_string(k + 1));
    }

    const double denom = norm(current_dense);
    const double rel_change =
        denom > 0.0 ? norm(next_dense - current_dense) / denom : 0.0;
    result.step_trace.push_back(rel_change);
    result.objective_trace.push_back(next_objective);

    current = std::move(next);
    current_dense = std::move(next_dense);
    objective = next_objective;
    record_error(current_dense);
    result.iterations = k + 1;
    if (rel_change < config.rel_tol) {
      result.converged = true;
      break;
    }
  }

  result.spectral_gap = min_mode_singular_value(current_dense, config.rank);
  result.theta = std::move(current);
  result.theta_dense = std::move(current_dense);
  return result;
}

ProfiledFitResult profiled_fit(const RegressionData& data,
                               const Eigen::MatrixXd& scalar_covariates,
                               const SplineSystem& splines, const FitConfig& config,
                               int outer_cap) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.sample_count());
  if (scalar_covariates.rows() != n) {
    throw std::invalid_argument("profiled fit: covariate rows must match sample count");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scalar_covariates);
  if (qr.rank() < scalar_covariates.cols()) {
    throw std::invalid_argument("profiled fit: scalar covariates are rank deficient");
  }

  ProfiledFitResult out;
  // OLS first, with no tensor component yet.
  out.gamma = qr.solve(data.y());

  FitConfig inner = config;
  double previous = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < outer_cap; ++pass) {
    const Eigen::VectorXd tensor_target = data.y() - scalar_covariates * out.gamma;
    out.fit = fit(data.with_response(tensor_target), splines, inner);
    inner.init = out.fit.theta;  // warm start the next pass

    const Eigen::VectorXd tensor_part = forward(data, out.fit.theta_dense);
    out.gamma = qr.solve(data.y() - tensor_part);

    const Eigen::VectorXd resid = data.y() - scalar_covariates * out.gamma - tensor_part;
    double joint = resid.squaredNorm() / (2.0 * static_cast<double>(n));
    if (config.rho > 0.0) joint += config.rho * splines.penalty_value(out.fit.theta_dense);
    out.joint_objective_trace.push_back(joint);
    out.outer_iterations = pass + 1;

    if (previous - joint < config.rel_tol * std::max(1.0, std::abs(previous))) break;
    previous = joint;
  }
  return out;
}

}  // namespace ftreg
