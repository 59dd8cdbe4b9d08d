#include "ftreg/spline.hpp"

#include <algorithm>
#include <stdexcept>

#include "ftreg/quadrature.hpp"

namespace ftreg {

namespace {
constexpr std::size_t kQuadNodes = 8;
}

SplineSystem::SplineSystem(Grid grid, int penalty_order)
    : grid_(std::move(grid)), m_(penalty_order) {
  if (m_ != 2) {
    throw std::invalid_argument(
        "only cubic natural splines (penalty order m = 2) are supported");
  }
  const std::size_t p = grid_.size();
  if (p < 3) {
    throw std::invalid_argument("spline system needs at least 3 grid points");
  }
  const auto& t = grid_.points();

  // Banded Q (p x p-2) and R (p-2 x p-2) from the knot spacings.
  q_ = Eigen::MatrixXd::Zero(p, p - 2);
  r_ = Eigen::MatrixXd::Zero(p - 2, p - 2);
  for (std::size_t j = 1; j + 1 < p; ++j) {
    const double h_prev = t[j] - t[j - 1];
    const double h_next = t[j + 1] - t[j];
    const std::size_t c = j - 1;
    q_(j - 1, c) = 1.0 / h_prev;
    q_(j, c) = -1.0 / h_prev - 1.0 / h_next;
    q_(j + 1, c) = 1.0 / h_next;
    r_(c, c) = (h_prev + h_next) / 3.0;
    if (c > 0) {
      r_(c, c - 1) = h_prev / 6.0;
      r_(c - 1, c) = h_prev / 6.0;
    }
  }
  r_llt_.compute(r_);
  if (r_llt_.info() != Eigen::Success) {
    throw std::runtime_error("spline tridiagonal system is not positive definite");
  }

  omega_m_ = q_ * r_llt_.solve(q_.transpose());
  omega_m_ = 0.5 * (omega_m_ + omega_m_.transpose()).eval();

  // Polynomial design G and weighted projector P_m.
  g_.resize(p, m_);
  for (std::size_t j = 0; j < p; ++j) {
    double power = 1.0;
    for (int k = 0; k < m_; ++k) {
      g_(j, k) = power;
      power *= t[j];
    }
  }
  const Eigen::VectorXd delta = weight_diagonal();
  Eigen::MatrixXd gtdg = g_.transpose() * delta.asDiagonal() * g_;
  Eigen::LLT<Eigen::MatrixXd> gtdg_llt(gtdg);
  if (gtdg_llt.info() != Eigen::Success) {
    throw std::runtime_error("polynomial design is collinear on this grid");
  }
  p_m_ = g_ * gtdg_llt.solve(g_.transpose() * delta.asDiagonal());

  a_m_ = omega_m_ + delta.asDiagonal() * p_m_;
  a_m_ = 0.5 * (a_m_ + a_m_.transpose()).eval();

  // L2 Gram of the interpolation map, by per-interval Gauss-Legendre
  // (cardinal weights are piecewise cubic, so 8 nodes are exact).
  omega_0_ = Eigen::MatrixXd::Zero(p, p);
  const auto& gl = GaussLegendre::rule(kQuadNodes);
  const std::vector<double> breaks = grid_.breaks();
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    const double half = 0.5 * (breaks[i + 1] - breaks[i]);
    for (std::size_t k = 0; k < kQuadNodes; ++k) {
      const Eigen::VectorXd w = cardinal_weights(mid + half * gl.nodes[k]);
      omega_0_.selfadjointView<Eigen::Lower>().rankUpdate(w, half * gl.weights[k]);
    }
  }
  omega_0_ = omega_0_.selfadjointView<Eigen::Lower>();
}

Eigen::VectorXd SplineSystem::weight_diagonal() const {
  return Eigen::Map<const Eigen::VectorXd>(grid_.weights().data(),
                                           static_cast<Eigen::Index>(grid_.size()));
}

Eigen::MatrixXd SplineSystem::second_derivatives(
    const Eigen::Ref<const Eigen::MatrixXd>& values) const {
  const std::size_t p = grid_.size();
  if (static_cast<std::size_t>(values.rows()) != p) {
    throw std::invalid_argument("second_derivatives: row count must equal knot count");
  }
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(p, values.cols());
  full.middleRows(1, p - 2) = r_llt_.solve(q_.transpose() * values);
  return full;
}

SplineSystem::EvalCoeffs SplineSystem::eval_coeffs(double t) const {
  const auto& knots = grid_.points();
  const std::size_t p = knots.size();
  if (t < grid_.t_lo() || t > grid_.t_hi()) {
    throw std::invalid_argument("evaluation time outside the domain");
  }
  EvalCoeffs c{};
  if (t <= knots.front()) {
    // Linear extension left of the first knot.
    const double h = knots[1] - knots[0];
    const double s = t - knots[0];
    c.i0 = 0;
    c.i1 = 1;
    c.alpha0 = 1.0 - s / h;
    c.alpha1 = s / h;
    c.beta0 = 0.0;
    c.beta1 = -h * s / 6.0;
    return c;
  }
  if (t >= knots.back()) {
    const double h = knots[p - 1] - knots[p - 2];
    const double s = t - knots[p - 1];
    c.i0 = static_cast<int>(p) - 2;
    c.i1 = static_cast<int>(p) - 1;
    c.alpha0 = -s / h;
    c.alpha1 = 1.0 + s / h;
    c.beta0 = h * s / 6.0;
    c.beta1 = 0.0;
    return c;
  }
  const auto it = std::upper_bound(knots.begin(), knots.end(), t);
  std::size_t j = static_cast<std::size_t>(it - knots.begin()) - 1;
  j = std::min(j, p - 2);
  const double h = knots[j + 1] - knots[j];
  const double left = knots[j + 1] - t;
  const double right = t - knots[j];
  c.i0 = static_cast<int>(j);
  c.i1 = static_cast<int>(j) + 1;
  c.alpha0 = left / h;
  c.alpha1 = right / h;
  c.beta0 = left * left * left / (6.0 * h) - h * left / 6.0;
  c.beta1 = right * right * right / (6.0 * h) - h * right / 6.0;
  return c;
}

Eigen::VectorXd SplineSystem::cardinal_weights(double t) const {
  const std::size_t p = grid_.size();
  const EvalCoeffs c = eval_coeffs(t);
  Eigen::VectorXd beta_int = Eigen::VectorXd::Zero(p - 2);
  if (c.i0 >= 1 && c.i0 + 1 < static_cast<int>(p)) beta_int(c.i0 - 1) = c.beta0;
  if (c.i1 >= 1 && c.i1 + 1 < static_cast<int>(p)) beta_int(c.i1 - 1) = c.beta1;
  Eigen::VectorXd w = q_ * r_llt_.solve(beta_int);
  w(c.i0) += c.alpha0;
  w(c.i1) += c.alpha1;
  return w;
}

std::vector<DenseTensor> SplineSystem::eval_coefficient(
    const DenseTensor& theta, std::span<const double> times) const {
  if (theta.dim(0) != grid_.size()) {
    throw std::invalid_argument("eval_coefficient: theta mode 0 must match the grid");
  }
  const Eigen::MatrixXd values = matricize(theta, 0);
  const Eigen::MatrixXd second = second_derivatives(values);

  std::vector<std::size_t> slice_dims(theta.dims().begin() + 1, theta.dims().end());
  if (slice_dims.empty()) slice_dims = {1};

  std::vector<DenseTensor> out;
  out.reserve(times.size());
  for (double t : times) {
    const EvalCoeffs c = eval_coeffs(t);
    Eigen::RowVectorXd row = c.alpha0 * values.row(c.i0) + c.alpha1 * values.row(c.i1) +
                             c.beta0 * second.row(c.i0) + c.beta1 * second.row(c.i1);
    std::vector<double> vals(row.data(), row.data() + row.size());
    out.emplace_back(slice_dims, std::move(vals));
  }
  return out;
}

double SplineSystem::penalty_value(const DenseTensor& theta) const {
  if (theta.dim(0) != grid_.size()) {
    throw std::invalid_argument("penalty_value: theta mode 0 must match the grid");
  }
  return inner(mode_product(theta, a_m_, 0), theta);
}

double SplineSystem::l2_form(const DenseTensor& theta) const {
  if (theta.dim(0) != grid_.size()) {
    throw std::invalid_argument("l2_form: theta mode 0 must match the grid");
  }
  return inner(mode_product(theta, omega_0_, 0), theta);
}

}  // namespace ftreg
