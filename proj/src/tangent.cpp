#include "ftreg/tangent.hpp"

#include <Eigen/SVD>
#include <stdexcept>
#include <string>

#include "ftreg/diagnostics.hpp"

namespace ftreg {

std::size_t TangentCoords::dim() const {
  std::size_t total = core.size();
  for (const auto& d : mode) {
    total += static_cast<std::size_t>(d.size());
  }
  return total;
}

Eigen::VectorXd TangentCoords::pack() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(dim()));
  Eigen::Index at = 0;
  for (double v : core.values()) out(at++) = v;
  for (const auto& d : mode) {
    if (d.size() > 0) {
      out.segment(at, d.size()) = Eigen::Map<const Eigen::VectorXd>(d.data(), d.size());
      at += d.size();
    }
  }
  return out;
}

TangentCoords& TangentCoords::operator+=(const TangentCoords& other) {
  core += other.core;
  for (std::size_t d = 0; d < mode.size(); ++d) mode[d] += other.mode[d];
  return *this;
}

TangentCoords& TangentCoords::operator*=(double alpha) {
  core *= alpha;
  for (auto& d : mode) d *= alpha;
  return *this;
}

TangentFrame::TangentFrame(TuckerTensor point) : point_(std::move(point)) {
  point_.validate();
  outer_dims_ = point_.outer_dims();
  rank_ = point_.rank();
  const std::size_t order = point_.order();

  complement_.resize(order);
  v_.resize(order);
  dim_ = point_.core.size();
  for (std::size_t d = 0; d < order; ++d) {
    const std::size_t r_d = rank_[d];
    const std::size_t r_other = point_.core.size() / r_d;
    if (r_other < r_d) {
      throw std::invalid_argument(
          "tangent frame: rank tuple is infeasible (r_d exceeds product of the others)");
    }
    const Eigen::MatrixXd core_mat = matricize(point_.core, d);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(core_mat);
    const auto& sigma = svd.singularValues();
    const double smallest = sigma(static_cast<Eigen::Index>(r_d) - 1);
    if (sigma(0) <= 0.0 || smallest <= 1e-12 * sigma(0)) {
      throw std::invalid_argument(
          "tangent frame: core matricization is rank deficient; the point is not an "
          "interior point of the fixed-rank manifold");
    }
    if (smallest < 1e-6 * sigma(0)) {
      warn("tangent frame near the manifold boundary: sigma_r/sigma_1 = " +
           std::to_string(smallest / sigma(0)) + " in mode " + std::to_string(d));
    }
    v_[d] = qr_orthonormal(core_mat.transpose());
    complement_[d] = orthonormal_complement(point_.factors[d]);
    factor_t_.push_back(point_.factors[d].transpose());
    dim_ += (outer_dims_[d] - r_d) * r_d;
  }
}

TangentCoords TangentFrame::zero_coords() const {
  TangentCoords xi;
  xi.core = DenseTensor(rank_);
  xi.mode.resize(order());
  for (std::size_t d = 0; d < order(); ++d) {
    xi.mode[d] = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(outer_dims_[d] - rank_[d]),
        static_cast<Eigen::Index>(rank_[d]));
  }
  return xi;
}

TangentCoords TangentFrame::point_coords() const {
  TangentCoords xi = zero_coords();
  xi.core = point_.core;
  return xi;
}

TangentCoords TangentFrame::unpack(const Eigen::Ref<const Eigen::VectorXd>& packed) const {
  if (static_cast<std::size_t>(packed.size()) != dim_) {
    throw std::invalid_argument("unpack: coordinate vector has wrong length");
  }
  TangentCoords xi = zero_coords();
  Eigen::Index at = 0;
  for (double& v : xi.core.values()) v = packed(at++);
  for (std::size_t d = 0; d < order(); ++d) {
    auto& block = xi.mode[d];
    if (block.size() > 0) {
      Eigen::Map<Eigen::VectorXd>(block.data(), block.size()) =
          packed.segment(at, block.size());
      at += block.size();
    }
  }
  return xi;
}

DenseTensor TangentFrame::extend(const TangentCoords& xi) const {
  const std::size_t order_n = order();
  if (xi.core.dims() != rank_ || xi.mode.size() != order_n) {
    throw std::invalid_argument("extend: coordinate shapes do not match the frame");
  }
  DenseTensor out = multi_mode_product(xi.core, point_.factors);
  for (std::size_t d = 0; d < order_n; ++d) {
    const auto& block = xi.mode[d];
    if (static_cast<std::size_t>(block.rows()) != outer_dims_[d] - rank_[d] ||
        static_cast<std::size_t>(block.cols()) != rank_[d]) {
      throw std::invalid_argument("extend: mode block shape mismatch");
    }
    if (block.rows() == 0) continue;
    std::vector<std::size_t> small_dims = rank_;
    small_dims[d] = static_cast<std::size_t>(block.rows());
    DenseTensor small = tensorize(block * v_[d].transpose(), d, std::move(small_dims));
    DenseTensor term = mode_product(small, complement_[d], d);
    for (std::size_t e = 0; e < order_n; ++e) {
      if (e != d) term = mode_product(term, point_.factors[e], e);
    }
    out += term;
  }
  return out;
}

TangentCoords TangentFrame::contract(const DenseTensor& upsilon) const {
  const std::size_t order_n = order();
  if (upsilon.dims() != outer_dims_) {
    throw std::invalid_argument("contract: tensor dims do not match the frame");
  }
  TangentCoords xi = zero_coords();
  // prefix = upsilon x_e U_e' for e < d, updated as d advances.
  DenseTensor prefix = upsilon;
  for (std::size_t d = 0; d < order_n; ++d) {
    DenseTensor partial = prefix;
    for (std::size_t e = d + 1; e < order_n; ++e) {
      partial = mode_product(partial, factor_t_[e], e);
    }
    // partial = upsilon x_e U_e' over all e != d.
    if (xi.mode[d].rows() > 0) {
      xi.mode[d].noalias() = complement_[d].transpose() * matricize(partial, d) * v_[d];
    }
    if (d + 1 == order_n) {
      xi.core = mode_product(partial, factor_t_[d], d);
    } else {
      prefix = mode_product(prefix, factor_t_[d], d);
    }
  }
  return xi;
}

DenseTensor TangentFrame::project(const DenseTensor& upsilon) const {
  return extend(contract(upsilon));
}

Mode0PenaltyOperator::Mode0PenaltyOperator(const TangentFrame& frame,
                                           const Eigen::MatrixXd& a)
    : frame_(frame) {
  const auto& u0 = frame.factor(0);
  const auto& u0p = frame.complement(0);
  if (a.rows() != u0.rows() || a.cols() != u0.rows()) {
    throw std::invalid_argument("penalty operator: matrix must be p_0 x p_0");
  }
  // The block decomposition for modes d >= 1 relies on A being symmetric.
  if ((a - a.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("penalty operator requires a symmetric matrix");
  }
  a_cc_ = u0.transpose() * a * u0;
  a_cp_ = u0.transpose() * a * u0p;
  a_pp_ = u0p.transpose() * a * u0p;
}

TangentCoords Mode0PenaltyOperator::apply(const TangentCoords& xi) const {
  const auto& rank = frame_.rank();
  TangentCoords out = frame_.zero_coords();

  // Core block: C x_0 (U0' A U0) + T_0(D_0 V_0') x_0 (U0' A U0_perp).
  out.core = mode_product(xi.core, a_cc_, 0);
  const auto& d0 = xi.mode[0];
  if (d0.rows() > 0) {
    std::vector<std::size_t> dims0 = rank;
    dims0[0] = static_cast<std::size_t>(d0.rows());
    DenseTensor t0 = tensorize(d0 * frame_.core_row_basis(0).transpose(), 0,
                               std::move(dims0));
    out.core += mode_product(t0, a_cp_, 0);
  }

  // Mode-0 block: (U0_perp' A U0) M_0(C) V_0 + (U0_perp' A U0_perp) D_0.
  if (out.mode[0].rows() > 0) {
    out.mode[0].noalias() =
        a_cp_.transpose() * (matricize(xi.core, 0) * frame_.core_row_basis(0));
    out.mode[0].noalias() += a_pp_ * d0;
  }

  // Modes d >= 1 couple only through the core row bases.
  for (std::size_t d = 1; d < frame_.order(); ++d) {
    const auto& dd = xi.mode[d];
    if (dd.rows() == 0) continue;
    std::vector<std::size_t> dims = rank;
    dims[d] = static_cast<std::size_t>(dd.rows());
    DenseTensor td = tensorize(dd * frame_.core_row_basis(d).transpose(), d,
                               std::move(dims));
    td = mode_product(td, a_cc_, 0);
    out.mode[d].noalias() = matricize(td, d) * frame_.core_row_basis(d);
  }
  return out;
}

Eigen::MatrixXd Mode0PenaltyOperator::to_matrix() const {
  const Eigen::Index n = static_cast<Eigen::Index>(frame_.tangent_dim());
  Eigen::MatrixXd out(n, n);
  Eigen::VectorXd basis = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    basis(j) = 1.0;
    out.col(j) = apply(frame_.unpack(basis)).pack();
    basis(j) = 0.0;
  }
  return out;
}

TangentCoords penalty_on_tangent(const TangentFrame& frame, const Eigen::MatrixXd& a,
                                 const TangentCoords& xi) {
  return Mode0PenaltyOperator(frame, a).apply(xi);
}

}  // namespace ftreg
