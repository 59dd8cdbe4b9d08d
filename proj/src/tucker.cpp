#include "ftreg/tucker.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <stdexcept>

namespace ftreg {

std::vector<std::size_t> TuckerTensor::outer_dims() const {
  std::vector<std::size_t> out(factors.size());
  for (std::size_t d = 0; d < factors.size(); ++d) {
    out[d] = static_cast<std::size_t>(factors[d].rows());
  }
  return out;
}

DenseTensor TuckerTensor::to_dense() const {
  return multi_mode_product(core, factors);
}

void TuckerTensor::validate(double tol) const {
  if (factors.size() != core.order()) {
    throw std::invalid_argument("tucker: need one factor per core mode");
  }
  for (std::size_t d = 0; d < factors.size(); ++d) {
    const auto& u = factors[d];
    if (static_cast<std::size_t>(u.cols()) != core.dim(d)) {
      throw std::invalid_argument("tucker: factor columns must match core extent");
    }
    if (u.rows() < u.cols()) {
      throw std::invalid_argument("tucker: rank exceeds mode dimension");
    }
    Eigen::MatrixXd gram = u.transpose() * u;
    gram -= Eigen::MatrixXd::Identity(u.cols(), u.cols());
    if (gram.cwiseAbs().maxCoeff() > tol) {
      throw std::invalid_argument("tucker: factor columns are not orthonormal");
    }
  }
}

void fix_column_signs(Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      double a = std::abs(m(i, j));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (m(imax, j) < 0.0) m.col(j) = -m.col(j);
  }
}

Eigen::MatrixXd leading_singular_vectors(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                         Eigen::Index r, bool* degenerate) {
  if (r < 1 || r > m.rows() || r > m.cols()) {
    throw std::invalid_argument("leading_singular_vectors: rank out of range");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  if (degenerate) {
    *degenerate = sigma(0) <= 0.0 || sigma(r - 1) < 1e-12 * sigma(0);
  }
  Eigen::MatrixXd u = svd.matrixU().leftCols(r);
  fix_column_signs(u);
  return u;
}

Eigen::MatrixXd qr_orthonormal(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  fix_column_signs(q);
  return q;
}

Eigen::MatrixXd orthonormal_complement(const Eigen::Ref<const Eigen::MatrixXd>& u) {
  const Eigen::Index p = u.rows();
  const Eigen::Index r = u.cols();
  if (r > p) throw std::invalid_argument("orthonormal_complement: more columns than rows");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd comp = full.rightCols(p - r);
  fix_column_signs(comp);
  return comp;
}

TuckerTensor thosvd(const DenseTensor& t, const std::vector<std::size_t>& rank,
                    bool* degenerate) {
  if (rank.size() != t.order()) {
    throw std::invalid_argument("thosvd: rank tuple order mismatch");
  }
  TuckerTensor out;
  out.factors.resize(t.order());
  std::vector<Eigen::MatrixXd> transposes(t.order());
  bool any_degenerate = false;
  for (std::size_t d = 0; d < t.order(); ++d) {
    if (rank[d] > t.dim(d)) {
      throw std::invalid_argument("thosvd: rank exceeds mode dimension");
    }
    bool deg = false;
    out.factors[d] = leading_singular_vectors(matricize(t, d),
                                              static_cast<Eigen::Index>(rank[d]), &deg);
    any_degenerate = any_degenerate || deg;
    transposes[d] = out.factors[d].transpose();
  }
  if (degenerate) *degenerate = any_degenerate;
  out.core = multi_mode_product(t, transposes);
  return out;
}

}  // namespace ftreg
