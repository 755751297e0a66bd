#include "lvglasso/sym_matrix.hpp"

#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace lvglasso {

SymMatrix::SymMatrix(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("SymMatrix: dim must be >= 1");
  m_ = Eigen::MatrixXd::Zero(dim, dim);
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m, double sym_tol) {
  if (m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << "SymMatrix: expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw std::invalid_argument(msg.str());
  }
  if (m.rows() < 1) throw std::invalid_argument("SymMatrix: dim must be >= 1");
  Eigen::Index bad_i = 0, bad_j = 0;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
      const double gap = std::abs(m(i, j) - m(j, i));
      if (gap > worst) {
        worst = gap;
        bad_i = i;
        bad_j = j;
      }
    }
  }
  if (worst > sym_tol) {
    std::ostringstream msg;
    msg << "SymMatrix: asymmetric input, entry (" << bad_i << "," << bad_j << ")="
        << m(bad_i, bad_j) << " vs (" << bad_j << "," << bad_i << ")="
        << m(bad_j, bad_i) << " differ by " << worst;
    throw std::invalid_argument(msg.str());
  }
  SymMatrix out;
  out.m_ = 0.5 * (m + m.transpose());
  return out;
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  SymMatrix out(dim);
  out.m_ = Eigen::MatrixXd::Identity(dim, dim);
  return out;
}

double SymMatrix::max_abs_offdiag() const {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m_.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m_.rows(); ++i)
      worst = std::max(worst, std::abs(m_(i, j)));
  return worst;
}

bool SymMatrix::is_positive_definite() const {
  if (dim() == 0) return false;
  return Eigen::LLT<Eigen::MatrixXd>(m_).info() == Eigen::Success;
}

PenaltyMask PenaltyMask::from_dense(const Eigen::MatrixXd& w, double sym_tol) {
  SymMatrix sym = SymMatrix::from_dense(w, sym_tol);
  for (Eigen::Index j = 0; j < sym.dim(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (sym(i, j) < 0.0) {
        std::ostringstream msg;
        msg << "PenaltyMask: negative weight " << sym(i, j) << " at (" << i << "," << j << ")";
        throw std::invalid_argument(msg.str());
      }
    }
  }
  PenaltyMask out;
  out.w_ = std::move(sym);
  return out;
}

PenaltyMask PenaltyMask::uniform_offdiag(Eigen::Index dim, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("PenaltyMask: lambda must be >= 0");
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(dim, dim, lambda);
  w.diagonal().setZero();
  return from_dense(w);
}

PenaltyMask PenaltyMask::zero(Eigen::Index dim) {
  return from_dense(Eigen::MatrixXd::Zero(dim, dim));
}

}  // namespace lvglasso
