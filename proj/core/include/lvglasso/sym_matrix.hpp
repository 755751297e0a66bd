#pragma once

#include <Eigen/Dense>

namespace lvglasso {

// Dense symmetric matrix, the carrier for covariances, precisions and
// penalty weights. Symmetry holds exactly: construction averages the two
// triangles (after checking the asymmetry is below a tolerance) and set()
// writes both (i,j) and (j,i).
class SymMatrix {
 public:
  SymMatrix() = default;  // empty placeholder, dim 0
  explicit SymMatrix(Eigen::Index dim);

  // Validates |m - m^T|_inf <= sym_tol, then stores (m + m^T) / 2.
  static SymMatrix from_dense(const Eigen::MatrixXd& m, double sym_tol = 1e-9);

  static SymMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  void set(Eigen::Index i, Eigen::Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Eigen::MatrixXd& mat() const { return m_; }

  // Largest |off-diagonal| entry; 0 for dim <= 1.
  double max_abs_offdiag() const;

  // True when a Cholesky factorization succeeds.
  bool is_positive_definite() const;

 private:
  Eigen::MatrixXd m_;
};

// Per-entry nonnegative penalty weights for the masked graphical lasso.
// Symmetric with weights >= 0, both enforced at construction.
class PenaltyMask {
 public:
  PenaltyMask() = default;
  static PenaltyMask from_dense(const Eigen::MatrixXd& w, double sym_tol = 1e-9);

  // lambda on every off-diagonal entry, 0 on the diagonal.
  static PenaltyMask uniform_offdiag(Eigen::Index dim, double lambda);

  static PenaltyMask zero(Eigen::Index dim);

  Eigen::Index dim() const { return w_.dim(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return w_(i, j); }
  const Eigen::MatrixXd& mat() const { return w_.mat(); }

 private:
  SymMatrix w_;
};

}  // namespace lvglasso
