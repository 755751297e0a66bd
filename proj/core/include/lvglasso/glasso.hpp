#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lvglasso/sym_matrix.hpp"

namespace lvglasso {

// sign(x) * max(|x| - t, 0), t >= 0.
double soft_threshold(double x, double t);

// -ln det(K) + tr(W K). K must be positive definite (Cholesky failure
// throws NumericalError).
double neg_log_lik(const SymMatrix& K, const SymMatrix& W);

struct LassoResult {
  Eigen::VectorXd beta;
  double kkt_residual = 0.0;
  int iterations = 0;  // full coordinate sweeps
  bool converged = false;
};

// Minimizes 0.5 b'Qb - target'b + sum_j penalties_j |b_j| by cyclic
// coordinate descent with soft-thresholding. `gram` must be positive
// definite with positive diagonal. Stops once the subgradient residual
// max_j dist(Q b - target, -penalties_j * sign(b_j)) drops to tol; hitting
// max_iter first returns the last iterate flagged not converged.
LassoResult lasso_cd(const Eigen::MatrixXd& gram, const Eigen::VectorXd& target,
                     const Eigen::VectorXd& penalties, double tol, int max_iter,
                     const Eigen::VectorXd* warm_start = nullptr);

struct GlassoConfig {
  double tol = 1e-6;      // max |change| of the working covariance per sweep
  int max_sweeps = 500;
  double inner_tol_factor = 0.1;  // inner lasso tol = tol * inner_tol_factor
  int inner_max_iter = 500;
  bool track_objective = true;  // record the objective after every sweep
};

struct GlassoSolution {
  SymMatrix precision;            // K, positive definite
  SymMatrix covariance_estimate;  // working covariance, ~ K^-1
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;  // full sweeps
  bool converged = false;
  std::vector<double> objective_trace;  // per sweep, when tracked
};

// Masked graphical lasso:
//
//   argmin_{K > 0}  -ln det(K) + tr(W K) + sum_{i<j} 2 M_ij |K_ij|
//                                        + sum_i M_ii K_ii
//
// solved by block coordinate descent on the working covariance estimate:
// each pass updates one row/column via a Lasso subproblem whose penalties
// are that row's mask weights. The working covariance diagonal is pinned to
// diag(W) + diag(M) throughout, so with a zero mask diagonal (the usual
// case) diag(covariance_estimate) == diag(W).
//
// At a converged solution, K^-1 satisfies entrywise stationarity:
//   |W_ij - (K^-1)_ij| <= M_ij                          where K_ij == 0
//   W_ij - (K^-1)_ij + M_ij * sign(K_ij) == 0           where K_ij != 0
GlassoSolution glasso_masked(const SymMatrix& W, const PenaltyMask& mask,
                             const GlassoConfig& cfg = {},
                             const GlassoSolution* warm_start = nullptr);

// (p+r)-dim mask with weight lambda on off-diagonal observed-observed
// entries (indices < p) and zero everywhere else: the diagonal and every
// entry touching a latent index stay unpenalized.
PenaltyMask lvglasso_mask(int p, int r, double lambda);

// Entrywise stationarity residual of `precision` for the masked problem,
// measured against the exact inverse of `precision`.
double glasso_kkt_residual(const SymMatrix& W, const PenaltyMask& mask,
                           const SymMatrix& precision, double zero_tol = 1e-12);

}  // namespace lvglasso
