#include "lvglasso/glasso.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "lvglasso/errors.hpp"

namespace lvglasso {

double soft_threshold(double x, double t) {
  if (t < 0.0) throw std::invalid_argument("soft_threshold: t must be >= 0");
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

namespace {

double log_det_llt(const Eigen::LLT<Eigen::MatrixXd>& llt, const char* what) {
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) + ": matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// sum_ij M_ij |K_ij|; for positive definite K the diagonal term is M_ii K_ii.
double masked_penalty(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m) {
  return (m.cwiseProduct(k.cwiseAbs())).sum();
}

// Copies m with row/column j removed.
void minor_into(const Eigen::MatrixXd& m, Eigen::Index j, Eigen::MatrixXd& out) {
  const Eigen::Index k = m.rows() - 1;
  out.topLeftCorner(j, j) = m.topLeftCorner(j, j);
  out.topRightCorner(j, k - j) = m.block(0, j + 1, j, k - j);
  out.bottomLeftCorner(k - j, j) = m.block(j + 1, 0, k - j, j);
  out.bottomRightCorner(k - j, k - j) = m.block(j + 1, j + 1, k - j, k - j);
}

void column_without(const Eigen::MatrixXd& m, Eigen::Index j, Eigen::VectorXd& out) {
  const Eigen::Index n = m.rows();
  out.head(j) = m.col(j).head(j);
  out.tail(n - 1 - j) = m.col(j).tail(n - 1 - j);
}

// Primal objective evaluated at the inverse of the working covariance.
double objective_at_inverse(const Eigen::MatrixXd& cov, const Eigen::MatrixXd& w,
                            const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const double logdet_cov = log_det_llt(llt, "glasso_masked");
  const Eigen::MatrixXd k = llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
  return logdet_cov + (w.cwiseProduct(k)).sum() + masked_penalty(k, m);
}

}  // namespace

double neg_log_lik(const SymMatrix& K, const SymMatrix& W) {
  if (K.dim() != W.dim()) throw std::invalid_argument("neg_log_lik: dimension mismatch");
  if (K.dim() < 1) throw std::invalid_argument("neg_log_lik: empty input");
  Eigen::LLT<Eigen::MatrixXd> llt(K.mat());
  const double logdet = log_det_llt(llt, "neg_log_lik");
  return -logdet + (W.mat().cwiseProduct(K.mat())).sum();
}

LassoResult lasso_cd(const Eigen::MatrixXd& gram, const Eigen::VectorXd& target,
                     const Eigen::VectorXd& penalties, double tol, int max_iter,
                     const Eigen::VectorXd* warm_start) {
  const Eigen::Index p = gram.rows();
  if (gram.cols() != p || target.size() != p || penalties.size() != p)
    throw std::invalid_argument("lasso_cd: dimension mismatch");
  if (tol <= 0.0) throw std::invalid_argument("lasso_cd: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("lasso_cd: max_iter must be >= 1");
  if ((penalties.array() < 0.0).any())
    throw std::invalid_argument("lasso_cd: penalties must be >= 0");

  LassoResult res;
  res.beta = (warm_start != nullptr && warm_start->size() == p)
                 ? *warm_start
                 : Eigen::VectorXd::Zero(p);
  if (p == 0) {
    res.converged = true;
    return res;
  }
  for (Eigen::Index j = 0; j < p; ++j)
    if (gram(j, j) <= 0.0)
      throw std::invalid_argument("lasso_cd: gram diagonal must be positive");

  // r = target - gram * beta, maintained incrementally across updates.
  Eigen::VectorXd r = target;
  r.noalias() -= gram * res.beta;

  const auto kkt_of = [&](const Eigen::VectorXd& resid) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double g = -resid(j);  // gradient of the smooth part
      double v;
      if (res.beta(j) > 0.0)
        v = std::abs(g + penalties(j));
      else if (res.beta(j) < 0.0)
        v = std::abs(g - penalties(j));
      else
        v = std::max(std::abs(g) - penalties(j), 0.0);
      worst = std::max(worst, v);
    }
    return worst;
  };

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double partial = r(j) + gram(j, j) * res.beta(j);
      const double updated = soft_threshold(partial, penalties(j)) / gram(j, j);
      const double delta = updated - res.beta(j);
      if (delta != 0.0) {
        r.noalias() -= gram.col(j) * delta;
        res.beta(j) = updated;
      }
    }
    res.iterations = sweep;
    if (kkt_of(r) <= tol) {
      // confirm on a freshly computed residual to rule out incremental drift
      r = target;
      r.noalias() -= gram * res.beta;
      const double exact = kkt_of(r);
      if (exact <= tol) {
        res.kkt_residual = exact;
        res.converged = true;
        return res;
      }
    }
  }
  r = target;
  r.noalias() -= gram * res.beta;
  res.kkt_residual = kkt_of(r);
  res.converged = res.kkt_residual <= tol;
  return res;
}

GlassoSolution glasso_masked(const SymMatrix& W, const PenaltyMask& mask,
                             const GlassoConfig& cfg, const GlassoSolution* warm_start) {
  const Eigen::Index n = W.dim();
  if (n < 1) throw std::invalid_argument("glasso_masked: empty W");
  if (mask.dim() != n) {
    std::ostringstream msg;
    msg << "glasso_masked: mask dim " << mask.dim() << " does not match W dim " << n;
    throw std::invalid_argument(msg.str());
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(W(i, i) > 0.0)) {
      std::ostringstream msg;
      msg << "glasso_masked: W diagonal must be strictly positive, W(" << i << "," << i
          << ")=" << W(i, i);
      throw std::invalid_argument(msg.str());
    }
  }
  if (cfg.tol <= 0.0) throw std::invalid_argument("glasso_masked: tol must be > 0");
  if (cfg.max_sweeps < 1) throw std::invalid_argument("glasso_masked: max_sweeps must be >= 1");

  const Eigen::MatrixXd& w = W.mat();
  const Eigen::MatrixXd& m = mask.mat();

  GlassoSolution sol;

  // Decoupled input: the solution is diagonal regardless of the mask.
  if (W.max_abs_offdiag() == 0.0) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    cov.diagonal() = w.diagonal() + m.diagonal();
    Eigen::MatrixXd prec = Eigen::MatrixXd::Zero(n, n);
    prec.diagonal() = cov.diagonal().cwiseInverse();
    sol.covariance_estimate = SymMatrix::from_dense(cov);
    sol.precision = SymMatrix::from_dense(prec);
    sol.objective = neg_log_lik(sol.precision, W) + masked_penalty(prec, m);
    sol.kkt_residual = glasso_kkt_residual(W, mask, sol.precision);
    sol.converged = true;
    sol.iterations = 0;
    if (cfg.track_objective) sol.objective_trace.push_back(sol.objective);
    return sol;
  }

  // Working covariance; its diagonal is pinned to diag(W) + diag(M).
  Eigen::MatrixXd cov;
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(n, n);  // column j: lasso solution for column j
  const bool have_warm = warm_start != nullptr &&
                         warm_start->covariance_estimate.dim() == n &&
                         warm_start->precision.dim() == n;
  if (have_warm) {
    cov = warm_start->covariance_estimate.mat();
    cov.diagonal() = w.diagonal() + m.diagonal();
    const Eigen::MatrixXd& kw = warm_start->precision.mat();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (kw(j, j) > 0.0) {
        coeffs.col(j) = -kw.col(j) / kw(j, j);
        coeffs(j, j) = 0.0;
      }
    }
  } else {
    cov = w;
    cov.diagonal() += m.diagonal();
  }

  Eigen::MatrixXd cov11(n - 1, n - 1);
  Eigen::VectorXd w12(n - 1), m12(n - 1), beta0(n - 1), newcol(n - 1), covcol(n - 1);
  const double inner_tol = cfg.tol * cfg.inner_tol_factor;

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double sweep_delta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      minor_into(cov, j, cov11);
      column_without(w, j, w12);
      column_without(m, j, m12);
      column_without(coeffs, j, beta0);
      const LassoResult lr =
          lasso_cd(cov11, w12, m12, inner_tol, cfg.inner_max_iter, &beta0);
      newcol.noalias() = cov11 * lr.beta;
      for (Eigen::Index i = 0, src = 0; i < n; ++i) {
        if (i == j) continue;
        const double nv = newcol(src);
        sweep_delta = std::max(sweep_delta, std::abs(nv - cov(i, j)));
        cov(i, j) = nv;
        cov(j, i) = nv;
        coeffs(i, j) = lr.beta(src);
        ++src;
      }
    }
    sol.iterations = sweep;
    if (cfg.track_objective)
      sol.objective_trace.push_back(objective_at_inverse(cov, w, m));
    if (sweep_delta <= cfg.tol) {
      sol.converged = true;
      break;
    }
  }

  // Recover the precision from the final covariance by back-substituting a
  // fresh lasso solution per column, then symmetrize away round-off.
  Eigen::MatrixXd prec(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    minor_into(cov, j, cov11);
    column_without(w, j, w12);
    column_without(m, j, m12);
    column_without(coeffs, j, beta0);
    const LassoResult lr =
        lasso_cd(cov11, w12, m12, inner_tol, cfg.inner_max_iter, &beta0);
    column_without(cov, j, covcol);
    const double schur = cov(j, j) - covcol.dot(lr.beta);
    if (!(schur > 0.0))
      throw NumericalError("glasso_masked: working covariance lost positive definiteness");
    const double kjj = 1.0 / schur;
    prec(j, j) = kjj;
    for (Eigen::Index i = 0, src = 0; i < n; ++i) {
      if (i == j) continue;
      prec(i, j) = -lr.beta(src) * kjj;
      ++src;
    }
  }
  sol.precision = SymMatrix::from_dense(0.5 * (prec + prec.transpose()));
  sol.covariance_estimate = SymMatrix::from_dense(cov);
  sol.objective = neg_log_lik(sol.precision, W) + masked_penalty(sol.precision.mat(), m);
  sol.kkt_residual = glasso_kkt_residual(W, mask, sol.precision);
  return sol;
}

PenaltyMask lvglasso_mask(int p, int r, double lambda) {
  if (p < 1) throw std::invalid_argument("lvglasso_mask: p must be >= 1");
  if (r < 0) throw std::invalid_argument("lvglasso_mask: r must be >= 0");
  if (lambda < 0.0) throw std::invalid_argument("lvglasso_mask: lambda must be >= 0");
  const Eigen::Index n = p + r;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w.topLeftCorner(p, p).setConstant(lambda);
  w.diagonal().head(p).setZero();
  return PenaltyMask::from_dense(w);
}

double glasso_kkt_residual(const SymMatrix& W, const PenaltyMask& mask,
                           const SymMatrix& precision, double zero_tol) {
  const Eigen::Index n = precision.dim();
  if (W.dim() != n || mask.dim() != n)
    throw std::invalid_argument("glasso_kkt_residual: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(precision.mat());
  if (llt.info() != Eigen::Success)
    throw NumericalError("glasso_kkt_residual: precision is not positive definite");
  const Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(n, n));
  double worst = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double grad = W(i, j) - sigma(i, j);
      const double kij = precision(i, j);
      double v;
      if (std::abs(kij) <= zero_tol)
        v = std::max(std::abs(grad) - mask(i, j), 0.0);
      else
        v = std::abs(grad + mask(i, j) * (kij > 0.0 ? 1.0 : -1.0));
      worst = std::max(worst, v);
    }
  }
  return worst;
}

}  // namespace lvglasso
