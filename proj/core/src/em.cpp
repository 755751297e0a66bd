#include "lvglasso/em.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "lvglasso/errors.hpp"
#include "lvglasso/rng.hpp"

namespace lvglasso {

namespace {

void validate_sample_covariance(const SymMatrix& sigma_o_n) {
  const Eigen::Index p = sigma_o_n.dim();
  if (p < 1) throw std::invalid_argument("fit: sample covariance is empty");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(sigma_o_n(i, i) > 0.0)) {
      std::ostringstream msg;
      msg << "fit: sample covariance diagonal must be positive, entry (" << i << "," << i
          << ")=" << sigma_o_n(i, i);
      throw std::invalid_argument(msg.str());
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_o_n.mat(),
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-8 * std::max(1.0, hi))
    throw std::invalid_argument("fit: sample covariance is not positive semidefinite");
}

void validate_config(const EmConfig& cfg) {
  if (cfg.r < 0) throw std::invalid_argument("fit: r must be >= 0");
  if (cfg.lambda < 0.0) throw std::invalid_argument("fit: lambda must be >= 0");
  if (cfg.em_tol <= 0.0) throw std::invalid_argument("fit: em_tol must be > 0");
  if (cfg.em_max_iter < 1) throw std::invalid_argument("fit: em_max_iter must be >= 1");
  if (cfg.ridge < 0.0) throw std::invalid_argument("fit: ridge must be >= 0");
}

// Inverse through Cholesky; input must be positive definite.
Eigen::MatrixXd pd_inverse(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) + ": matrix is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

GlassoSolution inner_state_from(const PrecisionPartition& part) {
  GlassoSolution s;
  s.precision = part.K();
  s.covariance_estimate =
      SymMatrix::from_dense(pd_inverse(part.K().mat(), "fit: warm start"));
  s.converged = true;
  return s;
}

}  // namespace

PrecisionPartition::PrecisionPartition(int p, int r, SymMatrix K)
    : p_(p), r_(r), K_(std::move(K)) {
  if (p_ < 1) throw std::invalid_argument("PrecisionPartition: p must be >= 1");
  if (r_ < 0) throw std::invalid_argument("PrecisionPartition: r must be >= 0");
  if (K_.dim() != p_ + r_) {
    std::ostringstream msg;
    msg << "PrecisionPartition: K dim " << K_.dim() << " != p + r = " << (p_ + r_);
    throw std::invalid_argument(msg.str());
  }
  if (!K_.is_positive_definite())
    throw std::invalid_argument("PrecisionPartition: K must be positive definite");
}

Eigen::MatrixXd PrecisionPartition::observed_block() const {
  return K_.mat().topLeftCorner(p_, p_);
}

Eigen::MatrixXd PrecisionPartition::cross_block() const {
  return K_.mat().topRightCorner(p_, r_);
}

Eigen::MatrixXd PrecisionPartition::latent_block() const {
  return K_.mat().bottomRightCorner(r_, r_);
}

SymMatrix e_step(const PrecisionPartition& current, const SymMatrix& sigma_o_n) {
  const int p = current.p();
  const int r = current.r();
  if (sigma_o_n.dim() != p)
    throw std::invalid_argument("e_step: sigma_o_n dimension must equal p");
  if (r == 0) return sigma_o_n;

  const Eigen::Index n = p + r;
  const Eigen::MatrixXd sigma_t = pd_inverse(current.K().mat(), "e_step");
  const Eigen::MatrixXd sigma_o = sigma_t.topLeftCorner(p, p);
  const Eigen::MatrixXd sigma_oh = sigma_t.topRightCorner(p, r);
  const Eigen::MatrixXd sigma_h = sigma_t.bottomRightCorner(r, r);

  Eigen::LLT<Eigen::MatrixXd> llt_o(sigma_o);
  if (llt_o.info() != Eigen::Success)
    throw NumericalError("e_step: observed block of the model covariance is singular");
  const Eigen::MatrixXd a = llt_o.solve(sigma_oh);  // (Sigma_O^t)^-1 Sigma_OH^t

  const Eigen::MatrixXd cond_var = sigma_h - sigma_oh.transpose() * a;
  const Eigen::MatrixXd w_oh = sigma_o_n.mat() * a;
  const Eigen::MatrixXd w_h = cond_var + a.transpose() * sigma_o_n.mat() * a;

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w.topLeftCorner(p, p) = sigma_o_n.mat();
  w.topRightCorner(p, r) = w_oh;
  w.bottomLeftCorner(r, p) = w_oh.transpose();
  w.bottomRightCorner(r, r) = 0.5 * (w_h + w_h.transpose());
  return SymMatrix::from_dense(w);
}

MStepResult m_step(const SymMatrix& W, const EmConfig& cfg, const GlassoSolution* warm) {
  if (cfg.r < 0) throw std::invalid_argument("m_step: r must be >= 0");
  const int p = static_cast<int>(W.dim()) - cfg.r;
  if (p < 1) throw std::invalid_argument("m_step: W dimension must exceed r");
  const PenaltyMask mask = lvglasso_mask(p, cfg.r, cfg.lambda);
  GlassoSolution sol = glasso_masked(W, mask, cfg.inner, warm);
  PrecisionPartition part(p, cfg.r, sol.precision);
  return MStepResult{std::move(part), std::move(sol)};
}

double observed_objective(const SymMatrix& S, const SymMatrix& L,
                          const SymMatrix& sigma_o_n, double lambda) {
  const Eigen::Index p = S.dim();
  if (L.dim() != p || sigma_o_n.dim() != p)
    throw std::invalid_argument("observed_objective: dimension mismatch");
  if (lambda < 0.0) throw std::invalid_argument("observed_objective: lambda must be >= 0");
  const Eigen::MatrixXd diff = S.mat() - L.mat();
  Eigen::LLT<Eigen::MatrixXd> llt(diff);
  if (llt.info() != Eigen::Success)
    throw NumericalError("observed_objective: S - L is not positive definite");
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double trace_term = (sigma_o_n.mat().cwiseProduct(diff)).sum();
  const double l1 =
      S.mat().cwiseAbs().sum() - S.mat().diagonal().cwiseAbs().sum();
  return -logdet + trace_term + lambda * l1;
}

std::pair<SymMatrix, SymMatrix> extract_sl(const PrecisionPartition& partition) {
  const int p = partition.p();
  const int r = partition.r();
  SymMatrix s = SymMatrix::from_dense(partition.observed_block());
  if (r == 0) return {std::move(s), SymMatrix(p)};
  const Eigen::MatrixXd koh = partition.cross_block();
  Eigen::LLT<Eigen::MatrixXd> llt_h(partition.latent_block());
  if (llt_h.info() != Eigen::Success)
    throw NumericalError("extract_sl: latent block is not positive definite");
  const Eigen::MatrixXd l = koh * llt_h.solve(koh.transpose());
  return {std::move(s), SymMatrix::from_dense(0.5 * (l + l.transpose()))};
}

PrecisionPartition init_partition(const SymMatrix& sigma_o_n, const EmConfig& cfg) {
  validate_config(cfg);
  const Eigen::Index p = sigma_o_n.dim();
  if (p < 1) throw std::invalid_argument("init_partition: empty covariance");

  const Eigen::MatrixXd reg =
      sigma_o_n.mat() + cfg.ridge * Eigen::MatrixXd::Identity(p, p);
  const Eigen::MatrixXd k_o = pd_inverse(reg, "init_partition");

  const Eigen::Index n = p + cfg.r;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  k.topLeftCorner(p, p) = 0.5 * (k_o + k_o.transpose());
  if (cfg.r > 0) {
    k.bottomRightCorner(cfg.r, cfg.r).setIdentity();
    // Small seeded cross entries keep the latent coordinates coupled to the
    // observables; K_OH = 0 would be a fixed point of the EM iteration.
    Rng rng(cfg.init_seed);
    for (Eigen::Index i = 0; i < p; ++i) {
      for (int j = 0; j < cfg.r; ++j) {
        const double v = rng.uniform(-0.01, 0.01);
        k(i, p + j) = v;
        k(p + j, i) = v;
      }
    }
  }

  if (Eigen::LLT<Eigen::MatrixXd>(k).info() != Eigen::Success) {
    // Shift the diagonal past the most negative eigenvalue.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    k.diagonal().array() += -lo + std::max(1e-6, 1e-10 * std::abs(lo));
  }
  return PrecisionPartition(static_cast<int>(p), cfg.r, SymMatrix::from_dense(k));
}

EmFit fit(const SymMatrix& sigma_o_n, const EmConfig& cfg, const EmFit* warm) {
  validate_config(cfg);
  validate_sample_covariance(sigma_o_n);
  const int p = static_cast<int>(sigma_o_n.dim());

  const bool usable_warm = warm != nullptr && warm->partition.p() == p &&
                           warm->partition.r() == cfg.r &&
                           warm->partition.K().dim() == p + cfg.r;
  if (cfg.init_scheme == InitScheme::kWarmStart && !usable_warm)
    throw std::invalid_argument("fit: warm-start init requested without a usable warm fit");

  EmFit out;
  out.lambda = cfg.lambda;

  PrecisionPartition k_t =
      usable_warm ? warm->partition : init_partition(sigma_o_n, cfg);
  {
    auto [s0, l0] = extract_sl(k_t);
    out.observed_objective_trace.push_back(
        observed_objective(s0, l0, sigma_o_n, cfg.lambda));
  }

  GlassoSolution inner;
  bool have_inner = false;
  if (usable_warm) {
    inner = inner_state_from(k_t);
    have_inner = true;
  }

  // With r = 0 there is nothing to marginalize: one masked glasso solve on
  // the sample covariance is the whole estimator.
  const int max_steps = cfg.r == 0 ? 1 : cfg.em_max_iter;
  bool inner_ok = true;
  bool em_converged = false;
  for (int t = 1; t <= max_steps; ++t) {
    const SymMatrix w = cfg.r == 0 ? sigma_o_n : e_step(k_t, sigma_o_n);
    MStepResult ms = m_step(w, cfg, have_inner ? &inner : nullptr);
    inner_ok = inner_ok && ms.inner.converged;
    k_t = std::move(ms.partition);
    inner = std::move(ms.inner);
    have_inner = true;

    auto [s, l] = extract_sl(k_t);
    const double obj = observed_objective(s, l, sigma_o_n, cfg.lambda);
    const double prev = out.observed_objective_trace.back();
    out.observed_objective_trace.push_back(obj);
    out.iterations = t;
    if (std::abs(obj - prev) <= cfg.em_tol * (1.0 + std::abs(obj))) {
      em_converged = true;
      break;
    }
  }
  if (cfg.r == 0) em_converged = true;

  auto [s_hat, l_hat] = extract_sl(k_t);
  out.partition = std::move(k_t);
  out.S_hat = std::move(s_hat);
  out.L_hat = std::move(l_hat);
  out.converged = em_converged && inner_ok;
  return out;
}

std::vector<EmFit> lambda_path(const SymMatrix& sigma_o_n,
                               const std::vector<double>& lambdas,
                               const EmConfig& cfg) {
  if (lambdas.empty()) throw std::invalid_argument("lambda_path: empty lambda list");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] < 0.0)
      throw std::invalid_argument("lambda_path: lambdas must be >= 0");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1]))
      throw std::invalid_argument("lambda_path: lambdas must be strictly descending");
  }
  validate_config(cfg);
  validate_sample_covariance(sigma_o_n);

  std::vector<EmFit> out;
  out.reserve(lambdas.size());
  const EmFit* warm = nullptr;
  for (const double lam : lambdas) {
    EmConfig c = cfg;
    c.lambda = lam;
    c.init_scheme = InitScheme::kDiagonalRegularized;
    try {
      out.push_back(fit(sigma_o_n, c, warm));
      warm = &out.back();
    } catch (const NumericalError&) {
      // Record the failure and continue cold at the next lambda.
      EmFit failed;
      failed.lambda = lam;
      out.push_back(std::move(failed));
      warm = nullptr;
    }
  }
  return out;
}

}  // namespace lvglasso
