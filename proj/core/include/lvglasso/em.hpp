#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lvglasso/glasso.hpp"
#include "lvglasso/sym_matrix.hpp"

namespace lvglasso {

// Full (p+r)-dimensional precision matrix K split into observed (first p
// indices) and latent (last r indices) blocks. K must be positive definite,
// which makes K_H positive definite and S - L = K_O - K_OH K_H^-1 K_HO
// positive definite as well.
class PrecisionPartition {
 public:
  PrecisionPartition() = default;
  PrecisionPartition(int p, int r, SymMatrix K);

  int p() const { return p_; }
  int r() const { return r_; }
  const SymMatrix& K() const { return K_; }

  Eigen::MatrixXd observed_block() const;  // K_O,  p x p
  Eigen::MatrixXd cross_block() const;     // K_OH, p x r
  Eigen::MatrixXd latent_block() const;    // K_H,  r x r

 private:
  int p_ = 0;
  int r_ = 0;
  SymMatrix K_;
};

enum class InitScheme { kDiagonalRegularized, kWarmStart };

struct EmConfig {
  int r = 0;
  double lambda = 0.0;
  double em_tol = 1e-5;  // relative change of the observed objective
  int em_max_iter = 200;
  GlassoConfig inner;
  InitScheme init_scheme = InitScheme::kDiagonalRegularized;
  std::uint64_t init_seed = 0;
  double ridge = 1e-2;  // diagonal regularization for the initial inverse
};

struct EmFit {
  PrecisionPartition partition;
  SymMatrix S_hat;  // observed block of K
  SymMatrix L_hat;  // K_OH K_H^-1 K_HO, PSD with rank <= r
  std::vector<double> observed_objective_trace;  // entry 0 is the init value
  int iterations = 0;
  bool converged = false;
  double lambda = 0.0;
};

// Expected full-data covariance given the current model: the observed block
// is the sample covariance itself, the cross and latent blocks are the
// conditional-Gaussian expectations under K^(t).
SymMatrix e_step(const PrecisionPartition& current, const SymMatrix& sigma_o_n);

struct MStepResult {
  PrecisionPartition partition;
  GlassoSolution inner;  // kept for warm starts
};

// argmin_K -ln det K + tr(W K) + lambda |K_O restricted to off-diagonals|_1,
// i.e. glasso_masked under lvglasso_mask(p, r, lambda).
MStepResult m_step(const SymMatrix& W, const EmConfig& cfg,
                   const GlassoSolution* warm = nullptr);

// -ln det(S - L) + tr(sigma_o_n (S - L)) + lambda * sum_{i != j} |S_ij|.
// The EM convergence monitor. S - L must be positive definite.
double observed_objective(const SymMatrix& S, const SymMatrix& L,
                          const SymMatrix& sigma_o_n, double lambda);

// S = K_O and L = K_OH K_H^-1 K_HO; ((K^-1)_O)^-1 == S - L holds by the
// Schur complement identity.
std::pair<SymMatrix, SymMatrix> extract_sl(const PrecisionPartition& partition);

// Observed block (sigma_o_n + ridge I)^-1, latent block I_r, cross block
// small seeded pseudorandom values so the latent coordinates do not start
// exactly decoupled (K_OH = 0 is an EM fixed point). Diagonal is inflated
// until Cholesky passes.
PrecisionPartition init_partition(const SymMatrix& sigma_o_n, const EmConfig& cfg);

// Alternates e_step / m_step until the observed objective stabilizes:
// |obj_t - obj_{t-1}| <= em_tol * (1 + |obj_t|). With r = 0 this is a single
// masked glasso call on sigma_o_n.
EmFit fit(const SymMatrix& sigma_o_n, const EmConfig& cfg, const EmFit* warm = nullptr);

// One fit per lambda, warm-starting each from the previous solution.
// `lambdas` must be strictly descending and nonnegative. A failure at one
// lambda yields a flagged entry; the path continues.
std::vector<EmFit> lambda_path(const SymMatrix& sigma_o_n,
                               const std::vector<double>& lambdas,
                               const EmConfig& cfg);

}  // namespace lvglasso
