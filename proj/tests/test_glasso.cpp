#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "lvglasso/errors.hpp"
#include "lvglasso/glasso.hpp"
#include "lvglasso/rng.hpp"
#include "oracles.hpp"

using namespace lvglasso;

namespace {

SymMatrix sym2(double a, double b, double c) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, b, c;
  return SymMatrix::from_dense(m);
}

}  // namespace

TEST_CASE("soft_threshold") {
  CHECK(soft_threshold(0.5, 0.2) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(soft_threshold(-0.1, 0.2) == 0.0);
  CHECK(soft_threshold(-0.5, 0.2) == doctest::Approx(-0.3).epsilon(1e-15));
  Rng rng(7);
  for (int k = 0; k < 50; ++k) {
    const double x = rng.uniform(-5.0, 5.0);
    CHECK(soft_threshold(x, 0.0) == x);  // t = 0 is the identity
  }
  CHECK_THROWS_AS(soft_threshold(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("neg_log_lik closed forms") {
  for (const int p : {1, 2, 5})
    CHECK(neg_log_lik(SymMatrix::identity(p), SymMatrix::identity(p)) ==
          doctest::Approx(p).epsilon(1e-14));

  // 2*I_2: -2 ln 2 + 4
  CHECK(neg_log_lik(sym2(2, 0, 2), SymMatrix::identity(2)) ==
        doctest::Approx(2.6137056388801094).epsilon(1e-14));

  // [[2,1],[1,2]]: det 3, trace term 4
  CHECK(neg_log_lik(sym2(2, 1, 2), SymMatrix::identity(2)) ==
        doctest::Approx(2.9013877113318902).epsilon(1e-14));

  // indefinite K
  CHECK_THROWS_AS(neg_log_lik(sym2(1, 2, 1), SymMatrix::identity(2)), NumericalError);
  CHECK_THROWS_AS(neg_log_lik(SymMatrix::identity(2), SymMatrix::identity(3)),
                  std::invalid_argument);
}

TEST_CASE("lasso_cd decoupled cases") {
  const Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(3, 3);

  // unpenalized orthonormal case: beta = target
  Eigen::VectorXd target(3);
  target << 0.7, -1.3, 0.001;
  LassoResult r = lasso_cd(gram, target, Eigen::VectorXd::Zero(3), 1e-10, 100);
  CHECK(r.converged);
  CHECK((r.beta - target).lpNorm<Eigen::Infinity>() <= 1e-12);

  // decoupled soft-thresholding
  Eigen::VectorXd t2(2), pen2(2);
  t2 << 0.5, -0.1;
  pen2 << 0.2, 0.2;
  r = lasso_cd(Eigen::MatrixXd::Identity(2, 2), t2, pen2, 1e-12, 100);
  CHECK(r.converged);
  CHECK(r.beta(0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(r.beta(1) == 0.0);
}

TEST_CASE("lasso_cd matches grid + KKT oracle on random problems") {
  Rng rng(20240501);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd gram = oracles::random_spd(rng, 4, 0.4, 2.5);
    Eigen::VectorXd target(4);
    for (int i = 0; i < 4; ++i) target(i) = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd pen = Eigen::VectorXd::Constant(4, 0.1);

    const LassoResult r = lasso_cd(gram, target, pen, 1e-9, 1000);
    REQUIRE(r.converged);

    // independent stationarity check
    CHECK(oracles::lasso_kkt(gram, target, pen, r.beta) <= 1e-8);

    // no grid point near the solution does better on the active coordinates
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < 4; ++j)
      if (r.beta(j) != 0.0) active.push_back(j);
    const double here = oracles::lasso_objective(gram, target, pen, r.beta);
    const double grid =
        oracles::lasso_grid_min(gram, target, pen, r.beta, active, 1e-3, 3);
    CHECK(here <= grid + 1e-9);
  }
}

TEST_CASE("lasso_cd flags non-convergence") {
  // strongly coupled gram, one sweep only
  Eigen::MatrixXd gram(3, 3);
  gram << 1.0, 0.95, 0.9, 0.95, 1.0, 0.95, 0.9, 0.95, 1.0;
  gram += 0.05 * Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd target(3);
  target << 1.0, -2.0, 1.5;
  const LassoResult r =
      lasso_cd(gram, target, Eigen::VectorXd::Zero(3), 1e-12, 1);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.beta.allFinite());
}

TEST_CASE("lasso_cd input validation") {
  const Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd t = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(lasso_cd(gram, t, Eigen::VectorXd::Constant(2, -0.1), 1e-6, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(lasso_cd(gram, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(2), 1e-6, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(lasso_cd(Eigen::MatrixXd::Zero(2, 2), t, Eigen::VectorXd::Zero(2), 1e-6, 10),
                  std::invalid_argument);
}

TEST_CASE("lvglasso_mask layout") {
  const PenaltyMask m1 = lvglasso_mask(2, 0, 0.5);
  Eigen::MatrixXd want(2, 2);
  want << 0.0, 0.5, 0.5, 0.0;
  CHECK((m1.mat() - want).cwiseAbs().maxCoeff() == 0.0);

  // single observed variable: nothing to penalize
  const PenaltyMask m2 = lvglasso_mask(1, 1, 0.5);
  CHECK(m2.dim() == 2);
  CHECK(m2.mat().cwiseAbs().maxCoeff() == 0.0);

  const PenaltyMask m3 = lvglasso_mask(2, 1, 0.7);
  CHECK(m3.dim() == 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double want_ij = (i != j && i < 2 && j < 2) ? 0.7 : 0.0;
      CHECK(m3(i, j) == want_ij);
    }

  CHECK_THROWS_AS(lvglasso_mask(0, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(lvglasso_mask(2, -1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(lvglasso_mask(2, 1, -0.1), std::invalid_argument);
}

TEST_CASE("glasso_masked unpenalized equals inverse") {
  Rng rng(11);
  GlassoConfig cfg;
  cfg.tol = 1e-9;
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 2 + rep;
    const Eigen::MatrixXd w = oracles::random_spd(rng, n, 0.5, 2.0);
    const SymMatrix W = SymMatrix::from_dense(w);
    const GlassoSolution sol = glasso_masked(W, PenaltyMask::zero(n), cfg);
    REQUIRE(sol.converged);
    const Eigen::MatrixXd direct = w.inverse();
    CHECK((sol.precision.mat() - direct).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("glasso_masked 2x2 closed form") {
  const SymMatrix W = sym2(1.0, 0.5, 1.0);
  const PenaltyMask mask = PenaltyMask::uniform_offdiag(2, 0.2);
  const GlassoSolution sol = glasso_masked(W, mask);
  REQUIRE(sol.converged);

  // covariance off-diagonal is soft_threshold(W_12, lambda)
  CHECK(sol.covariance_estimate(0, 1) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(sol.covariance_estimate(0, 0) == 1.0);
  CHECK(sol.covariance_estimate(1, 1) == 1.0);

  CHECK(sol.precision(0, 0) == doctest::Approx(1.0989010989010990).epsilon(1e-8));
  CHECK(sol.precision(0, 1) == doctest::Approx(-0.32967032967032966).epsilon(1e-8));

  CHECK(oracles::glasso_kkt(sol.precision.mat(), W.mat(), mask.mat()) <= 1e-8);
}

TEST_CASE("glasso_masked full thresholding at large lambda") {
  Rng rng(31);
  Eigen::MatrixXd w = oracles::random_spd(rng, 4, 0.6, 1.8);
  // unit diagonal, correlation-like
  const Eigen::VectorXd d = w.diagonal().cwiseSqrt().cwiseInverse();
  w = d.asDiagonal() * w * d.asDiagonal();
  w = 0.5 * (w + w.transpose());
  w.diagonal().setOnes();
  const SymMatrix W = SymMatrix::from_dense(w);
  const double lam = W.max_abs_offdiag() + 0.01;

  const GlassoSolution sol = glasso_masked(W, PenaltyMask::uniform_offdiag(4, lam));
  REQUIRE(sol.converged);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j)
        CHECK(sol.precision(i, i) == doctest::Approx(1.0 / w(i, i)).epsilon(1e-9));
      else
        CHECK(sol.precision(i, j) == 0.0);
    }
  CHECK(oracles::glasso_kkt(sol.precision.mat(), W.mat(),
                            PenaltyMask::uniform_offdiag(4, lam).mat()) <= 1e-8);
}

TEST_CASE("glasso_masked diagonal input fast path") {
  Eigen::MatrixXd w = Eigen::VectorXd::LinSpaced(4, 1.0, 2.5).asDiagonal();
  const GlassoSolution sol =
      glasso_masked(SymMatrix::from_dense(w), PenaltyMask::uniform_offdiag(4, 0.3));
  CHECK(sol.converged);
  CHECK(sol.iterations == 0);
  for (int i = 0; i < 4; ++i) CHECK(sol.precision(i, i) == 1.0 / w(i, i));
  CHECK(sol.precision.max_abs_offdiag() == 0.0);
}

TEST_CASE("glasso_masked KKT + invariants on random problems") {
  Rng rng(404);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 8);
    const Eigen::MatrixXd w = oracles::random_spd(rng, n, 0.4, 2.5);
    const Eigen::MatrixXd mask_m = oracles::random_mask(rng, n, 0.25);
    const SymMatrix W = SymMatrix::from_dense(w);
    const PenaltyMask mask = PenaltyMask::from_dense(mask_m);

    const GlassoSolution sol = glasso_masked(W, mask);
    REQUIRE(sol.converged);

    // stationarity within 10x the sweep tolerance (independent oracle)
    CHECK(oracles::glasso_kkt(sol.precision.mat(), w, mask_m) <= 10.0 * 1e-6);

    // positive definiteness
    CHECK(sol.precision.is_positive_definite());

    // diagonal fidelity for zero-diagonal masks
    for (int i = 0; i < n; ++i) CHECK(sol.covariance_estimate(i, i) == w(i, i));

    // precision * covariance_estimate tracks the identity
    const Eigen::MatrixXd id_err =
        sol.precision.mat() * sol.covariance_estimate.mat() -
        Eigen::MatrixXd::Identity(n, n);
    CHECK(id_err.cwiseAbs().maxCoeff() <= 1e-4);

    // reported objective matches the direct evaluation
    const double direct = oracles::glasso_objective(sol.precision.mat(), w, mask_m);
    CHECK(sol.objective == doctest::Approx(direct).epsilon(1e-8));

    // per-sweep objective never increases
    for (std::size_t s = 1; s < sol.objective_trace.size(); ++s)
      CHECK(sol.objective_trace[s] <= sol.objective_trace[s - 1] + 1e-10);
  }
}

TEST_CASE("glasso_masked grid oracle equivalence (dim <= 3)") {
  Rng rng(777);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 2 + rep % 2;
    const Eigen::MatrixXd w = oracles::random_spd(rng, n, 0.5, 2.0);
    const Eigen::MatrixXd mask_m = oracles::random_mask(rng, n, 0.2);
    GlassoConfig cfg;
    cfg.tol = 1e-8;
    const GlassoSolution sol =
        glasso_masked(SymMatrix::from_dense(w), PenaltyMask::from_dense(mask_m), cfg);
    REQUIRE(sol.converged);
    const double grid =
        oracles::glasso_grid_min(sol.precision.mat(), w, mask_m, 1e-3, 2);
    CHECK(sol.objective <= grid + 1e-4);
    CHECK(grid <= sol.objective + 1e-4);
  }
}

TEST_CASE("glasso_masked warm start agrees with cold start") {
  Rng rng(99);
  const Eigen::MatrixXd w = oracles::random_spd(rng, 6, 0.5, 2.0);
  const SymMatrix W = SymMatrix::from_dense(w);
  const GlassoSolution first = glasso_masked(W, PenaltyMask::uniform_offdiag(6, 0.2));
  REQUIRE(first.converged);

  const PenaltyMask next_mask = PenaltyMask::uniform_offdiag(6, 0.1);
  const GlassoSolution cold = glasso_masked(W, next_mask);
  const GlassoSolution warm = glasso_masked(W, next_mask, GlassoConfig{}, &first);
  REQUIRE(cold.converged);
  REQUIRE(warm.converged);
  CHECK((cold.precision.mat() - warm.precision.mat()).cwiseAbs().maxCoeff() <= 1e-5);
  CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-7));
}

TEST_CASE("glasso_masked input validation and flagged non-convergence") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(1, 1) = 0.0;
  CHECK_THROWS_AS(glasso_masked(SymMatrix::from_dense(bad), PenaltyMask::zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(glasso_masked(SymMatrix::identity(3), PenaltyMask::zero(2)),
                  std::invalid_argument);

  Eigen::MatrixXd asym(2, 2);
  asym << 0.0, 0.1, 0.2, 0.0;
  CHECK_THROWS_AS(PenaltyMask::from_dense(asym), std::invalid_argument);
  Eigen::MatrixXd neg(2, 2);
  neg << 0.0, -0.1, -0.1, 0.0;
  CHECK_THROWS_AS(PenaltyMask::from_dense(neg), std::invalid_argument);

  // one sweep with a far-too-tight tolerance: flagged, still finite output
  Rng rng(5);
  const Eigen::MatrixXd w = oracles::random_spd(rng, 8, 0.3, 3.0);
  GlassoConfig cfg;
  cfg.tol = 1e-15;
  cfg.max_sweeps = 1;
  const GlassoSolution sol =
      glasso_masked(SymMatrix::from_dense(w), PenaltyMask::uniform_offdiag(8, 0.05), cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 1);
  CHECK(sol.precision.mat().allFinite());
}
