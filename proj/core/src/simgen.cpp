#include "lvglasso/simgen.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

#include "lvglasso/errors.hpp"
#include "lvglasso/rng.hpp"

namespace lvglasso {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_density(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

}  // namespace

double edge_probability(double distance, int p) {
  if (distance < 0.0) throw std::invalid_argument("edge_probability: distance must be >= 0");
  if (p < 1) throw std::invalid_argument("edge_probability: p must be >= 1");
  return 2.0 * normal_density(distance * std::sqrt(static_cast<double>(p)));
}

GeometricGraph generate_graph(int p, std::uint64_t rng_seed) {
  if (p < 2) throw std::invalid_argument("generate_graph: p must be >= 2");
  GeometricGraph g;
  g.seed = rng_seed;
  g.locations.resize(p, 2);
  g.edges = EdgeSet(p);

  Rng rng(rng_seed);
  for (int i = 0; i < p; ++i) {
    g.locations(i, 0) = rng.uniform01();
    g.locations(i, 1) = rng.uniform01();
  }

  std::vector<int> degree(p, 0);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      // Saturated endpoint: skip the pair without consuming a draw.
      if (degree[i] >= kMaxDegree || degree[j] >= kMaxDegree) continue;
      const double dx = g.locations(i, 0) - g.locations(j, 0);
      const double dy = g.locations(i, 1) - g.locations(j, 1);
      const double prob = edge_probability(std::hypot(dx, dy), p);
      if (rng.uniform01() < prob) {
        g.edges.add(i, j);
        ++degree[i];
        ++degree[j];
      }
    }
  }
  return g;
}

GroundTruthModel build_precision(const GeometricGraph& graph, int h,
                                 std::uint64_t rng_seed) {
  const int p = static_cast<int>(graph.locations.rows());
  if (p < 1) throw std::invalid_argument("build_precision: empty graph");
  if (graph.edges.p() != p)
    throw std::invalid_argument("build_precision: graph and locations disagree on p");
  if (h < 0) throw std::invalid_argument("build_precision: h must be >= 0");

  GroundTruthModel model;
  model.p = p;
  model.h = h;
  model.locations = graph.locations;
  model.true_edges = graph.edges;
  model.graph_seed = graph.seed;
  model.value_seed = rng_seed;

  const Eigen::Index n = p + h;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : graph.edges.pairs()) {
    k(i, j) = 0.2;
    k(j, i) = 0.2;
  }
  // Latent rows are dense against the observables, entries in the open
  // interval (0, 0.12). Draw order: latent index outer, observed inner.
  Rng rng(rng_seed);
  for (int a = 0; a < h; ++a) {
    for (int i = 0; i < p; ++i) {
      double u;
      do {
        u = rng.uniform01();
      } while (u == 0.0);
      k(p + a, i) = 0.12 * u;
      k(i, p + a) = k(p + a, i);
    }
  }

  double diag = 1.0;
  k.diagonal().setConstant(diag);
  int attempt = 0;
  while (Eigen::LLT<Eigen::MatrixXd>(k).info() != Eigen::Success) {
    if (++attempt > 20)
      throw NumericalError(
          "build_precision: no positive definite diagonal after 20 inflations");
    diag += 0.5;
    k.diagonal().setConstant(diag);
  }
  model.diag_value = diag;
  model.K_true = SymMatrix::from_dense(k);
  return model;
}

Dataset sample_data(const GroundTruthModel& model, int n, std::uint64_t rng_seed) {
  if (n < 2) throw std::invalid_argument("sample_data: n must be >= 2");
  const int p = model.p;
  const int total = model.p + model.h;
  if (model.K_true.dim() != total)
    throw std::invalid_argument("sample_data: model K_true has the wrong dimension");

  Eigen::LLT<Eigen::MatrixXd> llt(model.K_true.mat());
  if (llt.info() != Eigen::Success)
    throw NumericalError("sample_data: K_true is not positive definite");
  const Eigen::MatrixXd cov =
      llt.solve(Eigen::MatrixXd::Identity(total, total));
  Eigen::LLT<Eigen::MatrixXd> cov_llt(0.5 * (cov + cov.transpose()));
  if (cov_llt.info() != Eigen::Success)
    throw NumericalError("sample_data: covariance Cholesky failed");
  const Eigen::MatrixXd chol = cov_llt.matrixL();

  Dataset ds;
  ds.n = n;
  ds.source_seed = rng_seed;
  ds.X.resize(n, p);
  Rng rng(rng_seed);
  Eigen::VectorXd z(total);
  for (int s = 0; s < n; ++s) {
    for (int i = 0; i < total; ++i) z(i) = rng.normal();
    ds.X.row(s) = (chol * z).head(p).transpose();
  }

  const Eigen::RowVectorXd mean = ds.X.colwise().mean();
  const Eigen::MatrixXd centered = ds.X.rowwise() - mean;
  ds.sigma_o_n =
      SymMatrix::from_dense((centered.transpose() * centered) / static_cast<double>(n));
  return ds;
}

}  // namespace lvglasso
