#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "lvglasso/edge_set.hpp"
#include "lvglasso/sym_matrix.hpp"

namespace lvglasso {

// No vertex may exceed this degree in the generated conditional graph.
inline constexpr int kMaxDegree = 4;

struct GeometricGraph {
  Eigen::Matrix<double, Eigen::Dynamic, 2> locations;  // p points in [0,1]^2
  EdgeSet edges;
  std::uint64_t seed = 0;
};

// True model: conditional graph among the p observed variables plus h latent
// variables wired to every observable.
struct GroundTruthModel {
  int p = 0;
  int h = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> locations;
  EdgeSet true_edges;       // conditional graph of the observables
  SymMatrix K_true;         // (p+h) x (p+h), positive definite
  double diag_value = 1.0;  // shared diagonal, inflated if needed for PD
  std::uint64_t graph_seed = 0;
  std::uint64_t value_seed = 0;
};

struct Dataset {
  Eigen::MatrixXd X;    // n x p observed samples
  SymMatrix sigma_o_n;  // (1/n) X_c' X_c with X_c column-centered
  int n = 0;
  std::uint64_t source_seed = 0;
};

// 2 phi(distance * sqrt(p)) with phi the standard normal density; always
// below 1 since 2 phi(0) ~ 0.798.
double edge_probability(double distance, int p);

// p uniform locations in the unit square; each pair (i, j), visited in
// ascending lexicographic order, gets an edge with probability
// edge_probability(d, p) where d is the Euclidean distance. Pairs with a
// saturated endpoint (degree 4) are skipped without consuming a draw.
GeometricGraph generate_graph(int p, std::uint64_t rng_seed);

// Fills observed-observed edges with 0.2, latent-observed entries with
// Uniform(0, 0.12) draws, leaves latent-latent off-diagonals zero, and sets
// the diagonal to 1, raising it by 0.5 (at most 20 times) until Cholesky
// passes.
GroundTruthModel build_precision(const GeometricGraph& graph, int h,
                                 std::uint64_t rng_seed);

// n i.i.d. draws from N(0, K_true^-1) via Cholesky of the covariance; only
// the p observed coordinates are kept. sigma_o_n uses divisor n after
// column centering.
Dataset sample_data(const GroundTruthModel& model, int n, std::uint64_t rng_seed);

}  // namespace lvglasso
