#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lvglasso/edge_set.hpp"
#include "lvglasso/em.hpp"
#include "lvglasso/sym_matrix.hpp"

namespace lvglasso {

inline constexpr double kDefaultZeroTol = 1e-6;

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
};

struct RocPoint {
  double lambda = 0.0;
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct RocSeries {
  std::vector<RocPoint> points;  // one per lambda, input order
  double auc = 0.0;
};

// Off-diagonal pairs with |S_ij| > zero_tol.
EdgeSet support(const SymMatrix& S, double zero_tol = kDefaultZeroTol);

// Counts over all p-choose-2 pairs. Edge sets must share p.
ConfusionCounts confusion(const EdgeSet& est, const EdgeSet& truth);

// One confusion point per (lambda, support) entry; AUC by trapezoid over the
// FPR-sorted points augmented with the (0,0) and (1,1) anchors.
RocSeries roc(const std::vector<std::pair<double, EdgeSet>>& path,
              const EdgeSet& truth);
RocSeries roc(const std::vector<EmFit>& path_fits, const EdgeSet& truth,
              double zero_tol = kDefaultZeroTol);

// Index minimizing the Hamming distance FP + FN to the truth; ties go to the
// larger lambda (the sparser model).
std::size_t closest_to_truth(const std::vector<std::pair<double, EdgeSet>>& path,
                             const EdgeSet& truth);
std::size_t closest_to_truth(const std::vector<EmFit>& path_fits,
                             const EdgeSet& truth,
                             double zero_tol = kDefaultZeroTol);

}  // namespace lvglasso
