#include "lvglasso/eval.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lvglasso {

EdgeSet::EdgeSet(int p) : p_(p) {
  if (p < 0) throw std::invalid_argument("EdgeSet: p must be >= 0");
}

void EdgeSet::add(int i, int j) {
  if (i == j) throw std::invalid_argument("EdgeSet: self-loops are not allowed");
  if (i < 0 || j < 0 || i >= p_ || j >= p_) {
    std::ostringstream msg;
    msg << "EdgeSet: edge (" << i << "," << j << ") out of range for p=" << p_;
    throw std::invalid_argument(msg.str());
  }
  edges_.insert({std::min(i, j), std::max(i, j)});
}

bool EdgeSet::contains(int i, int j) const {
  if (i == j) return false;
  return edges_.count({std::min(i, j), std::max(i, j)}) > 0;
}

EdgeSet support(const SymMatrix& S, double zero_tol) {
  if (zero_tol < 0.0) throw std::invalid_argument("support: zero_tol must be >= 0");
  const int p = static_cast<int>(S.dim());
  EdgeSet es(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (std::abs(S(i, j)) > zero_tol) es.add(i, j);
  return es;
}

ConfusionCounts confusion(const EdgeSet& est, const EdgeSet& truth) {
  if (est.p() != truth.p()) {
    std::ostringstream msg;
    msg << "confusion: edge sets disagree on p (" << est.p() << " vs " << truth.p() << ")";
    throw std::invalid_argument(msg.str());
  }
  ConfusionCounts c;
  const int p = truth.p();
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const bool e = est.contains(i, j);
      const bool t = truth.contains(i, j);
      if (e && t)
        ++c.tp;
      else if (e)
        ++c.fp;
      else if (t)
        ++c.fn;
      else
        ++c.tn;
    }
  }
  return c;
}

namespace {

double trapezoid_auc(std::vector<std::pair<double, double>> pts) {
  pts.emplace_back(0.0, 0.0);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  double auc = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const auto& [x0, y0] = pts[k - 1];
    const auto& [x1, y1] = pts[k];
    auc += (x1 - x0) * 0.5 * (y0 + y1);
  }
  return auc;
}

}  // namespace

RocSeries roc(const std::vector<std::pair<double, EdgeSet>>& path,
              const EdgeSet& truth) {
  if (path.empty()) throw std::invalid_argument("roc: empty path");
  RocSeries series;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(path.size());
  for (const auto& [lambda, est] : path) {
    const ConfusionCounts c = confusion(est, truth);
    RocPoint pt;
    pt.lambda = lambda;
    pt.tp = c.tp;
    pt.fp = c.fp;
    pt.tn = c.tn;
    pt.fn = c.fn;
    const long pos = c.tp + c.fn;
    const long neg = c.fp + c.tn;
    // Degenerate truths (no edges, or all edges) score vacuous success.
    pt.tpr = pos > 0 ? static_cast<double>(c.tp) / static_cast<double>(pos) : 1.0;
    pt.fpr = neg > 0 ? static_cast<double>(c.fp) / static_cast<double>(neg) : 0.0;
    pts.emplace_back(pt.fpr, pt.tpr);
    series.points.push_back(pt);
  }
  series.auc = trapezoid_auc(std::move(pts));
  return series;
}

RocSeries roc(const std::vector<EmFit>& path_fits, const EdgeSet& truth,
              double zero_tol) {
  std::vector<std::pair<double, EdgeSet>> path;
  path.reserve(path_fits.size());
  for (const EmFit& f : path_fits)
    path.emplace_back(f.lambda, support(f.S_hat, zero_tol));
  return roc(path, truth);
}

std::size_t closest_to_truth(const std::vector<std::pair<double, EdgeSet>>& path,
                             const EdgeSet& truth) {
  if (path.empty()) throw std::invalid_argument("closest_to_truth: empty path");
  std::size_t best = 0;
  long best_dist = std::numeric_limits<long>::max();
  double best_lambda = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < path.size(); ++idx) {
    const ConfusionCounts c = confusion(path[idx].second, truth);
    const long dist = c.fp + c.fn;
    const double lambda = path[idx].first;
    if (dist < best_dist || (dist == best_dist && lambda > best_lambda)) {
      best = idx;
      best_dist = dist;
      best_lambda = lambda;
    }
  }
  return best;
}

std::size_t closest_to_truth(const std::vector<EmFit>& path_fits,
                             const EdgeSet& truth, double zero_tol) {
  std::vector<std::pair<double, EdgeSet>> path;
  path.reserve(path_fits.size());
  for (const EmFit& f : path_fits)
    path.emplace_back(f.lambda, support(f.S_hat, zero_tol));
  return closest_to_truth(path, truth);
}

}  // namespace lvglasso
