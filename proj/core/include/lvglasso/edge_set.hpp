#pragma once

#include <set>
#include <utility>

namespace lvglasso {

// Unordered pairs (i, j) with 0 <= i < j < p: the support of a conditional
// graphical model among p observed variables. No self-loops.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(int p);

  int p() const { return p_; }
  std::size_t size() const { return edges_.size(); }

  // Order of (i, j) does not matter; self-loops and out-of-range indices are
  // rejected.
  void add(int i, int j);
  bool contains(int i, int j) const;

  const std::set<std::pair<int, int>>& pairs() const { return edges_; }

  bool operator==(const EdgeSet& other) const = default;

 private:
  int p_ = 0;
  std::set<std::pair<int, int>> edges_;
};

}  // namespace lvglasso
