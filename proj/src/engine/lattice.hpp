#pragma once

// Entailment-based pruning shared by join and the fixpoint test.

#include <map>
#include <utility>
#include <vector>

#include "shape/formula/formula.hpp"
#include "shape/solver/solver.hpp"

namespace shape::detail {

/// Memoizing entailment checks between canonical heaps.
class EntailOracle {
 public:
  explicit EntailOracle(SolverOptions opts = {}) : opts_(opts) {}
  bool entails(const SymbolicHeap& a, const SymbolicHeap& b);

 private:
  SolverOptions opts_;
  std::map<std::pair<SymbolicHeap, SymbolicHeap>, bool> memo_;
};

/// Which heaps survive pruning: a heap is dropped when a retained one with no
/// more allocated cells is entailed by it. Later heaps are dropped first.
std::vector<bool> retained(const std::vector<const SymbolicHeap*>& heaps, EntailOracle& oracle);

/// Every heap of `s` entails some heap of `t`.
bool covered(const std::vector<const SymbolicHeap*>& s, const std::vector<const SymbolicHeap*>& t,
             EntailOracle& oracle);

}  // namespace shape::detail
