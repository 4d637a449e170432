#pragma once

// Satisfiability and entailment of symbolic heaps by finite model search.
// Every predicate instance is unfolded a bounded number of times; the
// resulting candidate models are checked directly against the semantics.

#include <functional>
#include <optional>
#include <set>

#include "shape/formula/formula.hpp"
#include "shape/solver/model.hpp"

namespace shape {

struct Bound {
  int max_locations = 0;
};

struct SolverOptions {
  /// How many cells beyond its minimum length a list predicate may unfold to.
  int unfold_slack = 2;
};

/// #points-to + #freed + sum over list atoms of (min + 2) + #free vars + 1.
Bound compute_bound(const SymbolicHeap& h);

/// Semantic check of one model against one formula.
bool satisfies(const HeapModel& m, const SymbolicHeap& h);

struct SatResult {
  bool sat = false;
  std::optional<HeapModel> model;
};

struct EntailResult {
  bool valid = false;
  std::optional<HeapModel> counter_model;
};

SatResult check_sat(const SymbolicHeap& h, const SolverOptions& opts = {});
EntailResult check_entail(const SymbolicHeap& lhs, const SymbolicHeap& rhs,
                          const SolverOptions& opts = {});

/// True iff every model of `h` assigns different locations to `a` and `b`.
bool entails_disequality(const SymbolicHeap& h, const Var& a, const Var& b,
                         const SolverOptions& opts = {});

/// Parameters of the constructive model enumeration.
struct EnumerationLimits {
  int max_locations = 0;
  int unfold_slack = 2;
  /// Pointer variables outside `h` that every model must interpret.
  std::set<Var> extra_vars;
};

/// Calls `visit` on the models of `h` within `limits` until it returns true.
/// Returns true iff some call returned true. `h` must be normalized.
bool enumerate_models(const SymbolicHeap& h, const EnumerationLimits& limits,
                      const std::function<bool(const HeapModel&)>& visit);

}  // namespace shape
