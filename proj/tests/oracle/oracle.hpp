#pragma once

// Brute-force reference semantics used only by tests. Models are generated
// exhaustively (every location reachable from a variable, labeled in
// breadth-first discovery order) and formulas are checked by enumerating
// every assignment of their existentials. Nothing here shares code with the
// solver beyond the data types.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shape/formula/formula.hpp"
#include "shape/solver/model.hpp"

namespace shape::oracle {

enum class FieldKind { Pointer, Integer };
using Layout = std::vector<std::pair<std::string, FieldKind>>;

/// What the generated models may contain.
struct Signature {
  std::vector<Var> pointer_vars;
  std::vector<Var> int_vars;
  /// Roots not named by any stack variable (one per existential suffices).
  int anonymous_roots = 0;
  std::vector<Layout> layouts;
  std::vector<std::int64_t> int_values;
};

/// Signature covering every formula in `hs`.
Signature signature_of(const std::vector<const SymbolicHeap*>& hs);

/// Calls `visit` on every model with at most `max_size` locations until it
/// returns true. Returns true iff it did.
bool enumerate(const Signature& sig, int max_size, const std::function<bool(const HeapModel&)>& visit);

bool satisfies(const HeapModel& m, const SymbolicHeap& h);

std::optional<HeapModel> check_sat(const SymbolicHeap& h, int max_size);

struct EntailOutcome {
  bool valid = true;
  std::optional<HeapModel> counter_model;
};
EntailOutcome check_entail(const SymbolicHeap& lhs, const SymbolicHeap& rhs, int max_size);

}  // namespace shape::oracle
