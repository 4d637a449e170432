#pragma once

// Widening by folding adjacent spatial atoms into list segments.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shape/formula/formula.hpp"
#include "shape/frontend/frontend.hpp"
#include "shape/solver/solver.hpp"

namespace shape {

/// Which field names form which list shapes. Built from the struct
/// classification of the analyzed program.
struct ShapeCatalog {
  std::set<std::string> sll_links;
  std::set<std::pair<std::string, std::string>> dll_links;  // (next, prev)
  struct Nested {
    std::string next, nested, inner;
    auto operator<=>(const Nested&) const = default;
  };
  std::set<Nested> nll_links;

  /// next for SLL, (next, prev) for DLL, (next, nested, next) for NLL.
  static ShapeCatalog defaults();
  static ShapeCatalog from(const std::map<std::string, StructKind>& kinds);
};

struct FoldOptions {
  int length_limit = 2;
  SolverOptions solver;
};

/// Folds the leftmost eligible pair of SLL-compatible atoms into one ls
/// segment, or returns nullopt.
std::optional<SymbolicHeap> try_fold_sll(const SymbolicHeap& h, const std::set<Var>& scope,
                                         const ShapeCatalog& shapes = ShapeCatalog::defaults(),
                                         const FoldOptions& opts = {});
std::optional<SymbolicHeap> try_fold_dll(const SymbolicHeap& h, const std::set<Var>& scope,
                                         const ShapeCatalog& shapes = ShapeCatalog::defaults(),
                                         const FoldOptions& opts = {});
std::optional<SymbolicHeap> try_fold_nll(const SymbolicHeap& h, const std::set<Var>& scope,
                                         const ShapeCatalog& shapes = ShapeCatalog::defaults(),
                                         const FoldOptions& opts = {});

/// Any one fold, trying SLL, then DLL, then NLL.
std::optional<SymbolicHeap> try_fold(const SymbolicHeap& h, const std::set<Var>& scope, const ShapeCatalog& shapes,
                                     const FoldOptions& opts = {});

/// Folds every member to a fixpoint, then normalizes and deduplicates.
StateSet widen(const StateSet& s, const std::set<Var>& scope,
               const ShapeCatalog& shapes = ShapeCatalog::defaults(), const FoldOptions& opts = {});

/// True iff in every model of `h` without the atoms at `removed`, `z` is nil
/// or allocated by the remaining atoms.
bool nil_or_allocated(const SymbolicHeap& h, const std::vector<std::size_t>& removed, const Var& z,
                      const SolverOptions& opts = {});

}  // namespace shape
