#pragma once

// Small heap manipulations shared by the transfer functions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shape/formula/formula.hpp"
#include "shape/solver/solver.hpp"

namespace shape::detail {

/// A variable named `<prefix><n>` that does not occur in `h`.
Var fresh_var(const SymbolicHeap& h, const std::string& prefix = "_f");

/// A points-to atom with its fields sorted by name.
PointsTo make_cell(const Var& src, std::vector<std::pair<std::string, FieldValue>> fields);

/// Normalized `h`, or nullopt when it has no model.
std::optional<SymbolicHeap> feasible(const SymbolicHeap& h, const SolverOptions& opts);

/// Index of the points-to atom whose source is `x`.
std::optional<std::size_t> cell_of(const SymbolicHeap& h, const Var& x);

/// Pointer strong update `x := v`; `v` is read before `x` changes.
SymbolicHeap assign_pointer(const SymbolicHeap& h, const Var& x, const Var& v);

/// Integer update; values outside [-range, range] are not tracked.
SymbolicHeap assign_int(const SymbolicHeap& h, const Var& x, std::optional<std::int64_t> v, int range);

/// Variables through which an atom can be reached: its source, or both ends
/// of a doubly-linked segment.
std::vector<Var> entry_points(const SpatialAtom& a);

std::optional<std::int64_t> int_value(const SymbolicHeap& h, const Var& x);

}  // namespace shape::detail
