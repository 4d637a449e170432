#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "shape/formula/formula.hpp"

namespace shape {

/// Syntactic simplification: collapses equality classes onto one
/// representative (nil, then program variables, then existentials), drops
/// unused existentials, duplicate and trivial pure atoms, and empty list
/// segments. Returns nullopt when the heap is syntactically contradictory
/// (e.g. both `a = b` and `a != b`), which marks an infeasible branch.
std::optional<SymbolicHeap> normalize(const SymbolicHeap& h);

/// Replaces every occurrence of `from` by `to`. `from` must not be nil.
/// If `from` was existential it leaves the binder set; `to` keeps its kind.
SymbolicHeap substitute(const SymbolicHeap& h, const Var& from, const Var& to);

/// Simultaneous renaming. Binders are renamed along with their uses.
SymbolicHeap rename(const SymbolicHeap& h, const std::map<Var, Var>& renaming);

/// Lower bound on the number of allocated cells in any model.
int alloc_count(const SymbolicHeap& h);

/// Renames existentials to `_e0, _e1, ...` in an order that depends only on
/// the shape of the formula, then sorts atoms. Used to deduplicate states that
/// differ only in the names of their existentials.
SymbolicHeap canonicalize(const SymbolicHeap& h);

/// normalize() followed by canonicalize().
std::optional<SymbolicHeap> normalize_canonical(const SymbolicHeap& h);

/// The representative of `v` in a normalized heap: `v` itself unless the
/// heap records `Eq(rep, v)`.
Var representative(const SymbolicHeap& h, const Var& v);

// ---- textual syntax ----

class FormulaSyntaxError : public std::runtime_error {
 public:
  FormulaSyntaxError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses e.g. `E y z . x != nil & x -> (next: y) * ls(1+; y, nil) * freed(z)`.
SymbolicHeap parse_formula(const std::string& text);

struct Entailment {
  SymbolicHeap lhs, rhs;
};

/// Parses `lhs |- rhs`.
Entailment parse_entailment(const std::string& text);

std::string to_string(const SymbolicHeap& h);
std::string to_string(const PureAtom& a);
std::string to_string(const SpatialAtom& a);
std::string to_string(const FieldValue& v);

}  // namespace shape
