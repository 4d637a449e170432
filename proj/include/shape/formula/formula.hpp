#pragma once

// Symbolic heaps: existentially quantified separating conjunctions of pure
// and spatial atoms. These are the elements of the abstract domain.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace shape {

/// A logical variable. The distinguished variable `nil` is never allocated.
/// Whether a variable is existential is decided by the binder set of the
/// heap it occurs in, see SymbolicHeap::kind_of.
struct Var {
  std::string name;

  Var() = default;
  Var(std::string n) : name(std::move(n)) {}
  Var(const char* n) : name(n) {}

  static Var nil() { return Var{"nil"}; }
  bool is_nil() const { return name == "nil"; }

  auto operator<=>(const Var&) const = default;
  bool operator==(const Var&) const = default;
};

enum class VarKind { Program, Existential, Nil };

/// Value of an integer field whose content is not tracked.
struct UnknownInt {
  auto operator<=>(const UnknownInt&) const = default;
  bool operator==(const UnknownInt&) const = default;
};

using FieldValue = std::variant<Var, std::int64_t, UnknownInt>;

// ---- pure atoms ----

struct Eq {
  Var a, b;
  auto operator<=>(const Eq&) const = default;
  bool operator==(const Eq&) const = default;
};

struct Neq {
  Var a, b;
  auto operator<=>(const Neq&) const = default;
  bool operator==(const Neq&) const = default;
};

/// Integer variable `x` holds exactly `value`.
struct IntVal {
  Var x;
  std::int64_t value = 0;
  auto operator<=>(const IntVal&) const = default;
  bool operator==(const IntVal&) const = default;
};

using PureAtom = std::variant<Eq, Neq, IntVal>;

// ---- spatial atoms ----

/// One heap cell. `fields` is kept sorted by field name.
struct PointsTo {
  Var src;
  std::vector<std::pair<std::string, FieldValue>> fields;

  const FieldValue* field(const std::string& f) const;
  FieldValue* field(const std::string& f);

  auto operator<=>(const PointsTo&) const = default;
  bool operator==(const PointsTo&) const = default;
};

/// Acyclic singly-linked segment of at least `min` cells from `src` to `dst`
/// through the pointer field `link`.
struct Ls {
  int min = 0;
  Var src, dst;
  std::string link = "next";
  auto operator<=>(const Ls&) const = default;
  bool operator==(const Ls&) const = default;
};

/// Acyclic doubly-linked segment.
struct Dls {
  int min = 0;
  Var first, last, prev_of_first, next_of_last;
  std::string next = "next";
  std::string prev = "prev";
  auto operator<=>(const Dls&) const = default;
  bool operator==(const Dls&) const = default;
};

/// Acyclic nested list segment: a top-level chain through `next` whose
/// cells each hold, in `nested`, the head of an inner singly-linked list
/// (linked through `inner`) ending at `sink`.
struct Nls {
  int min = 0;
  Var src, dst, sink;
  std::string next = "next";
  std::string nested = "nested";
  std::string inner = "next";
  auto operator<=>(const Nls&) const = default;
  bool operator==(const Nls&) const = default;
};

/// A freed cell that is still referenced. Carries identity only.
struct Freed {
  Var loc;
  auto operator<=>(const Freed&) const = default;
  bool operator==(const Freed&) const = default;
};

using SpatialAtom = std::variant<PointsTo, Ls, Dls, Nls, Freed>;

struct SymbolicHeap {
  std::set<Var> existentials;
  std::vector<PureAtom> pure;
  std::vector<SpatialAtom> spatial;

  VarKind kind_of(const Var& v) const;
  bool is_existential(const Var& v) const { return existentials.count(v) > 0; }

  /// Every variable occurring in an atom (nil included if it occurs).
  std::set<Var> vars() const;
  /// Occurring variables that are neither existential nor nil.
  std::set<Var> free_vars() const;

  bool empty_spatial() const { return spatial.empty(); }

  auto operator<=>(const SymbolicHeap&) const = default;
  bool operator==(const SymbolicHeap&) const = default;
};

/// A disjunction of symbolic heaps.
struct StateSet {
  std::vector<SymbolicHeap> heaps;

  /// Inserts `h` unless a syntactically identical heap is present.
  bool insert(SymbolicHeap h);
  bool contains(const SymbolicHeap& h) const;
  std::size_t size() const { return heaps.size(); }
  bool empty() const { return heaps.empty(); }

  bool operator==(const StateSet&) const = default;
};

// ---- variable helpers over atoms ----

void collect_vars(const PureAtom& a, std::set<Var>& out);
void collect_vars(const SpatialAtom& a, std::set<Var>& out);
void collect_vars(const FieldValue& v, std::set<Var>& out);
bool mentions(const PureAtom& a, const Var& v);
bool mentions(const SpatialAtom& a, const Var& v);

/// Minimum number of cells the atom allocates (Freed counts 0).
int min_cells(const SpatialAtom& a);
/// True for list predicates, i.e. Ls, Dls and Nls.
bool is_list_atom(const SpatialAtom& a);

}  // namespace shape
