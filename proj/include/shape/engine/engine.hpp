#pragma once

// Forward abstract interpretation over the CFGs of a program: transfer
// functions with materialization, join with entailment pruning, loop-head
// widening and function summaries.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shape/abstraction/abstraction.hpp"
#include "shape/cfg/cfg.hpp"
#include "shape/formula/formula.hpp"
#include "shape/frontend/ast.hpp"
#include "shape/solver/solver.hpp"

namespace shape {

enum class Property { ValidDeref, ValidFree, ValidMemtrack };
enum class Outcome { True, False, Unknown, Error };

std::string to_string(Property p);
std::string to_string(Outcome o);
std::optional<Property> parse_property(const std::string& s);
const std::vector<Property>& all_properties();

struct TraceStep {
  std::string function;
  ast::SourceLoc loc;
  std::string text;
};
using Trace = std::vector<TraceStep>;

struct Verdict {
  Property property = Property::ValidDeref;
  Outcome outcome = Outcome::True;
  /// Non-empty exactly when the outcome is False.
  Trace trace;
  std::string reason;
};

/// A violation found on one abstract path. `definite` is false when the path
/// went through a condition the domain could not evaluate.
struct Fault {
  Property property = Property::ValidDeref;
  bool definite = true;
  std::string reason;
};

struct Successor {
  SymbolicHeap heap;
  bool imprecise = false;
};

struct TransferResult {
  std::vector<Successor> next;
  std::vector<Fault> faults;
};

// ---- materialization ----

/// The case split of `h` on the location held by pointer variable `x`.
struct Materialized {
  /// Branches in which `x` is the source of a points-to atom.
  std::vector<SymbolicHeap> cells;
  /// Branches in which `x` is nil.
  std::vector<SymbolicHeap> null;
  /// Some branch has `x` pointing to freed memory.
  bool freed = false;
  /// Some branch has `x` neither nil nor allocated.
  bool dangling = false;
};

Materialized materialize(const SymbolicHeap& h, const Var& x, const SolverOptions& opts = {});

// ---- transfer ----

struct TransferContext {
  const ast::Program* program = nullptr;
  const ast::FunDef* function = nullptr;
  /// Integers are tracked exactly within [-int_range, int_range].
  int int_range = 5;
  SolverOptions solver;
};

/// Post-image of one CFG edge. Calls are not handled here.
TransferResult transfer(const TransferContext& ctx, const EdgeLabel& label, const SymbolicHeap& h);

/// Removes atoms unreachable from the free variables of `h`, reporting the
/// allocated ones as leaks. Possibly empty unreachable segments are split.
TransferResult collect_garbage(const SymbolicHeap& h, const SolverOptions& opts = {});

/// Renames `x` apart so that `h` no longer constrains it (pointers), or drops
/// its integer value.
SymbolicHeap forget(const SymbolicHeap& h, const Var& x);

// ---- join and fixpoint ----

/// Union with pruning of heaps entailed by another retained heap.
StateSet join(const StateSet& current, const StateSet& incoming, const SolverOptions& opts = {});

/// Every heap of `s` entails some heap of `t`.
bool is_fixpoint(const StateSet& s, const StateSet& t, const SolverOptions& opts = {});

// ---- summaries ----

/// Value of one call argument in the caller's heap.
struct ArgValue {
  bool pointer = true;
  Var var;  // for pointers: nil or a variable of the caller heap
  std::optional<std::int64_t> value;  // for integers, when known
};

/// A callee precondition cut out of a caller heap. The precondition mentions
/// `_p<i>` for the argument values and `_g<j>` for other caller variables
/// that point into it.
struct CallSplit {
  SymbolicHeap pre;
  SymbolicHeap frame;
  std::map<Var, Var> back;  // ghost -> caller variable
};

CallSplit split_at_call(const SymbolicHeap& h, const std::vector<ArgValue>& args);

struct Summary {
  std::string function;
  SymbolicHeap pre;
  /// Exit heaps over the ghosts and `_ret`.
  std::vector<Successor> post;
  /// Violations inside the callee with traces from its entry.
  std::vector<std::pair<Fault, Trace>> faults;
};

/// Applies a summary at a call site. Returns nullopt when the part of `h`
/// reachable from the arguments does not match the summary's precondition.
/// The callee's return value is named `_cr` in the results.
std::optional<std::vector<Successor>> apply_summary(const Summary& s, const std::vector<ArgValue>& args,
                                                    const SymbolicHeap& h);

// ---- whole-program analysis ----

struct Options {
  int int_range = 5;
  int length_limit = 2;
  bool abstraction = true;
  int loop_ceiling = 50;
  bool record_states = false;
  SolverOptions solver;
};

/// A loop head changed more often than the ceiling allows.
class LoopCeilingExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Stats {
  /// Fresh analyses per function (summary cache misses).
  std::map<std::string, int> analyses;
  /// Summary cache hits per function.
  std::map<std::string, int> summary_hits;
  /// Worklist node visits per function.
  std::map<std::string, int> node_visits;
  /// Largest number of state changes at any loop head.
  int max_loop_iterations = 0;
};

struct FunctionStates {
  std::string function;
  SymbolicHeap pre;
  std::vector<StateSet> nodes;
};

struct Report {
  /// One verdict per property, in the order of all_properties().
  std::vector<Verdict> verdicts;
  Stats stats;
  /// Per-location states of every analyzed function, when recorded.
  std::vector<FunctionStates> states;

  const Verdict& verdict(Property p) const;
};

Report analyze_program(const ast::Program& program, const Options& opts = {});

/// `{"functions": [{"name", "pre", "nodes": {"<id>": [heap, ...]}}]}`.
std::string states_to_json(const Report& r);

}  // namespace shape
