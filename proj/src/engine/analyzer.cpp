#include <algorithm>
#include <memory>

#include "heap_util.hpp"
#include "lattice.hpp"
#include "shape/engine/engine.hpp"
#include "shape/formula/ops.hpp"
#include "shape/util/overloaded.hpp"

namespace shape {

using namespace ast;

std::string to_string(Property p) {
  switch (p) {
    case Property::ValidDeref:
      return "valid-deref";
    case Property::ValidFree:
      return "valid-free";
    case Property::ValidMemtrack:
      return "valid-memtrack";
  }
  return "?";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::True:
      return "TRUE";
    case Outcome::False:
      return "FALSE";
    case Outcome::Unknown:
      return "UNKNOWN";
    case Outcome::Error:
      return "ERROR";
  }
  return "?";
}

const std::vector<Property>& all_properties() {
  static const std::vector<Property> ps{Property::ValidDeref, Property::ValidFree, Property::ValidMemtrack};
  return ps;
}

std::optional<Property> parse_property(const std::string& s) {
  for (Property p : all_properties())
    if (to_string(p) == s) return p;
  return std::nullopt;
}

const Verdict& Report::verdict(Property p) const {
  for (const auto& v : verdicts)
    if (v.property == p) return v;
  throw std::out_of_range("no verdict for " + to_string(p));
}

namespace {

struct TraceNode {
  std::shared_ptr<const TraceNode> prev;
  TraceStep step;
};
using TracePtr = std::shared_ptr<const TraceNode>;

Trace unwind(const TracePtr& t) {
  Trace out;
  for (const TraceNode* n = t.get(); n; n = n->prev.get()) out.push_back(n->step);
  std::reverse(out.begin(), out.end());
  return out;
}

struct State {
  SymbolicHeap heap;
  bool imprecise = false;
  TracePtr trace;
};

// First definite and first possible violation per property.
class FaultLog {
 public:
  void add(const Fault& f, Trace trace) {
    auto& slot = f.definite ? definite_[f.property] : maybe_[f.property];
    if (!slot) slot = std::make_pair(f, std::move(trace));
  }
  std::vector<std::pair<Fault, Trace>> entries() const {
    std::vector<std::pair<Fault, Trace>> out;
    for (Property p : all_properties()) {
      if (auto it = definite_.find(p); it != definite_.end() && it->second) out.push_back(*it->second);
      if (auto it = maybe_.find(p); it != maybe_.end() && it->second) out.push_back(*it->second);
    }
    return out;
  }

 private:
  std::map<Property, std::optional<std::pair<Fault, Trace>>> definite_, maybe_;
};

class Analyzer {
 public:
  Analyzer(const Program& p, const Options& o) : program_(p), opts_(o), oracle_(o.solver) {
    for (const auto& f : p.functions) cfgs_.emplace(f.name, build_cfg(f));
    shapes_ = ShapeCatalog::from(classify_structs(p));
    fold_.length_limit = o.length_limit;
    fold_.solver = o.solver;
  }

  Report run() {
    const FunDef* main = program_.find_function(program_.entry);
    auto summary = summarize(*main, SymbolicHeap{});
    Report r;
    for (Property p : all_properties()) {
      Verdict v;
      v.property = p;
      for (const auto& [fault, trace] : summary->faults) {
        if (fault.property != p) continue;
        if (fault.definite) {
          v.outcome = Outcome::False;
          v.trace = trace;
          v.reason = fault.reason;
          break;
        }
        v.outcome = Outcome::Unknown;
        v.reason = fault.reason;
      }
      r.verdicts.push_back(v);
    }
    r.stats = stats_;
    r.states = std::move(states_);
    return r;
  }

 private:
  std::shared_ptr<const Summary> summarize(const FunDef& f, const SymbolicHeap& pre) {
    auto key = std::make_pair(f.name, pre);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++stats_.summary_hits[f.name];
      return it->second;
    }
    ++stats_.analyses[f.name];
    auto s = std::make_shared<const Summary>(analyze_function(f, pre));
    cache_.emplace(std::move(key), s);
    return s;
  }

  bool is_pointer(const FunDef& f, const std::string& v) const {
    if (v == "_ret") return f.return_type.is_ptr();
    auto t = f.type_of(v);
    return t && t->is_ptr();
  }

  Summary analyze_function(const FunDef& f, const SymbolicHeap& pre) {
    const CFG& cfg = cfgs_.at(f.name);
    FaultLog log;

    SymbolicHeap init = pre;
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      Var p{"_p" + std::to_string(i)}, x{f.params[i].name};
      if (f.params[i].type.is_ptr())
        init.pure.push_back(Eq{p, x});
      else if (auto v = detail::int_value(pre, p))
        init.pure.push_back(IntVal{x, *v});
    }
    for (const auto& d : f.locals) {
      if (d.type.is_ptr())
        init.pure.push_back(Eq{Var::nil(), Var{d.name}});
      else
        init.pure.push_back(IntVal{Var{d.name}, 0});
    }

    std::vector<std::vector<State>> states(static_cast<std::size_t>(cfg.num_nodes));
    std::vector<int> changes(static_cast<std::size_t>(cfg.num_nodes), 0);
    std::vector<int> order(static_cast<std::size_t>(cfg.num_nodes), cfg.num_nodes);
    auto rpo = cfg.reverse_postorder();
    for (std::size_t i = 0; i < rpo.size(); ++i) order[static_cast<std::size_t>(rpo[i])] = static_cast<int>(i);
    std::set<std::pair<int, NodeId>> worklist;
    auto push = [&](NodeId n) { worklist.insert({order[static_cast<std::size_t>(n)], n}); };

    if (auto h = normalize_canonical(init)) {
      states[static_cast<std::size_t>(cfg.entry)].push_back({*h, false, nullptr});
      push(cfg.entry);
    }

    while (!worklist.empty()) {
      NodeId n = worklist.begin()->second;
      worklist.erase(worklist.begin());
      ++stats_.node_visits[f.name];
      for (const Edge* e : cfg.out_edges(n)) {
        std::vector<State> out = step(f, *e, states[static_cast<std::size_t>(n)], log);
        if (out.empty()) continue;
        auto dst = static_cast<std::size_t>(e->dst);
        auto& cur = states[dst];
        if (cfg.loop_heads.count(e->dst)) {
          std::vector<State> next = merge(cur, out);
          if (opts_.abstraction && changes[dst] > 0) next = widen_all(next);
          if (!cur.empty() && covered(next, cur)) continue;
          if (++changes[dst] > opts_.loop_ceiling)
            throw LoopCeilingExceeded("no fixpoint in " + f.name + " after " + std::to_string(opts_.loop_ceiling) +
                                      " iterations of a loop");
          stats_.max_loop_iterations = std::max(stats_.max_loop_iterations, changes[dst]);
          cur = std::move(next);
        } else {
          std::vector<State> next = merge(cur, out);
          if (same_heaps(next, cur)) continue;
          cur = std::move(next);
        }
        push(e->dst);
      }
    }

    Summary s;
    s.function = f.name;
    s.pre = pre;
    if (cfg.exit >= 0) {
      bool entry = f.name == program_.entry;
      std::vector<Successor> post;
      for (const auto& st : states[static_cast<std::size_t>(cfg.exit)]) {
        SymbolicHeap h = st.heap;
        for (const auto& d : f.params) h = forget(h, Var{d.name});
        for (const auto& d : f.locals) h = forget(h, Var{d.name});
        // Nothing outlives the entry function.
        if (entry) h = forget(h, Var{"_ret"});
        auto n = normalize(h);
        if (!n) continue;
        TransferResult gc = collect_garbage(*n, opts_.solver);
        for (const auto& fault : gc.faults) log.add({fault.property, fault.definite && !st.imprecise, fault.reason}, unwind(st.trace));
        for (auto& succ : gc.next)
          if (auto c = normalize_canonical(succ.heap)) add_unique(post, {*c, st.imprecise});
      }
      s.post = std::move(post);
    }
    s.faults = log.entries();

    if (opts_.record_states) {
      FunctionStates fs{f.name, pre, {}};
      for (const auto& node : states) {
        StateSet set;
        for (const auto& st : node) set.heaps.push_back(st.heap);
        fs.nodes.push_back(std::move(set));
      }
      states_.push_back(std::move(fs));
    }
    return s;
  }

  static void add_unique(std::vector<Successor>& v, Successor s) {
    for (auto& x : v)
      if (x.heap == s.heap) {
        x.imprecise = x.imprecise && s.imprecise;
        return;
      }
    v.push_back(std::move(s));
  }

  static bool same_heaps(const std::vector<State>& a, const std::vector<State>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!(a[i].heap == b[i].heap)) return false;
    return true;
  }

  static std::vector<const SymbolicHeap*> heaps_of(const std::vector<State>& v) {
    std::vector<const SymbolicHeap*> out;
    for (const auto& s : v) out.push_back(&s.heap);
    return out;
  }

  // Union without duplicates, then entailment pruning.
  std::vector<State> merge(const std::vector<State>& cur, const std::vector<State>& in) {
    std::vector<State> all = cur;
    for (const auto& s : in) {
      auto it = std::find_if(all.begin(), all.end(), [&](const State& t) { return t.heap == s.heap; });
      if (it == all.end())
        all.push_back(s);
      else
        it->imprecise = it->imprecise && s.imprecise;
    }
    auto keep = detail::retained(heaps_of(all), oracle_);
    std::vector<State> out;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (keep[i]) out.push_back(std::move(all[i]));
    return out;
  }

  bool covered(const std::vector<State>& s, const std::vector<State>& t) {
    return detail::covered(heaps_of(s), heaps_of(t), oracle_);
  }

  std::vector<State> widen_all(const std::vector<State>& in) {
    std::vector<State> out;
    for (const auto& s : in) {
      StateSet w = widen(StateSet{{s.heap}}, s.heap.free_vars(), shapes_, fold_);
      State t = s;
      if (!w.heaps.empty()) t.heap = w.heaps[0];
      out.push_back(std::move(t));
    }
    return merge({}, out);
  }

  // ---- edges ----

  std::vector<State> step(const FunDef& f, const Edge& e, const std::vector<State>& in, FaultLog& log) {
    std::vector<State> out;
    TraceStep here{f.name, e.label.loc, to_string(e.label)};
    for (const auto& s : in) {
      auto trace = std::make_shared<const TraceNode>(TraceNode{s.trace, here});
      TransferResult r = call_of(e.label) ? call(f, e.label, s, trace, log) : cached_transfer(f, e, s.heap);
      for (const auto& fault : r.faults)
        log.add({fault.property, fault.definite && !s.imprecise, fault.reason}, unwind(trace));
      for (auto& succ : r.next) out.push_back({std::move(succ.heap), s.imprecise || succ.imprecise, trace});
    }
    return merge({}, out);
  }

  static const CallRhs* call_rhs(const EdgeLabel& l) {
    if (l.kind != EdgeLabel::Stmt) return nullptr;
    if (const auto* a = std::get_if<VarAssign>(&l.stmt.node)) return std::get_if<CallRhs>(&a->rhs);
    return nullptr;
  }

  static bool call_of(const EdgeLabel& l) {
    return call_rhs(l) || (l.kind == EdgeLabel::Stmt && std::holds_alternative<CallStmt>(l.stmt.node));
  }

  // Transfer followed by garbage collection, memoized per edge and heap.
  TransferResult cached_transfer(const FunDef& f, const Edge& e, const SymbolicHeap& h) {
    auto key = std::make_pair(&e, h);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    TransferContext ctx{&program_, &f, opts_.int_range, opts_.solver};
    TransferResult r = transfer(ctx, e.label, h);
    TransferResult out = finish(std::move(r));
    memo_.emplace(std::move(key), out);
    return out;
  }

  // Garbage collection and canonical naming of transfer results.
  TransferResult finish(TransferResult r) {
    TransferResult out;
    out.faults = std::move(r.faults);
    for (const auto& succ : r.next) {
      TransferResult gc = collect_garbage(succ.heap, opts_.solver);
      out.faults.insert(out.faults.end(), gc.faults.begin(), gc.faults.end());
      for (const auto& g : gc.next)
        if (auto c = normalize_canonical(g.heap)) out.next.push_back({std::move(*c), succ.imprecise});
    }
    return out;
  }

  TransferResult call(const FunDef& f, const EdgeLabel& l, const State& s, const TracePtr& trace, FaultLog& log) {
    std::string fn;
    std::vector<Operand> operands;
    std::optional<std::string> target;
    if (const auto* c = call_rhs(l)) {
      fn = c->fn;
      operands = c->args;
      target = std::get<VarAssign>(l.stmt.node).var;
    } else {
      const auto& stmt = std::get<CallStmt>(l.stmt.node);
      fn = stmt.fn;
      operands = stmt.args;
    }
    const FunDef& g = *program_.find_function(fn);
    const SymbolicHeap& h = s.heap;
    std::vector<ArgValue> args;
    for (std::size_t i = 0; i < operands.size(); ++i) {
      const Operand& o = operands[i];
      ArgValue a;
      a.pointer = g.params[i].type.is_ptr();
      if (a.pointer)
        a.var = o.kind == Operand::Null ? Var::nil() : representative(h, Var{o.name});
      else
        a.value = o.kind == Operand::Int ? std::optional<std::int64_t>(o.value) : detail::int_value(h, Var{o.name});
      args.push_back(a);
    }
    auto summary = summarize(g, split_at_call(h, args).pre);
    Trace prefix = unwind(trace);
    for (const auto& [fault, inner] : summary->faults) {
      Trace t = prefix;
      t.insert(t.end(), inner.begin(), inner.end());
      log.add({fault.property, fault.definite && !s.imprecise, fault.reason}, std::move(t));
    }
    auto results = apply_summary(*summary, args, h);
    if (!results) throw std::logic_error("summary of " + fn + " does not match its own call site");
    TransferResult r;
    Var ret{"_cr"};
    for (auto& succ : *results) {
      SymbolicHeap post = succ.heap;
      if (target) {
        Var x{*target};
        if (is_pointer(f, *target))
          post = detail::assign_pointer(post, x, ret);
        else
          post = detail::assign_int(post, x, detail::int_value(post, ret), opts_.int_range);
      }
      post = forget(post, ret);
      if (auto n = normalize(post)) r.next.push_back({std::move(*n), succ.imprecise});
    }
    return finish(std::move(r));
  }

  const Program& program_;
  Options opts_;
  std::map<std::string, CFG> cfgs_;
  ShapeCatalog shapes_;
  FoldOptions fold_;
  detail::EntailOracle oracle_;
  std::map<std::pair<std::string, SymbolicHeap>, std::shared_ptr<const Summary>> cache_;
  std::map<std::pair<const Edge*, SymbolicHeap>, TransferResult> memo_;
  Stats stats_;
  std::vector<FunctionStates> states_;
};

}  // namespace

Report analyze_program(const Program& program, const Options& opts) { return Analyzer(program, opts).run(); }

}  // namespace shape
