#include <algorithm>

#include "heap_util.hpp"
#include "shape/engine/engine.hpp"
#include "shape/formula/ops.hpp"
#include "shape/util/overloaded.hpp"

namespace shape {

using namespace ast;
using detail::assign_int;
using detail::assign_pointer;
using detail::cell_of;
using detail::int_value;

namespace {

class Transfer {
 public:
  Transfer(const TransferContext& ctx, const SymbolicHeap& h) : ctx_(ctx), h_(h) {}

  TransferResult edge(const EdgeLabel& l) {
    switch (l.kind) {
      case EdgeLabel::Assume:
        assume(l.cond);
        break;
      case EdgeLabel::AssumeNot:
        assume(negate(l.cond));
        break;
      case EdgeLabel::Stmt:
        stmt(l.stmt);
        break;
    }
    return std::move(out_);
  }

 private:
  static Cond negate(Cond c) {
    switch (c.op) {
      case Cond::Eq:
        c.op = Cond::Neq;
        break;
      case Cond::Neq:
        c.op = Cond::Eq;
        break;
      case Cond::Lt:  // !(a < b) is b <= a
        std::swap(c.a, c.b);
        c.op = Cond::Leq;
        break;
      case Cond::Leq:
        std::swap(c.a, c.b);
        c.op = Cond::Lt;
        break;
      case Cond::Nondet:
        break;
    }
    return c;
  }

  bool is_int(const Operand& o) const {
    if (o.kind == Operand::Int) return true;
    if (o.kind == Operand::Null) return false;
    return type_of(o.name).kind == Type::Int;
  }

  Type type_of(const std::string& v) const {
    if (v == "_ret") return ctx_.function->return_type;
    auto t = ctx_.function->type_of(v);
    if (!t) throw std::logic_error("unknown variable " + v);
    return *t;
  }

  static Var pointer(const SymbolicHeap& h, const Operand& o) {
    return o.kind == Operand::Null ? Var::nil() : representative(h, Var{o.name});
  }

  static std::optional<std::int64_t> integer(const SymbolicHeap& h, const Operand& o) {
    if (o.kind == Operand::Int) return o.value;
    return int_value(h, Var{o.name});
  }

  void emit(const SymbolicHeap& h, bool imprecise = false) {
    if (auto n = normalize(h)) out_.next.push_back({std::move(*n), imprecise});
  }

  void fault(Property p, std::string reason) { out_.faults.push_back({p, true, std::move(reason)}); }

  void assume(const Cond& c) {
    if (c.op == Cond::Nondet) return emit(h_);
    if (is_int(c.a) || is_int(c.b)) {
      auto a = integer(h_, c.a), b = integer(h_, c.b);
      if (!a || !b) return emit(h_, true);
      bool holds = c.op == Cond::Eq ? *a == *b : c.op == Cond::Neq ? *a != *b : c.op == Cond::Lt ? *a < *b : *a <= *b;
      if (holds) emit(h_);
      return;
    }
    SymbolicHeap r = h_;
    Var a = pointer(h_, c.a), b = pointer(h_, c.b);
    if (c.op == Cond::Eq)
      r.pure.push_back(Eq{a, b});
    else
      r.pure.push_back(Neq{a, b});
    if (auto f = detail::feasible(r, ctx_.solver)) out_.next.push_back({std::move(*f), false});
  }

  // Branches in which `v` is allocated; reports the others as faults.
  std::vector<SymbolicHeap> deref(const std::string& v) {
    Materialized m = materialize(h_, Var{v}, ctx_.solver);
    if (!m.null.empty()) fault(Property::ValidDeref, "null pointer dereference of '" + v + "'");
    if (m.freed) fault(Property::ValidDeref, "use of '" + v + "' after free");
    if (m.dangling) fault(Property::ValidDeref, "dereference of unallocated pointer '" + v + "'");
    return m.cells;
  }

  void stmt(const Stmt& s) {
    std::visit(overloaded{
                   [&](const VarAssign& a) { assign(a); },
                   [&](const FieldStore& st) { store(st); },
                   [&](const Free& f) { free(f.var); },
                   [&](const Return& r) {
                     if (!r.value) return emit(h_);
                     Var ret{"_ret"};
                     if (is_int(*r.value))
                       emit(assign_int(h_, ret, integer(h_, *r.value), ctx_.int_range));
                     else
                       emit(assign_pointer(h_, ret, pointer(h_, *r.value)));
                   },
                   [&](const IntOp& op) {
                     // Exact in the integers; only the stored result is range-checked.
                     auto v = integer(h_, op.first);
                     for (const auto& [c, b] : op.rest) {
                       auto w = integer(h_, b);
                       v = v && w ? std::optional<std::int64_t>(c == '+' ? *v + *w : *v - *w) : std::nullopt;
                     }
                     emit(assign_int(h_, Var{op.var}, v, ctx_.int_range));
                   },
                   [&](const CallStmt&) { throw std::logic_error("calls are handled by the analyzer"); },
                   [&](const If&) { throw std::logic_error("branch statement on a CFG edge"); },
                   [&](const While&) { throw std::logic_error("branch statement on a CFG edge"); },
               },
               s.node);
  }

  void assign(const VarAssign& a) {
    Var x{a.var};
    bool int_target = type_of(a.var).kind == Type::Int;
    std::visit(overloaded{
                   [&](const NullRhs&) { emit(assign_pointer(h_, x, Var::nil())); },
                   [&](const VarRhs& v) {
                     if (int_target)
                       emit(assign_int(h_, x, int_value(h_, Var{v.name}), ctx_.int_range));
                     else
                       emit(assign_pointer(h_, x, representative(h_, Var{v.name})));
                   },
                   [&](const IntRhs& i) { emit(assign_int(h_, x, i.value, ctx_.int_range)); },
                   [&](const NondetRhs&) { emit(assign_int(h_, x, std::nullopt, ctx_.int_range)); },
                   [&](const LoadRhs& l) { load(x, int_target, l); },
                   [&](const MallocRhs& m) { malloc(x, m.struct_name); },
                   [&](const CallRhs&) { throw std::logic_error("calls are handled by the analyzer"); },
               },
               a.rhs);
  }

  void load(const Var& x, bool int_target, const LoadRhs& l) {
    for (const auto& h : deref(l.var)) {
      const auto& cell = std::get<PointsTo>(h.spatial[*cell_of(h, representative(h, Var{l.var}))]);
      const FieldValue* v = cell.field(l.field);
      if (!v) throw std::logic_error("cell of '" + l.var + "' has no field '" + l.field + "'");
      if (int_target) {
        const auto* i = std::get_if<std::int64_t>(v);
        emit(assign_int(h, x, i ? std::optional<std::int64_t>(*i) : std::nullopt, ctx_.int_range));
      } else {
        emit(assign_pointer(h, x, std::get<Var>(*v)));
      }
    }
  }

  void store(const FieldStore& st) {
    for (auto h : deref(st.var)) {
      auto& cell = std::get<PointsTo>(h.spatial[*cell_of(h, representative(h, Var{st.var}))]);
      FieldValue* slot = cell.field(st.field);
      if (!slot) throw std::logic_error("cell of '" + st.var + "' has no field '" + st.field + "'");
      if (is_int(st.value)) {
        auto v = integer(h, st.value);
        if (v && *v >= -ctx_.int_range && *v <= ctx_.int_range)
          *slot = *v;
        else
          *slot = UnknownInt{};
      } else {
        *slot = pointer(h, st.value);
      }
      emit(h);
    }
  }

  void free(const std::string& v) {
    Materialized m = materialize(h_, Var{v}, ctx_.solver);
    for (const auto& h : m.null) emit(h);
    if (m.freed) fault(Property::ValidFree, "double free of '" + v + "'");
    if (m.dangling) fault(Property::ValidFree, "free of unallocated pointer '" + v + "'");
    for (auto h : m.cells) {
      std::size_t i = *cell_of(h, representative(h, Var{v}));
      h.spatial[i] = Freed{std::get<PointsTo>(h.spatial[i]).src};
      emit(h);
    }
  }

  void malloc(const Var& x, const std::string& struct_name) {
    const StructDef* s = ctx_.program->find_struct(struct_name);
    if (!s) throw std::logic_error("unknown struct " + struct_name);
    SymbolicHeap r = forget(h_, x);
    std::vector<std::pair<std::string, FieldValue>> fields;
    for (const auto& f : s->fields) {
      if (f.type.is_ptr()) {
        Var v = detail::fresh_var(r);
        r.existentials.insert(v);
        fields.emplace_back(f.name, v);
      } else {
        fields.emplace_back(f.name, UnknownInt{});
      }
    }
    r.spatial.push_back(detail::make_cell(x, std::move(fields)));
    emit(r);
  }

  const TransferContext& ctx_;
  const SymbolicHeap& h_;
  TransferResult out_;
};

// Heap `h` with atom `i` forced empty.
std::optional<SymbolicHeap> empty_branch(const SymbolicHeap& h, std::size_t i) {
  SymbolicHeap r = h;
  std::visit(overloaded{
                 [&](const Ls& l) { r.pure.push_back(Eq{l.src, l.dst}); },
                 [&](const Dls& d) {
                   r.pure.push_back(Eq{d.first, d.next_of_last});
                   r.pure.push_back(Eq{d.last, d.prev_of_first});
                 },
                 [&](const Nls& n) { r.pure.push_back(Eq{n.src, n.dst}); },
                 [](const auto&) {},
             },
             h.spatial[i]);
  r.spatial.erase(r.spatial.begin() + static_cast<std::ptrdiff_t>(i));
  return normalize(r);
}

// Disequalities on existentials that no spatial atom mentions constrain
// nothing: such a variable can always be chosen fresh.
SymbolicHeap drop_dead_existentials(SymbolicHeap h) {
  std::set<Var> spatial;
  for (const auto& a : h.spatial) collect_vars(a, spatial);
  std::set<Var> dead;
  for (const auto& e : h.existentials)
    if (!spatial.count(e)) dead.insert(e);
  if (dead.empty()) return h;
  std::erase_if(h.pure, [&](const PureAtom& a) {
    const auto* n = std::get_if<Neq>(&a);
    return n && (dead.count(n->a) || dead.count(n->b));
  });
  return normalize(h).value_or(h);
}

void collect(const SymbolicHeap& h, const SolverOptions& opts, TransferResult& out) {
  std::set<Var> reached;
  for (const auto& v : h.free_vars()) reached.insert(v);
  std::vector<bool> live(h.spatial.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& a : h.pure)
      if (const auto* e = std::get_if<Eq>(&a))
        if (reached.count(e->a) != reached.count(e->b)) {
          reached.insert(e->a), reached.insert(e->b);
          changed = true;
        }
    for (std::size_t i = 0; i < h.spatial.size(); ++i) {
      if (live[i]) continue;
      auto entries = detail::entry_points(h.spatial[i]);
      if (std::none_of(entries.begin(), entries.end(), [&](const Var& v) { return reached.count(v) > 0; })) continue;
      live[i] = true;
      changed = true;
      collect_vars(h.spatial[i], reached);
    }
  }
  for (std::size_t i = 0; i < h.spatial.size(); ++i) {
    if (live[i]) continue;
    const SpatialAtom& a = h.spatial[i];
    SymbolicHeap rest = h;
    rest.spatial.erase(rest.spatial.begin() + static_cast<std::ptrdiff_t>(i));
    if (std::holds_alternative<Freed>(a)) {
      if (auto n = normalize(rest)) collect(*n, opts, out);
      return;
    }
    if (min_cells(a) == 0) {
      if (auto e = empty_branch(h, i)) collect(*e, opts, out);
      // The nonempty case leaks only if it is possible at all.
      SymbolicHeap nonempty = h;
      std::visit(overloaded{[](Ls& l) { l.min = 1; }, [](Dls& d) { d.min = 1; }, [](Nls& n) { n.min = 1; },
                            [](auto&) {}},
                 nonempty.spatial[i]);
      if (!detail::feasible(nonempty, opts)) return;
    }
    out.faults.push_back({Property::ValidMemtrack, true, "memory leak: " + to_string(a) + " is unreachable"});
    if (auto n = normalize(rest)) collect(*n, opts, out);
    return;
  }
  out.next.push_back({drop_dead_existentials(h), false});
}

}  // namespace

TransferResult transfer(const TransferContext& ctx, const EdgeLabel& label, const SymbolicHeap& h) {
  return Transfer(ctx, h).edge(label);
}

TransferResult collect_garbage(const SymbolicHeap& h, const SolverOptions& opts) {
  TransferResult out;
  collect(h, opts, out);
  // The leaking branch of a split segment often ends where the empty one does.
  std::vector<Successor> unique;
  for (auto& s : out.next)
    if (std::none_of(unique.begin(), unique.end(), [&](const Successor& u) { return u.heap == s.heap; }))
      unique.push_back(std::move(s));
  out.next = std::move(unique);
  return out;
}

}  // namespace shape
