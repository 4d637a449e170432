#include <algorithm>

#include "heap_util.hpp"
#include "shape/engine/engine.hpp"
#include "shape/formula/ops.hpp"

namespace shape {

CallSplit split_at_call(const SymbolicHeap& h, const std::vector<ArgValue>& args) {
  // Atoms reachable from the pointer arguments form the precondition.
  std::set<Var> reached;
  for (const auto& a : args)
    if (a.pointer && !a.var.is_nil()) reached.insert(a.var);
  std::vector<bool> in_pre(h.spatial.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < h.spatial.size(); ++i) {
      if (in_pre[i]) continue;
      auto entries = detail::entry_points(h.spatial[i]);
      if (std::none_of(entries.begin(), entries.end(), [&](const Var& v) { return reached.count(v) > 0; })) continue;
      in_pre[i] = changed = true;
      collect_vars(h.spatial[i], reached);
    }
  }

  CallSplit out;
  SymbolicHeap pre;
  std::set<Var> pre_vars, frame_vars;
  for (std::size_t i = 0; i < h.spatial.size(); ++i) {
    (in_pre[i] ? pre.spatial : out.frame.spatial).push_back(h.spatial[i]);
    collect_vars(h.spatial[i], in_pre[i] ? pre_vars : frame_vars);
  }
  out.frame.pure = h.pure;
  out.frame.existentials = h.existentials;

  // Argument values become _p<i>; other variables the caller can still see
  // become _g<j>. Existentials private to the precondition stay bound.
  std::map<Var, Var> to_ghost;
  for (std::size_t i = 0; i < args.size(); ++i) {
    Var p{"_p" + std::to_string(i)};
    if (!args[i].pointer) {
      if (args[i].value) pre.pure.push_back(IntVal{p, *args[i].value});
      continue;
    }
    out.back[p] = args[i].var;
    if (args[i].var.is_nil()) {
      pre.pure.push_back(Eq{Var::nil(), p});
    } else if (auto it = to_ghost.find(args[i].var); it != to_ghost.end()) {
      pre.pure.push_back(Eq{it->second, p});
    } else {
      to_ghost[args[i].var] = p;
    }
  }
  int g = 0;
  for (const auto& v : pre_vars) {
    if (v.is_nil() || to_ghost.count(v)) continue;
    if (h.is_existential(v) && !frame_vars.count(v)) {
      pre.existentials.insert(v);
      continue;
    }
    Var ghost{"_g" + std::to_string(g++)};
    to_ghost[v] = ghost;
    out.back[ghost] = v;
  }
  std::erase_if(out.frame.pure, [&](const PureAtom& a) {
    for (const auto& e : pre.existentials)
      if (mentions(a, e)) return true;
    return false;
  });
  for (const auto& e : pre.existentials) out.frame.existentials.erase(e);
  for (const auto& a : h.pure) {
    const auto* n = std::get_if<Neq>(&a);
    if (!n) continue;
    auto known = [&](const Var& v) { return v.is_nil() || pre_vars.count(v); };
    if (known(n->a) && known(n->b)) pre.pure.push_back(a);
  }
  pre = rename(pre, to_ghost);
  out.pre = normalize_canonical(pre).value_or(pre);
  return out;
}

std::optional<std::vector<Successor>> apply_summary(const Summary& s, const std::vector<ArgValue>& args,
                                                    const SymbolicHeap& h) {
  CallSplit split = split_at_call(h, args);
  if (split.pre != s.pre) return std::nullopt;
  std::vector<Successor> out;
  for (const auto& [post, imprecise] : s.post) {
    std::map<Var, Var> renaming = split.back;
    renaming[Var{"_ret"}] = Var{"_cr"};
    SymbolicHeap avoid = h;
    for (const auto& e : post.existentials) {
      Var f = detail::fresh_var(avoid, "_c");
      avoid.existentials.insert(f);
      renaming[e] = f;
    }
    SymbolicHeap p = post;
    // Integer arguments are passed by value; their ghosts mean nothing here.
    std::erase_if(p.pure, [&](const PureAtom& a) {
      const auto* iv = std::get_if<IntVal>(&a);
      return iv && iv->x.name.starts_with("_p");
    });
    p = rename(p, renaming);
    SymbolicHeap combined = split.frame;
    combined.existentials.insert(p.existentials.begin(), p.existentials.end());
    combined.pure.insert(combined.pure.end(), p.pure.begin(), p.pure.end());
    combined.spatial.insert(combined.spatial.end(), p.spatial.begin(), p.spatial.end());
    if (auto n = normalize(combined)) out.push_back({std::move(*n), imprecise});
  }
  return out;
}

}  // namespace shape
