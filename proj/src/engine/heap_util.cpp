#include "heap_util.hpp"

#include <algorithm>

#include "shape/engine/engine.hpp"
#include "shape/formula/ops.hpp"
#include "shape/util/overloaded.hpp"

namespace shape::detail {

Var fresh_var(const SymbolicHeap& h, const std::string& prefix) {
  std::set<Var> used = h.vars();
  used.insert(h.existentials.begin(), h.existentials.end());
  for (int i = 0;; ++i) {
    Var v{prefix + std::to_string(i)};
    if (!used.count(v)) return v;
  }
}

PointsTo make_cell(const Var& src, std::vector<std::pair<std::string, FieldValue>> fields) {
  std::sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return PointsTo{src, std::move(fields)};
}

std::optional<SymbolicHeap> feasible(const SymbolicHeap& h, const SolverOptions& opts) {
  auto n = normalize(h);
  if (!n || !check_sat(*n, opts).sat) return std::nullopt;
  return n;
}

std::optional<std::size_t> cell_of(const SymbolicHeap& h, const Var& x) {
  for (std::size_t i = 0; i < h.spatial.size(); ++i)
    if (const auto* p = std::get_if<PointsTo>(&h.spatial[i]); p && p->src == x) return i;
  return std::nullopt;
}

SymbolicHeap assign_pointer(const SymbolicHeap& h, const Var& x, const Var& v) {
  if (x == v) return h;
  Var val = v;
  SymbolicHeap r = h;
  if (h.vars().count(x)) {
    Var t = fresh_var(h);
    r = rename(h, {{x, t}});
    r.existentials.insert(t);
    if (val == x) val = t;
  }
  r.pure.push_back(Eq{val, x});
  return r;
}

SymbolicHeap assign_int(const SymbolicHeap& h, const Var& x, std::optional<std::int64_t> v, int range) {
  SymbolicHeap r = h;
  std::erase_if(r.pure, [&](const PureAtom& a) {
    const auto* iv = std::get_if<IntVal>(&a);
    return iv && iv->x == x;
  });
  if (v && *v >= -range && *v <= range) r.pure.push_back(IntVal{x, *v});
  return r;
}

std::optional<std::int64_t> int_value(const SymbolicHeap& h, const Var& x) {
  for (const auto& a : h.pure)
    if (const auto* iv = std::get_if<IntVal>(&a); iv && iv->x == x) return iv->value;
  return std::nullopt;
}

std::vector<Var> entry_points(const SpatialAtom& a) {
  return std::visit(overloaded{
                        [](const PointsTo& p) { return std::vector<Var>{p.src}; },
                        [](const Ls& l) { return std::vector<Var>{l.src}; },
                        [](const Dls& d) { return std::vector<Var>{d.first, d.last}; },
                        [](const Nls& n) { return std::vector<Var>{n.src}; },
                        [](const Freed& f) { return std::vector<Var>{f.loc}; },
                    },
                    a);
}

}  // namespace shape::detail

namespace shape {

SymbolicHeap forget(const SymbolicHeap& h, const Var& x) {
  SymbolicHeap r = detail::assign_int(h, x, std::nullopt, 0);
  if (!r.vars().count(x)) return r;
  Var t = detail::fresh_var(r);
  r = rename(r, {{x, t}});
  r.existentials.insert(t);
  return r;
}

}  // namespace shape
