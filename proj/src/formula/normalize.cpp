#include <algorithm>
#include <map>

#include "shape/formula/ops.hpp"
#include "shape/util/overloaded.hpp"

namespace shape {

namespace {

Var remap(const std::map<Var, Var>& m, const Var& v) {
  auto it = m.find(v);
  return it == m.end() ? v : it->second;
}

FieldValue remap(const std::map<Var, Var>& m, const FieldValue& fv) {
  if (const auto* v = std::get_if<Var>(&fv)) return remap(m, *v);
  return fv;
}

PureAtom remap(const std::map<Var, Var>& m, const PureAtom& a) {
  return std::visit(overloaded{
                        [&](const Eq& e) -> PureAtom { return Eq{remap(m, e.a), remap(m, e.b)}; },
                        [&](const Neq& e) -> PureAtom { return Neq{remap(m, e.a), remap(m, e.b)}; },
                        [&](const IntVal& e) -> PureAtom { return IntVal{remap(m, e.x), e.value}; },
                    },
                    a);
}

SpatialAtom remap(const std::map<Var, Var>& m, const SpatialAtom& a) {
  return std::visit(overloaded{
                        [&](const PointsTo& p) -> SpatialAtom {
                          PointsTo r{remap(m, p.src), {}};
                          for (const auto& [f, v] : p.fields) r.fields.emplace_back(f, remap(m, v));
                          return r;
                        },
                        [&](const Ls& l) -> SpatialAtom {
                          return Ls{l.min, remap(m, l.src), remap(m, l.dst), l.link};
                        },
                        [&](const Dls& d) -> SpatialAtom {
                          return Dls{d.min,
                                     remap(m, d.first),
                                     remap(m, d.last),
                                     remap(m, d.prev_of_first),
                                     remap(m, d.next_of_last),
                                     d.next,
                                     d.prev};
                        },
                        [&](const Nls& n) -> SpatialAtom {
                          return Nls{n.min,         remap(m, n.src), remap(m, n.dst), remap(m, n.sink),
                                     n.next,        n.nested,        n.inner};
                        },
                        [&](const Freed& f) -> SpatialAtom { return Freed{remap(m, f.loc)}; },
                    },
                    a);
}

SymbolicHeap apply_uses(const SymbolicHeap& h, const std::map<Var, Var>& m) {
  SymbolicHeap r;
  r.existentials = h.existentials;
  for (const auto& a : h.pure) r.pure.push_back(remap(m, a));
  for (const auto& a : h.spatial) r.spatial.push_back(remap(m, a));
  return r;
}

// Union-find over variable names, used to collapse equality classes.
class Classes {
 public:
  Var find(const Var& v) {
    auto it = parent_.find(v);
    if (it == parent_.end() || it->second == v) return v;
    Var root = find(it->second);
    parent_[v] = root;
    return root;
  }
  void unite(const Var& a, const Var& b) {
    parent_.try_emplace(a, a);
    parent_.try_emplace(b, b);
    Var ra = find(a), rb = find(b);
    if (ra != rb) parent_[ra] = rb;
  }
  std::map<Var, std::vector<Var>> groups() {
    std::map<Var, std::vector<Var>> out;
    for (const auto& [v, p] : parent_) out[find(v)].push_back(v);
    return out;
  }

 private:
  std::map<Var, Var> parent_;
};

struct Contradiction {};

// One round of equality collapsing plus atom-local simplification. Returns
// the equalities discovered while simplifying; the caller loops until none.
std::vector<Eq> simplify_round(SymbolicHeap& h) {
  Classes classes;
  for (const auto& a : h.pure)
    if (const auto* e = std::get_if<Eq>(&a)) classes.unite(e->a, e->b);

  auto better = [&](const Var& a, const Var& b) {
    auto rank = [&](const Var& v) { return v.is_nil() ? 0 : h.is_existential(v) ? 2 : 1; };
    if (rank(a) != rank(b)) return rank(a) < rank(b);
    return a < b;
  };

  std::map<Var, Var> to_rep;
  std::vector<PureAtom> pure;
  for (auto& [root, members] : classes.groups()) {
    Var rep = members.front();
    for (const auto& m : members)
      if (better(m, rep)) rep = m;
    for (const auto& m : members) {
      if (m == rep) continue;
      if (m.is_nil()) continue;
      to_rep[m] = rep;
      if (!h.is_existential(m)) pure.push_back(Eq{rep, m});
    }
  }
  for (const auto& a : h.pure) {
    if (std::holds_alternative<Eq>(a)) continue;
    PureAtom b = remap(to_rep, a);
    if (auto* n = std::get_if<Neq>(&b)) {
      if (n->a == n->b) throw Contradiction{};
      if (n->b < n->a) std::swap(n->a, n->b);
    }
    pure.push_back(b);
  }
  std::sort(pure.begin(), pure.end());
  pure.erase(std::unique(pure.begin(), pure.end()), pure.end());
  for (std::size_t i = 0; i + 1 < pure.size(); ++i) {
    const auto* x = std::get_if<IntVal>(&pure[i]);
    const auto* y = std::get_if<IntVal>(&pure[i + 1]);
    if (x && y && x->x == y->x) throw Contradiction{};
  }

  auto has_neq = [&](const Var& a, const Var& b) {
    Neq n = a < b ? Neq{a, b} : Neq{b, a};
    return std::find(pure.begin(), pure.end(), PureAtom{n}) != pure.end();
  };

  std::vector<Eq> discovered;
  std::vector<SpatialAtom> spatial;
  std::vector<Var> allocated;
  for (const auto& raw : h.spatial) {
    SpatialAtom a = remap(to_rep, raw);
    bool keep = std::visit(
        overloaded{
            [&](PointsTo& p) {
              if (p.src.is_nil()) throw Contradiction{};
              allocated.push_back(p.src);
              return true;
            },
            [&](Freed& f) {
              if (f.loc.is_nil()) throw Contradiction{};
              allocated.push_back(f.loc);
              return true;
            },
            [&](Ls& l) {
              if (l.src == l.dst) {
                if (l.min > 0) throw Contradiction{};
                return false;
              }
              if (l.src.is_nil()) {
                if (l.min > 0) throw Contradiction{};
                discovered.push_back(Eq{l.dst, l.src});
                return false;
              }
              if (l.min == 0 && has_neq(l.src, l.dst)) l.min = 1;
              if (l.min > 0) allocated.push_back(l.src);
              return true;
            },
            [&](Dls& d) {
              bool empty_forced = d.first == d.next_of_last || d.first.is_nil() || d.last.is_nil();
              if (empty_forced) {
                if (d.min > 0) throw Contradiction{};
                if (d.first != d.next_of_last) discovered.push_back(Eq{d.first, d.next_of_last});
                if (d.last != d.prev_of_first) discovered.push_back(Eq{d.last, d.prev_of_first});
                return false;
              }
              if (d.min == 0 &&
                  (has_neq(d.first, d.next_of_last) || has_neq(d.last, d.prev_of_first)))
                d.min = 1;
              if (d.min > 0) {
                allocated.push_back(d.first);
                if (d.last != d.first) allocated.push_back(d.last);
              }
              return true;
            },
            [&](Nls& n) {
              if (n.src == n.dst) {
                if (n.min > 0) throw Contradiction{};
                return false;
              }
              if (n.src.is_nil()) {
                if (n.min > 0) throw Contradiction{};
                discovered.push_back(Eq{n.dst, n.src});
                return false;
              }
              if (n.min == 0 && has_neq(n.src, n.dst)) n.min = 1;
              if (n.min > 0) allocated.push_back(n.src);
              return true;
            },
        },
        a);
    if (keep) spatial.push_back(std::move(a));
  }
  std::sort(allocated.begin(), allocated.end());
  if (std::adjacent_find(allocated.begin(), allocated.end()) != allocated.end())
    throw Contradiction{};

  std::sort(spatial.begin(), spatial.end());
  h.pure = std::move(pure);
  h.spatial = std::move(spatial);
  for (const auto& [from, to] : to_rep) h.existentials.erase(from);
  return discovered;
}

}  // namespace

std::optional<SymbolicHeap> normalize(const SymbolicHeap& input) {
  SymbolicHeap h = input;
  try {
    for (;;) {
      std::vector<Eq> discovered = simplify_round(h);
      if (discovered.empty()) break;
      for (auto& e : discovered) h.pure.push_back(e);
    }
  } catch (const Contradiction&) {
    return std::nullopt;
  }
  std::set<Var> used = h.vars();
  for (auto it = h.existentials.begin(); it != h.existentials.end();)
    it = used.count(*it) ? std::next(it) : h.existentials.erase(it);
  return h;
}

SymbolicHeap substitute(const SymbolicHeap& h, const Var& from, const Var& to) {
  SymbolicHeap r = apply_uses(h, {{from, to}});
  r.existentials.erase(from);
  return r;
}

SymbolicHeap rename(const SymbolicHeap& h, const std::map<Var, Var>& renaming) {
  SymbolicHeap r = apply_uses(h, renaming);
  r.existentials.clear();
  for (const auto& e : h.existentials) r.existentials.insert(remap(renaming, e));
  return r;
}

int alloc_count(const SymbolicHeap& h) {
  int n = 0;
  for (const auto& a : h.spatial) n += min_cells(a);
  return n;
}

Var representative(const SymbolicHeap& h, const Var& v) {
  for (const auto& a : h.pure)
    if (const auto* e = std::get_if<Eq>(&a))
      if (e->b == v) return e->a;
  return v;
}

SymbolicHeap canonicalize(const SymbolicHeap& h) {
  if (h.existentials.empty()) {
    SymbolicHeap r = h;
    std::sort(r.pure.begin(), r.pure.end());
    std::sort(r.spatial.begin(), r.spatial.end());
    return r;
  }
  // Mask existentials so the visiting order does not depend on their names.
  std::map<Var, Var> mask;
  for (const auto& e : h.existentials) mask[e] = Var{"?"};
  std::vector<std::pair<SpatialAtom, std::size_t>> spatial;
  for (std::size_t i = 0; i < h.spatial.size(); ++i)
    spatial.emplace_back(remap(mask, h.spatial[i]), i);
  std::stable_sort(spatial.begin(), spatial.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<PureAtom, std::size_t>> pure;
  for (std::size_t i = 0; i < h.pure.size(); ++i) pure.emplace_back(remap(mask, h.pure[i]), i);
  std::stable_sort(pure.begin(), pure.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::map<Var, Var> renaming;
  auto visit_var = [&](const Var& v) {
    if (h.is_existential(v) && !renaming.count(v))
      renaming[v] = Var{"_e" + std::to_string(renaming.size())};
  };
  auto visit_field = [&](const FieldValue& fv) {
    if (const auto* v = std::get_if<Var>(&fv)) visit_var(*v);
  };
  for (const auto& [masked_atom, i] : spatial) {
    std::visit(overloaded{
                   [&](const PointsTo& p) {
                     visit_var(p.src);
                     for (const auto& [f, v] : p.fields) visit_field(v);
                   },
                   [&](const Ls& l) { visit_var(l.src), visit_var(l.dst); },
                   [&](const Dls& d) {
                     visit_var(d.first), visit_var(d.last);
                     visit_var(d.prev_of_first), visit_var(d.next_of_last);
                   },
                   [&](const Nls& n) { visit_var(n.src), visit_var(n.dst), visit_var(n.sink); },
                   [&](const Freed& f) { visit_var(f.loc); },
               },
               h.spatial[i]);
  }
  for (const auto& [masked_atom, i] : pure) {
    std::visit(overloaded{
                   [&](const Eq& e) { visit_var(e.a), visit_var(e.b); },
                   [&](const Neq& e) { visit_var(e.a), visit_var(e.b); },
                   [&](const IntVal& e) { visit_var(e.x); },
               },
               h.pure[i]);
  }
  for (const auto& e : h.existentials) visit_var(e);
  SymbolicHeap r = rename(h, renaming);
  for (auto& a : r.pure)
    if (auto* n = std::get_if<Neq>(&a))
      if (n->b < n->a) std::swap(n->a, n->b);
  std::sort(r.pure.begin(), r.pure.end());
  std::sort(r.spatial.begin(), r.spatial.end());
  return r;
}

std::optional<SymbolicHeap> normalize_canonical(const SymbolicHeap& h) {
  auto n = normalize(h);
  if (!n) return std::nullopt;
  return canonicalize(*n);
}

}  // namespace shape
