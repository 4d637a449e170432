#include <algorithm>

#include "heap_util.hpp"
#include "shape/engine/engine.hpp"
#include "shape/formula/ops.hpp"

namespace shape {

using detail::fresh_var;
using detail::make_cell;

namespace {

// `h` with atom `i` replaced by `atoms` and `pure` added.
SymbolicHeap splice(const SymbolicHeap& h, std::size_t i, std::vector<SpatialAtom> atoms, std::vector<PureAtom> pure,
                    std::vector<Var> fresh = {}) {
  SymbolicHeap r = h;
  r.spatial.erase(r.spatial.begin() + static_cast<std::ptrdiff_t>(i));
  r.spatial.insert(r.spatial.begin() + static_cast<std::ptrdiff_t>(i), atoms.begin(), atoms.end());
  r.pure.insert(r.pure.end(), pure.begin(), pure.end());
  r.existentials.insert(fresh.begin(), fresh.end());
  return r;
}

// Branches of a list atom starting (or, for a DLL, ending) at x: empty if
// allowed, exactly one cell if allowed, or one cell followed by the rest.
std::vector<SymbolicHeap> unfold(const SymbolicHeap& h, std::size_t i, const Var& x) {
  std::vector<SymbolicHeap> out;
  const SpatialAtom& a = h.spatial[i];
  Var y = fresh_var(h);
  if (const auto* l = std::get_if<Ls>(&a)) {
    int rest = std::max(l->min - 1, 1);
    if (l->min == 0) out.push_back(splice(h, i, {}, {Eq{l->src, l->dst}}));
    if (l->min <= 1) out.push_back(splice(h, i, {make_cell(x, {{l->link, l->dst}})}, {Neq{x, l->dst}}));
    out.push_back(splice(h, i, {make_cell(x, {{l->link, y}}), Ls{rest, y, l->dst, l->link}}, {Neq{x, l->dst}}, {y}));
  } else if (const auto* d = std::get_if<Dls>(&a)) {
    int rest = std::max(d->min - 1, 1);
    std::vector<PureAtom> apart{Neq{x, d->next_of_last}, Neq{x, d->prev_of_first}};
    if (d->min == 0) out.push_back(splice(h, i, {}, {Eq{d->first, d->next_of_last}, Eq{d->last, d->prev_of_first}}));
    if (d->min <= 1) {
      auto single = apart;
      single.push_back(Eq{d->first, d->last});
      out.push_back(splice(h, i, {make_cell(x, {{d->next, d->next_of_last}, {d->prev, d->prev_of_first}})}, single));
    }
    if (d->first == x) {
      out.push_back(splice(h, i,
                           {make_cell(x, {{d->next, y}, {d->prev, d->prev_of_first}}),
                            Dls{rest, y, d->last, x, d->next_of_last, d->next, d->prev}},
                           apart, {y}));
    } else {
      out.push_back(splice(h, i,
                           {Dls{rest, d->first, y, d->prev_of_first, x, d->next, d->prev},
                            make_cell(x, {{d->next, d->next_of_last}, {d->prev, y}})},
                           apart, {y}));
    }
  } else if (const auto* n = std::get_if<Nls>(&a)) {
    int rest = std::max(n->min - 1, 1);
    SymbolicHeap with_w = h;
    with_w.existentials.insert(y);
    Var w = fresh_var(with_w);
    std::vector<PureAtom> apart{Neq{x, n->dst}, Neq{x, n->sink}};
    Ls nested{0, w, n->sink, n->inner};
    if (n->min == 0) out.push_back(splice(h, i, {}, {Eq{n->src, n->dst}}));
    if (n->min <= 1)
      out.push_back(splice(h, i, {make_cell(x, {{n->next, n->dst}, {n->nested, w}}), nested}, apart, {w}));
    out.push_back(splice(h, i,
                         {make_cell(x, {{n->next, y}, {n->nested, w}}), nested,
                          Nls{rest, y, n->dst, n->sink, n->next, n->nested, n->inner}},
                         apart, {y, w}));
  }
  return out;
}

// Variables that some atom allocates at its boundary.
std::vector<Var> sources(const SymbolicHeap& h) {
  std::vector<Var> out;
  auto add = [&](const Var& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  for (const auto& a : h.spatial) {
    if (const auto* p = std::get_if<PointsTo>(&a)) add(p->src);
    if (const auto* f = std::get_if<Freed>(&a)) add(f->loc);
    if (const auto* l = std::get_if<Ls>(&a)) add(l->src);
    if (const auto* d = std::get_if<Dls>(&a)) add(d->first), add(d->last);
    if (const auto* n = std::get_if<Nls>(&a)) add(n->src);
  }
  return out;
}

class Materializer {
 public:
  Materializer(const Var& x, const SolverOptions& opts) : x_(x), opts_(opts) {}

  void run(const SymbolicHeap& h) {
    Var x = representative(h, x_);
    if (x.is_nil()) {
      out.null.push_back(h);
      return;
    }
    for (std::size_t i = 0; i < h.spatial.size(); ++i) {
      const SpatialAtom& a = h.spatial[i];
      if (const auto* p = std::get_if<PointsTo>(&a); p && p->src == x) {
        out.cells.push_back(h);
        return;
      }
      if (const auto* f = std::get_if<Freed>(&a); f && f->loc == x) {
        out.freed = true;
        return;
      }
      bool heads = std::visit(
          [&](const auto& atom) {
            using T = std::decay_t<decltype(atom)>;
            if constexpr (std::is_same_v<T, Ls> || std::is_same_v<T, Nls>) return atom.src == x;
            if constexpr (std::is_same_v<T, Dls>) return atom.first == x || atom.last == x;
            return false;
          },
          a);
      if (heads) {
        for (const auto& b : unfold(h, i, x))
          if (auto f = detail::feasible(b, opts_)) run(*f);
        return;
      }
    }
    // x is not syntactically allocated: it is nil, aliases a source, or dangles.
    SymbolicHeap dangling = h;
    dangling.pure.push_back(Neq{x, Var::nil()});
    for (const auto& s : sources(h)) {
      SymbolicHeap b = h;
      b.pure.push_back(Eq{s, x});
      if (auto f = detail::feasible(b, opts_)) run(*f);
      dangling.pure.push_back(Neq{x, s});
    }
    SymbolicHeap null = h;
    null.pure.push_back(Eq{Var::nil(), x});
    if (auto f = detail::feasible(null, opts_)) out.null.push_back(*f);
    if (detail::feasible(dangling, opts_)) out.dangling = true;
  }

  Materialized out;

 private:
  Var x_;
  SolverOptions opts_;
};

}  // namespace

Materialized materialize(const SymbolicHeap& h, const Var& x, const SolverOptions& opts) {
  Materializer m(x, opts);
  if (auto n = normalize(h)) m.run(*n);
  return m.out;
}

}  // namespace shape
