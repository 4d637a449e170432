#include <algorithm>

#include "shape/abstraction/abstraction.hpp"
#include "shape/formula/ops.hpp"
#include "shape/util/overloaded.hpp"

namespace shape {

ShapeCatalog ShapeCatalog::defaults() {
  ShapeCatalog c;
  c.sll_links.insert("next");
  c.dll_links.insert({"next", "prev"});
  c.nll_links.insert({"next", "nested", "next"});
  return c;
}

ShapeCatalog ShapeCatalog::from(const std::map<std::string, StructKind>& kinds) {
  ShapeCatalog c;
  for (const auto& [name, k] : kinds) {
    switch (k.kind) {
      case StructKind::SLL:
        c.sll_links.insert(k.next);
        break;
      case StructKind::DLL:
        c.dll_links.insert({k.next, k.prev});
        break;
      case StructKind::NLL:
        c.nll_links.insert({k.next, k.nested, kinds.at(k.nested_struct).next});
        break;
      case StructKind::Plain:
        break;
    }
  }
  return c;
}

namespace {

bool contains(const std::vector<std::size_t>& v, std::size_t i) { return std::find(v.begin(), v.end(), i) != v.end(); }

// Side condition (1): every internal variable of the fold is an existential
// outside the scope, is not kept by the folded atom, and is mentioned only by
// the atoms being folded (disequalities on it are dropped with it).
bool hidden(const SymbolicHeap& h, const std::set<Var>& scope, const std::vector<std::size_t>& folded,
            const std::vector<Var>& internal, const std::vector<Var>& exposed) {
  for (const auto& v : internal) {
    if (v.is_nil() || !h.is_existential(v) || scope.count(v)) return false;
    if (std::find(exposed.begin(), exposed.end(), v) != exposed.end()) return false;
    for (std::size_t i = 0; i < h.spatial.size(); ++i) {
      if (contains(folded, i)) continue;
      if (mentions(h.spatial[i], v)) return false;
    }
    for (const auto& a : h.pure)
      if (!std::holds_alternative<Neq>(a) && mentions(a, v)) return false;
  }
  return true;
}

// Side condition (2), x != z. When the folded atoms allocate at least one
// cell and z is nil or allocated elsewhere, x (allocated by the pair) cannot
// be z; otherwise the solver decides.
bool acyclic(const SymbolicHeap& h, const Var& x, const Var& z, int folded_min, bool z_outside,
             const SolverOptions& opts) {
  if (x == z) return false;
  if (folded_min >= 1 && z_outside) return true;
  return entails_disequality(h, x, z, opts);
}

SymbolicHeap replace(const SymbolicHeap& h, const std::vector<std::size_t>& folded, SpatialAtom result,
                     const std::vector<Var>& internal) {
  SymbolicHeap r;
  r.existentials = h.existentials;
  for (const auto& v : internal) r.existentials.erase(v);
  std::size_t at = *std::min_element(folded.begin(), folded.end());
  for (std::size_t i = 0; i < h.spatial.size(); ++i) {
    if (i == at) r.spatial.push_back(result);
    if (!contains(folded, i)) r.spatial.push_back(h.spatial[i]);
  }
  for (const auto& a : h.pure) {
    bool drop = false;
    for (const auto& v : internal) drop = drop || mentions(a, v);
    if (!drop) r.pure.push_back(a);
  }
  return r;
}

std::optional<SymbolicHeap> finish(const SymbolicHeap& folded) {
  auto n = normalize(folded);
  if (!n) return std::nullopt;
  return n;
}

// ---- SLL ----

struct SllPiece {
  std::size_t index;
  Var src, dst;
  int min;
  std::string link;
};

std::optional<SllPiece> as_sll(const SpatialAtom& a, std::size_t i, const ShapeCatalog& c) {
  if (const auto* p = std::get_if<PointsTo>(&a)) {
    if (p->fields.size() != 1 || !c.sll_links.count(p->fields[0].first)) return std::nullopt;
    const auto* v = std::get_if<Var>(&p->fields[0].second);
    if (!v) return std::nullopt;
    return SllPiece{i, p->src, *v, 1, p->fields[0].first};
  }
  if (const auto* l = std::get_if<Ls>(&a)) return SllPiece{i, l->src, l->dst, l->min, l->link};
  return std::nullopt;
}

// ---- DLL ----

struct DllPiece {
  std::size_t index;
  Var first, last, prev_of_first, next_of_last;
  int min;
  std::string next, prev;
};

std::optional<DllPiece> as_dll(const SpatialAtom& a, std::size_t i, const ShapeCatalog& c) {
  if (const auto* p = std::get_if<PointsTo>(&a)) {
    if (p->fields.size() != 2) return std::nullopt;
    for (const auto& [n, pv] : c.dll_links) {
      const FieldValue* fn = p->field(n);
      const FieldValue* fp = p->field(pv);
      if (!fn || !fp || !std::holds_alternative<Var>(*fn) || !std::holds_alternative<Var>(*fp)) continue;
      return DllPiece{i, p->src, p->src, std::get<Var>(*fp), std::get<Var>(*fn), 1, n, pv};
    }
    return std::nullopt;
  }
  if (const auto* d = std::get_if<Dls>(&a))
    return DllPiece{i, d->first, d->last, d->prev_of_first, d->next_of_last, d->min, d->next, d->prev};
  return std::nullopt;
}

// ---- NLL ----

struct NllPiece {
  std::vector<std::size_t> atoms;  // the top atom first, then its nested list if separate
  Var src, dst, sink;
  std::optional<Var> nested_head;  // hidden by the fold when the nested list is a separate atom
  int min;
  ShapeCatalog::Nested fields;
};

std::optional<NllPiece> as_nll(const SymbolicHeap& h, std::size_t i, const ShapeCatalog& c) {
  const SpatialAtom& a = h.spatial[i];
  if (const auto* n = std::get_if<Nls>(&a)) return NllPiece{{i}, n->src, n->dst, n->sink, std::nullopt, n->min, {n->next, n->nested, n->inner}};
  const auto* p = std::get_if<PointsTo>(&a);
  if (!p || p->fields.size() != 2) return std::nullopt;
  for (const auto& f : c.nll_links) {
    const FieldValue* fn = p->field(f.next);
    const FieldValue* fw = p->field(f.nested);
    if (!fn || !fw || !std::holds_alternative<Var>(*fn) || !std::holds_alternative<Var>(*fw)) continue;
    Var w = std::get<Var>(*fw);
    NllPiece piece{{i}, p->src, std::get<Var>(*fn), w, std::nullopt, 1, f};
    if (w.is_nil()) return piece;
    for (std::size_t k = 0; k < h.spatial.size(); ++k) {
      if (k == i) continue;
      const SpatialAtom& b = h.spatial[k];
      std::optional<Var> sink;
      if (const auto* l = std::get_if<Ls>(&b); l && l->src == w && l->link == f.inner) sink = l->dst;
      if (const auto* q = std::get_if<PointsTo>(&b); q && q->src == w && q->fields.size() == 1 &&
                                                      q->fields[0].first == f.inner &&
                                                      std::holds_alternative<Var>(q->fields[0].second))
        sink = std::get<Var>(q->fields[0].second);
      if (sink) {
        piece.atoms.push_back(k);
        piece.sink = *sink;
        piece.nested_head = w;
        return piece;
      }
    }
    return piece;
  }
  return std::nullopt;
}

}  // namespace

bool nil_or_allocated(const SymbolicHeap& h, const std::vector<std::size_t>& removed, const Var& z,
                      const SolverOptions& opts) {
  if (z.is_nil()) return true;
  SymbolicHeap rest;
  rest.existentials = h.existentials;
  rest.pure = h.pure;
  for (std::size_t i = 0; i < h.spatial.size(); ++i) {
    if (contains(removed, i)) continue;
    const SpatialAtom& a = h.spatial[i];
    bool allocates = std::visit(overloaded{
                                    [&](const PointsTo& p) { return p.src == z; },
                                    [&](const Freed& f) { return f.loc == z; },
                                    [&](const Ls& l) { return l.min >= 1 && l.src == z; },
                                    [&](const Dls& d) { return d.min >= 1 && (d.first == z || d.last == z); },
                                    [&](const Nls& n) { return n.min >= 1 && n.src == z; },
                                },
                                a);
    if (allocates) return true;
    rest.spatial.push_back(a);
  }
  rest.spatial.push_back(PointsTo{z, {}});
  return !check_sat(rest, opts).sat;
}

std::optional<SymbolicHeap> try_fold_sll(const SymbolicHeap& h, const std::set<Var>& scope, const ShapeCatalog& shapes,
                                         const FoldOptions& opts) {
  for (std::size_t i = 0; i < h.spatial.size(); ++i) {
    auto a = as_sll(h.spatial[i], i, shapes);
    if (!a) continue;
    for (std::size_t j = 0; j < h.spatial.size(); ++j) {
      if (j == i) continue;
      auto b = as_sll(h.spatial[j], j, shapes);
      if (!b || b->src != a->dst || b->link != a->link) continue;
      std::vector<std::size_t> folded{i, j};
      if (!hidden(h, scope, folded, {a->dst}, {a->src, b->dst})) continue;
      int min = std::min(opts.length_limit, a->min + b->min);
      bool z_outside = nil_or_allocated(h, folded, b->dst, opts.solver);
      if (!z_outside || !acyclic(h, a->src, b->dst, min, z_outside, opts.solver)) continue;
      if (auto r = finish(replace(h, folded, Ls{min, a->src, b->dst, a->link}, {a->dst}))) return r;
    }
  }
  return std::nullopt;
}

std::optional<SymbolicHeap> try_fold_dll(const SymbolicHeap& h, const std::set<Var>& scope, const ShapeCatalog& shapes,
                                         const FoldOptions& opts) {
  for (std::size_t i = 0; i < h.spatial.size(); ++i) {
    auto a = as_dll(h.spatial[i], i, shapes);
    if (!a) continue;
    for (std::size_t j = 0; j < h.spatial.size(); ++j) {
      if (j == i) continue;
      auto b = as_dll(h.spatial[j], j, shapes);
      if (!b || b->next != a->next || b->prev != a->prev) continue;
      if (b->first != a->next_of_last || b->prev_of_first != a->last) continue;
      std::vector<std::size_t> folded{i, j};
      std::vector<Var> exposed{a->first, b->last, a->prev_of_first, b->next_of_last};
      std::vector<Var> internal;
      for (const Var& v : {a->next_of_last, a->last})
        if (std::find(exposed.begin(), exposed.end(), v) == exposed.end() &&
            std::find(internal.begin(), internal.end(), v) == internal.end())
          internal.push_back(v);
      if (!hidden(h, scope, folded, internal, exposed)) continue;
      int min = std::min(opts.length_limit, a->min + b->min);
      bool z_outside = nil_or_allocated(h, folded, b->next_of_last, opts.solver);
      if (!z_outside || !nil_or_allocated(h, folded, a->prev_of_first, opts.solver)) continue;
      if (!acyclic(h, a->first, b->next_of_last, min, z_outside, opts.solver)) continue;
      Dls d{min, a->first, b->last, a->prev_of_first, b->next_of_last, a->next, a->prev};
      if (auto r = finish(replace(h, folded, d, internal))) return r;
    }
  }
  return std::nullopt;
}

std::optional<SymbolicHeap> try_fold_nll(const SymbolicHeap& h, const std::set<Var>& scope, const ShapeCatalog& shapes,
                                         const FoldOptions& opts) {
  for (std::size_t i = 0; i < h.spatial.size(); ++i) {
    auto a = as_nll(h, i, shapes);
    if (!a) continue;
    for (std::size_t j = 0; j < h.spatial.size(); ++j) {
      if (contains(a->atoms, j)) continue;
      auto b = as_nll(h, j, shapes);
      if (!b || b->src != a->dst || !(b->fields == a->fields) || b->sink != a->sink) continue;
      std::vector<std::size_t> folded = a->atoms;
      bool overlap = false;
      for (std::size_t k : b->atoms) {
        overlap = overlap || contains(folded, k);
        folded.push_back(k);
      }
      if (overlap) continue;
      std::vector<Var> internal{a->dst};
      for (const auto& w : {a->nested_head, b->nested_head})
        if (w && std::find(internal.begin(), internal.end(), *w) == internal.end()) internal.push_back(*w);
      if (!hidden(h, scope, folded, internal, {a->src, b->dst, a->sink})) continue;
      int min = std::min(opts.length_limit, a->min + b->min);
      bool z_outside = nil_or_allocated(h, folded, b->dst, opts.solver);
      if (!z_outside || !nil_or_allocated(h, folded, a->sink, opts.solver)) continue;
      if (!acyclic(h, a->src, b->dst, min, z_outside, opts.solver)) continue;
      Nls n{min, a->src, b->dst, a->sink, a->fields.next, a->fields.nested, a->fields.inner};
      if (auto r = finish(replace(h, folded, n, internal))) return r;
    }
  }
  return std::nullopt;
}

std::optional<SymbolicHeap> try_fold(const SymbolicHeap& h, const std::set<Var>& scope, const ShapeCatalog& shapes,
                                     const FoldOptions& opts) {
  if (auto r = try_fold_sll(h, scope, shapes, opts)) return r;
  if (auto r = try_fold_dll(h, scope, shapes, opts)) return r;
  return try_fold_nll(h, scope, shapes, opts);
}

StateSet widen(const StateSet& s, const std::set<Var>& scope, const ShapeCatalog& shapes, const FoldOptions& opts) {
  StateSet out;
  for (const auto& h : s.heaps) {
    SymbolicHeap cur = h;
    while (auto next = try_fold(cur, scope, shapes, opts)) cur = std::move(*next);
    if (auto n = normalize_canonical(cur)) out.insert(std::move(*n));
  }
  return out;
}

}  // namespace shape
