// Model checking of a symbolic heap against a concrete model by
// backtracking: atoms whose root is already located are matched first,
// binding existentials from field values as the walk proceeds.

#include <algorithm>

#include "shape/solver/solver.hpp"
#include "shape/util/overloaded.hpp"

namespace shape {

namespace {

bool contains(const std::vector<Loc>& v, Loc l) { return std::find(v.begin(), v.end(), l) != v.end(); }

class Matcher {
 public:
  Matcher(const HeapModel& m, const SymbolicHeap& h)
      : m_(m), h_(h), claimed_(m.num_locations + 1, 0), done_(h.spatial.size(), 0) {}

  bool run() {
    std::set<Var> pointer_vars;
    for (const auto& a : h_.spatial) collect_vars(a, pointer_vars);
    for (const auto& a : h_.pure)
      if (!std::holds_alternative<IntVal>(a)) collect_vars(a, pointer_vars);
    for (const auto& v : pointer_vars) {
      if (v.is_nil() || h_.is_existential(v)) continue;
      auto it = m_.stack.find(v);
      if (it == m_.stack.end()) return false;
      val_[v] = it->second;
    }
    return search();
  }

 private:
  struct Mark {
    std::size_t trail, deferred;
    int fresh;
  };

  Mark mark() const { return {trail_.size(), deferred_.size(), fresh_used_}; }
  void undo(const Mark& k) {
    while (trail_.size() > k.trail) {
      val_.erase(trail_.back());
      trail_.pop_back();
    }
    deferred_.resize(k.deferred);
    fresh_used_ = k.fresh;
  }

  bool assigned(const Var& v) const { return v.is_nil() || val_.count(v); }
  Loc value(const Var& v) const { return v.is_nil() ? kNilLoc : val_.at(v); }

  bool bind(const Var& v, Loc l) {
    if (assigned(v)) return value(v) == l;
    val_[v] = l;
    trail_.push_back(v);
    return true;
  }

  bool unify(const Var& a, const Var& b) {
    if (assigned(a)) return bind(b, value(a));
    if (assigned(b)) return bind(a, value(b));
    deferred_.emplace_back(a, b);
    return true;
  }

  const Cell* cell_at(Loc l) const {
    if (l < 1 || l > m_.num_locations) return nullptr;
    auto it = m_.heap.find(l);
    return it == m_.heap.end() ? nullptr : &it->second;
  }

  bool usable(Loc l) const { return l >= 1 && l <= m_.num_locations && !claimed_[l]; }

  static bool pointer_fields_exactly(const Cell& c, std::initializer_list<const std::string*> names) {
    if (c.fields.size() != names.size()) return false;
    for (const std::string* n : names) {
      const CellValue* v = c.field(*n);
      if (!v || !std::holds_alternative<Ptr>(*v)) return false;
    }
    return true;
  }

  static Loc ptr(const Cell& c, const std::string& f) { return std::get<Ptr>(*c.field(f)).loc; }

  bool claim_and_search(const std::vector<Loc>& cells) {
    for (Loc c : cells) claimed_[c] = 1;
    bool ok = search();
    for (Loc c : cells) claimed_[c] = 0;
    return ok;
  }

  bool ready(const SpatialAtom& a) const {
    return std::visit(overloaded{
                          [&](const PointsTo& p) { return assigned(p.src); },
                          [&](const Freed& f) { return assigned(f.loc); },
                          [&](const Ls& l) { return assigned(l.src); },
                          [&](const Dls& d) { return assigned(d.first); },
                          [&](const Nls& n) { return assigned(n.src) && assigned(n.sink); },
                      },
                      a);
  }

  Var root(const SpatialAtom& a) const {
    return std::visit(overloaded{
                          [&](const PointsTo& p) { return p.src; },
                          [&](const Freed& f) { return f.loc; },
                          [&](const Ls& l) { return l.src; },
                          [&](const Dls& d) { return d.first; },
                          [&](const Nls& n) { return assigned(n.src) ? n.sink : n.src; },
                      },
                      a);
  }

  bool search() {
    int pick = -1;
    int pending = -1;
    for (std::size_t i = 0; i < h_.spatial.size(); ++i) {
      if (done_[i]) continue;
      if (pending < 0) pending = static_cast<int>(i);
      if (ready(h_.spatial[i])) {
        pick = static_cast<int>(i);
        break;
      }
    }
    if (pending < 0) return finish();
    if (pick < 0) {
      Var r = root(h_.spatial[pending]);
      return try_all_values(r, [&] { return search(); });
    }
    done_[pick] = 1;
    bool ok = std::visit([&](const auto& atom) { return match(atom); }, h_.spatial[pick]);
    done_[pick] = 0;
    return ok;
  }

  template <class K>
  bool try_all_values(const Var& v, K&& k) {
    for (Loc l = 0; l <= m_.num_locations + 1; ++l) {
      Mark mk = mark();
      Loc candidate = l;
      if (l == m_.num_locations + 1) candidate = m_.num_locations + 1 + fresh_used_++;
      bind(v, candidate);
      bool ok = k();
      undo(mk);
      if (ok) return true;
    }
    return false;
  }

  bool match(const PointsTo& p) {
    Loc l = value(p.src);
    const Cell* c = cell_at(l);
    if (!c || claimed_[l] || c->fields.size() != p.fields.size()) return false;
    Mark mk = mark();
    bool ok = true;
    for (const auto& [f, fv] : p.fields) {
      const CellValue* cv = c->field(f);
      if (!cv) {
        ok = false;
        break;
      }
      ok = std::visit(overloaded{
                          [&](const Var& v) {
                            const auto* q = std::get_if<Ptr>(cv);
                            return q && bind(v, q->loc);
                          },
                          [&](std::int64_t n) {
                            const auto* q = std::get_if<std::int64_t>(cv);
                            return q && *q == n;
                          },
                          [&](const UnknownInt&) { return !std::holds_alternative<Ptr>(*cv); },
                      },
                      fv);
      if (!ok) break;
    }
    if (ok) ok = claim_and_search({l});
    undo(mk);
    return ok;
  }

  bool match(const Freed& f) {
    Loc l = value(f.loc);
    if (!m_.freed.count(l) || claimed_[l]) return false;
    return claim_and_search({l});
  }

  bool match(const Ls& ls) {
    Loc cur = value(ls.src);
    std::vector<Loc> cells;
    for (;;) {
      if (assigned(ls.dst) && cur == value(ls.dst))
        return static_cast<int>(cells.size()) >= ls.min && claim_and_search(cells);
      if (!assigned(ls.dst) && static_cast<int>(cells.size()) >= ls.min && !contains(cells, cur)) {
        Mark mk = mark();
        bind(ls.dst, cur);
        bool ok = claim_and_search(cells);
        undo(mk);
        if (ok) return true;
      }
      const Cell* c = cell_at(cur);
      if (!c || !usable(cur) || contains(cells, cur) || !pointer_fields_exactly(*c, {&ls.link}))
        return false;
      cells.push_back(cur);
      cur = ptr(*c, ls.link);
    }
  }

  bool match(const Dls& d) {
    if (d.min == 0) {
      Mark mk = mark();
      bool ok = unify(d.first, d.next_of_last) && unify(d.last, d.prev_of_first) && search();
      undo(mk);
      if (ok) return true;
    }
    Mark outer = mark();
    Loc cur = value(d.first);
    std::vector<Loc> cells;
    bool found = false;
    for (;;) {
      const Cell* c = cell_at(cur);
      if (!c || !usable(cur) || contains(cells, cur) || !pointer_fields_exactly(*c, {&d.next, &d.prev}))
        break;
      Loc pv = ptr(*c, d.prev);
      if (cells.empty()) {
        if (!bind(d.prev_of_first, pv)) break;
      } else if (pv != cells.back()) {
        break;
      }
      cells.push_back(cur);
      Loc nx = ptr(*c, d.next);
      if (static_cast<int>(cells.size()) >= d.min) {
        Mark mk = mark();
        bool ok = bind(d.last, cur) && bind(d.next_of_last, nx) && !contains(cells, nx) &&
                  !contains(cells, value(d.prev_of_first)) && claim_and_search(cells);
        undo(mk);
        if (ok) {
          found = true;
          break;
        }
      }
      if (assigned(d.next_of_last) && nx == value(d.next_of_last)) break;
      cur = nx;
    }
    undo(outer);
    return found;
  }

  bool match(const Nls& n) {
    Loc sink = value(n.sink);
    Loc cur = value(n.src);
    std::vector<Loc> top_and_inner;
    int top = 0;
    for (;;) {
      if (assigned(n.dst) && cur == value(n.dst))
        return top >= n.min && !contains(top_and_inner, cur) && claim_and_search(top_and_inner);
      if (!assigned(n.dst) && top >= n.min && !contains(top_and_inner, cur)) {
        Mark mk = mark();
        bind(n.dst, cur);
        bool ok = claim_and_search(top_and_inner);
        undo(mk);
        if (ok) return true;
      }
      const Cell* c = cell_at(cur);
      if (!c || !usable(cur) || cur == sink || contains(top_and_inner, cur) ||
          !pointer_fields_exactly(*c, {&n.next, &n.nested}))
        return false;
      top_and_inner.push_back(cur);
      ++top;
      Loc w = ptr(*c, n.nested);
      while (w != sink) {
        const Cell* ic = cell_at(w);
        if (!ic || !usable(w) || contains(top_and_inner, w) || !pointer_fields_exactly(*ic, {&n.inner}))
          return false;
        top_and_inner.push_back(w);
        w = ptr(*ic, n.inner);
      }
      cur = ptr(*c, n.next);
    }
  }

  bool finish() {
    for (const auto& [l, c] : m_.heap)
      if (!claimed_[l]) return false;
    for (Loc l : m_.freed)
      if (!claimed_[l]) return false;
    std::vector<Var> rest;
    auto want = [&](const Var& v) {
      if (!assigned(v) && std::find(rest.begin(), rest.end(), v) == rest.end()) rest.push_back(v);
    };
    for (const auto& a : h_.pure) {
      if (const auto* e = std::get_if<Eq>(&a)) want(e->a), want(e->b);
      if (const auto* e = std::get_if<Neq>(&a)) want(e->a), want(e->b);
    }
    for (const auto& [a, b] : deferred_) want(a), want(b);
    return assign_rest(rest, 0);
  }

  bool assign_rest(const std::vector<Var>& rest, std::size_t i) {
    if (i == rest.size()) return pure_holds();
    return try_all_values(rest[i], [&] { return assign_rest(rest, i + 1); });
  }

  bool pure_holds() const {
    for (const auto& a : h_.pure) {
      bool ok = std::visit(overloaded{
                               [&](const Eq& e) { return value(e.a) == value(e.b); },
                               [&](const Neq& e) { return value(e.a) != value(e.b); },
                               [&](const IntVal& e) {
                                 auto it = m_.ints.find(e.x);
                                 return it != m_.ints.end() && it->second == e.value;
                               },
                           },
                           a);
      if (!ok) return false;
    }
    for (const auto& [a, b] : deferred_)
      if (value(a) != value(b)) return false;
    return true;
  }

  const HeapModel& m_;
  const SymbolicHeap& h_;
  std::map<Var, Loc> val_;
  std::vector<Var> trail_;
  std::vector<char> claimed_;
  std::vector<char> done_;
  std::vector<std::pair<Var, Var>> deferred_;
  int fresh_used_ = 0;
};

}  // namespace

bool satisfies(const HeapModel& m, const SymbolicHeap& h) { return Matcher(m, h).run(); }

}  // namespace shape
