#include "shape/solver/solver.hpp"

#include <algorithm>

#include "shape/formula/ops.hpp"
#include "shape/util/overloaded.hpp"

namespace shape {

Bound compute_bound(const SymbolicHeap& h) {
  int n = 1 + static_cast<int>(h.free_vars().size());
  for (const auto& a : h.spatial) n += is_list_atom(a) ? min_cells(a) + 2 : 1;
  return {n};
}

namespace {

std::set<Var> pointer_vars(const SymbolicHeap& h) {
  std::set<Var> out;
  for (const auto& a : h.spatial) collect_vars(a, out);
  for (const auto& a : h.pure)
    if (!std::holds_alternative<IntVal>(a)) collect_vars(a, out);
  out.erase(Var::nil());
  return out;
}

// Builds models of a normalized heap: every list atom gets a concrete
// length, every atom its own fresh cells, and every variable that is not
// the root of some cell ranges over nil, cells and dangling locations.
class Generator {
 public:
  Generator(const SymbolicHeap& h, const EnumerationLimits& lim,
            const std::function<bool(const HeapModel&)>& visit)
      : h_(h), lim_(lim), visit_(visit), lens_(h.spatial.size(), 0), inner_(h.spatial.size()) {
    vars_ = pointer_vars(h);
    for (const auto& v : lim.extra_vars)
      if (!v.is_nil()) vars_.insert(v);
  }

  bool run() { return choose_length(0, 0); }

 private:
  enum class Kind { Equal, NotEqual, NotIn };
  struct Constraint {
    Kind kind;
    Var a, b;
    std::vector<Loc> cells;
  };

  bool choose_length(std::size_t i, int used) {
    if (used > lim_.max_locations) return false;
    if (i == h_.spatial.size()) return layout(used);
    const SpatialAtom& a = h_.spatial[i];
    if (!is_list_atom(a)) {
      lens_[i] = 1;
      return choose_length(i + 1, used + 1);
    }
    int lo = min_cells(a);
    for (int n = lo; n <= lo + lim_.unfold_slack; ++n) {
      lens_[i] = n;
      if (const auto* nls = std::get_if<Nls>(&a)) {
        (void)nls;
        inner_[i].assign(n, 0);
        if (choose_inner(i, 0, used + n)) return true;
      } else if (choose_length(i + 1, used + n)) {
        return true;
      }
    }
    return false;
  }

  bool choose_inner(std::size_t i, std::size_t k, int used) {
    if (used > lim_.max_locations) return false;
    if (k == inner_[i].size()) return choose_length(i + 1, used);
    for (int n = 0; n <= lim_.unfold_slack; ++n) {
      inner_[i][k] = n;
      if (choose_inner(i, k + 1, used + n)) return true;
    }
    return false;
  }

  bool force(const Var& v, Loc l) {
    if (v.is_nil()) return false;
    auto [it, fresh] = val_.emplace(v, l);
    return fresh || it->second == l;
  }

  bool layout(int num_cells) {
    cells_.assign(h_.spatial.size(), {});
    inner_cells_.assign(h_.spatial.size(), {});
    val_.clear();
    constraints_.clear();
    Loc next = 1;
    for (std::size_t i = 0; i < h_.spatial.size(); ++i) {
      for (int k = 0; k < lens_[i]; ++k) cells_[i].push_back(next++);
      if (std::holds_alternative<Nls>(h_.spatial[i])) {
        inner_cells_[i].resize(lens_[i]);
        for (int k = 0; k < lens_[i]; ++k)
          for (int j = 0; j < inner_[i][k]; ++j) inner_cells_[i][k].push_back(next++);
      }
    }
    for (const auto& a : h_.pure) {
      if (const auto* e = std::get_if<Eq>(&a)) constraints_.push_back({Kind::Equal, e->a, e->b, {}});
      if (const auto* e = std::get_if<Neq>(&a)) constraints_.push_back({Kind::NotEqual, e->a, e->b, {}});
    }
    for (std::size_t i = 0; i < h_.spatial.size(); ++i) {
      const auto& cs = cells_[i];
      bool ok = std::visit(
          overloaded{
              [&](const PointsTo& p) { return force(p.src, cs[0]); },
              [&](const Freed& f) { return force(f.loc, cs[0]); },
              [&](const Ls& l) {
                if (cs.empty()) {
                  constraints_.push_back({Kind::Equal, l.src, l.dst, {}});
                  return true;
                }
                constraints_.push_back({Kind::NotIn, l.dst, {}, cs});
                return force(l.src, cs.front());
              },
              [&](const Dls& d) {
                if (cs.empty()) {
                  constraints_.push_back({Kind::Equal, d.first, d.next_of_last, {}});
                  constraints_.push_back({Kind::Equal, d.last, d.prev_of_first, {}});
                  return true;
                }
                constraints_.push_back({Kind::NotIn, d.next_of_last, {}, cs});
                constraints_.push_back({Kind::NotIn, d.prev_of_first, {}, cs});
                return force(d.first, cs.front()) && force(d.last, cs.back());
              },
              [&](const Nls& n) {
                if (cs.empty()) {
                  constraints_.push_back({Kind::Equal, n.src, n.dst, {}});
                  return true;
                }
                std::vector<Loc> all = cs;
                for (const auto& chain : inner_cells_[i]) all.insert(all.end(), chain.begin(), chain.end());
                constraints_.push_back({Kind::NotIn, n.dst, {}, all});
                constraints_.push_back({Kind::NotIn, n.sink, {}, all});
                return force(n.src, cs.front());
              },
          },
          h_.spatial[i]);
      if (!ok) return false;
    }
    num_cells_ = num_cells;
    free_.clear();
    for (const auto& v : vars_)
      if (!val_.count(v)) free_.push_back(v);
    for (const auto& c : constraints_)
      if (!holds_if_assigned(c)) return false;
    return assign(0, 0);
  }

  bool assigned(const Var& v) const { return v.is_nil() || val_.count(v); }
  Loc value(const Var& v) const { return v.is_nil() ? kNilLoc : val_.at(v); }

  bool holds_if_assigned(const Constraint& c) const {
    switch (c.kind) {
      case Kind::Equal:
        return !assigned(c.a) || !assigned(c.b) || value(c.a) == value(c.b);
      case Kind::NotEqual:
        return !assigned(c.a) || !assigned(c.b) || value(c.a) != value(c.b);
      case Kind::NotIn:
        return !assigned(c.a) || std::find(c.cells.begin(), c.cells.end(), value(c.a)) == c.cells.end();
    }
    return true;
  }

  bool consistent() const {
    return std::all_of(constraints_.begin(), constraints_.end(),
                       [&](const Constraint& c) { return holds_if_assigned(c); });
  }

  // `dangling` counts the non-cell locations introduced so far.
  bool assign(std::size_t i, int dangling) {
    if (i == free_.size()) return emit(dangling);
    const Var& v = free_[i];
    int existing = num_cells_ + dangling;
    for (Loc l = 0; l <= existing + 1; ++l) {
      bool is_new = l == existing + 1;
      if (is_new && existing + 1 > lim_.max_locations) break;
      val_[v] = l;
      if (consistent() && assign(i + 1, dangling + (is_new ? 1 : 0))) return true;
    }
    val_.erase(v);
    return false;
  }

  CellValue field_value(const FieldValue& fv) const {
    return std::visit(overloaded{
                          [&](const Var& v) -> CellValue { return Ptr{value(v)}; },
                          [&](std::int64_t n) -> CellValue { return n; },
                          [&](const UnknownInt& u) -> CellValue { return u; },
                      },
                      fv);
  }

  static Cell make_cell(std::vector<std::pair<std::string, CellValue>> fields) {
    std::sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return Cell{std::move(fields)};
  }

  bool emit(int dangling) {
    HeapModel m;
    m.num_locations = num_cells_ + dangling;
    for (const auto& v : vars_)
      if (!h_.is_existential(v)) m.stack[v] = value(v);
    for (const auto& a : h_.pure)
      if (const auto* iv = std::get_if<IntVal>(&a)) m.ints[iv->x] = iv->value;
    for (std::size_t i = 0; i < h_.spatial.size(); ++i) {
      const auto& cs = cells_[i];
      std::visit(overloaded{
                     [&](const PointsTo& p) {
                       std::vector<std::pair<std::string, CellValue>> fs;
                       for (const auto& [f, fv] : p.fields) fs.emplace_back(f, field_value(fv));
                       m.heap[cs[0]] = make_cell(std::move(fs));
                     },
                     [&](const Freed&) { m.freed.insert(cs[0]); },
                     [&](const Ls& l) {
                       for (std::size_t k = 0; k < cs.size(); ++k) {
                         Loc nx = k + 1 < cs.size() ? cs[k + 1] : value(l.dst);
                         m.heap[cs[k]] = make_cell({{l.link, Ptr{nx}}});
                       }
                     },
                     [&](const Dls& d) {
                       for (std::size_t k = 0; k < cs.size(); ++k) {
                         Loc nx = k + 1 < cs.size() ? cs[k + 1] : value(d.next_of_last);
                         Loc pv = k > 0 ? cs[k - 1] : value(d.prev_of_first);
                         m.heap[cs[k]] = make_cell({{d.next, Ptr{nx}}, {d.prev, Ptr{pv}}});
                       }
                     },
                     [&](const Nls& n) {
                       Loc sink = value(n.sink);
                       for (std::size_t k = 0; k < cs.size(); ++k) {
                         Loc nx = k + 1 < cs.size() ? cs[k + 1] : value(n.dst);
                         const auto& chain = inner_cells_[i][k];
                         Loc head = chain.empty() ? sink : chain.front();
                         m.heap[cs[k]] = make_cell({{n.next, Ptr{nx}}, {n.nested, Ptr{head}}});
                         for (std::size_t j = 0; j < chain.size(); ++j) {
                           Loc in = j + 1 < chain.size() ? chain[j + 1] : sink;
                           m.heap[chain[j]] = make_cell({{n.inner, Ptr{in}}});
                         }
                       }
                     },
                 },
                 h_.spatial[i]);
    }
    return visit_(m);
  }

  const SymbolicHeap& h_;
  const EnumerationLimits& lim_;
  const std::function<bool(const HeapModel&)>& visit_;
  std::set<Var> vars_;
  std::vector<int> lens_;
  std::vector<std::vector<int>> inner_;
  std::vector<std::vector<Loc>> cells_;
  std::vector<std::vector<std::vector<Loc>>> inner_cells_;
  std::map<Var, Loc> val_;
  std::vector<Constraint> constraints_;
  std::vector<Var> free_;
  int num_cells_ = 0;
};

}  // namespace

bool enumerate_models(const SymbolicHeap& h, const EnumerationLimits& limits,
                      const std::function<bool(const HeapModel&)>& visit) {
  return Generator(h, limits, visit).run();
}

namespace {

// Variables of trivial atoms dropped by normalize are unconstrained; binding
// them to nil lets the model replay on the formula as written.
void bind_dropped(const SymbolicHeap& h, HeapModel& m) {
  for (const auto& v : h.free_vars())
    if (!m.stack.count(v) && !m.ints.count(v)) m.stack[v] = kNilLoc;
}

}  // namespace

SatResult check_sat(const SymbolicHeap& h, const SolverOptions& opts) {
  auto n = normalize(h);
  if (!n) return {};
  EnumerationLimits lim{compute_bound(*n).max_locations, opts.unfold_slack, {}};
  SatResult r;
  enumerate_models(*n, lim, [&](const HeapModel& m) {
    r.sat = true;
    r.model = m;
    return true;
  });
  if (r.model) bind_dropped(h, *r.model);
  return r;
}

EntailResult check_entail(const SymbolicHeap& lhs, const SymbolicHeap& rhs, const SolverOptions& opts) {
  auto l = normalize(lhs);
  if (!l) return {true, std::nullopt};
  auto r = normalize(rhs);
  if (!r) {
    SatResult s = check_sat(lhs, opts);
    return {!s.sat, s.model};
  }
  if (*l == *r) return {true, std::nullopt};
  std::set<Var> rhs_vars = r->vars();
  std::map<Var, Var> apart;
  int fresh = 0;
  for (const auto& e : l->existentials) {
    if (!rhs_vars.count(e)) continue;
    Var v;
    do v = Var{"_l" + std::to_string(fresh++)};
    while (rhs_vars.count(v) || l->vars().count(v));
    apart[e] = v;
  }
  if (!apart.empty()) l = rename(*l, apart);
  EnumerationLimits lim;
  lim.max_locations = compute_bound(*l).max_locations + compute_bound(*r).max_locations;
  lim.unfold_slack = opts.unfold_slack;
  for (const auto& v : pointer_vars(*r))
    if (!r->is_existential(v)) lim.extra_vars.insert(v);
  EntailResult res{true, std::nullopt};
  enumerate_models(*l, lim, [&](const HeapModel& m) {
    if (satisfies(m, *r)) return false;
    res.valid = false;
    res.counter_model = m;
    return true;
  });
  if (res.counter_model) bind_dropped(lhs, *res.counter_model);
  return res;
}

bool entails_disequality(const SymbolicHeap& h, const Var& a, const Var& b, const SolverOptions& opts) {
  if (a == b) return false;
  SymbolicHeap with = h;
  with.pure.push_back(Eq{a, b});
  auto n = normalize(with);
  if (!n) return true;
  return !check_sat(*n, opts).sat;
}

}  // namespace shape
