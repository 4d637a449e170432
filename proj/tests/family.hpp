#pragma once

// The exhaustive formula families of the solver agreement check: three
// variables, at most two spatial atoms drawn from points-to, ls with minimum
// length 0, 1 or 2, and freed, plus at most one pure atom.

#include <vector>

#include "shape/formula/formula.hpp"

namespace shape::family {

inline std::vector<SpatialAtom> spatial_atoms(const std::vector<Var>& sources, const std::vector<Var>& targets) {
  std::vector<SpatialAtom> out;
  for (const auto& a : sources)
    for (const auto& b : targets) out.push_back(PointsTo{a, {{"next", b}}});
  for (const auto& a : sources)
    for (const auto& b : targets)
      for (int min = 0; min <= 2; ++min) out.push_back(Ls{min, a, b});
  for (const auto& a : sources) out.push_back(Freed{a});
  return out;
}

inline std::vector<std::vector<PureAtom>> pure_choices(const std::vector<Var>& vars) {
  std::vector<std::vector<PureAtom>> out{{}};
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      out.push_back({Eq{vars[i], vars[j]}});
      out.push_back({Neq{vars[i], vars[j]}});
    }
  return out;
}

/// All heaps over `vars` (nil included in `vars` if wanted) whose spatial
/// part is a multiset of at most two atoms. Variables in `existentials` are
/// bound in every generated heap.
inline std::vector<SymbolicHeap> heaps(const std::vector<Var>& vars, const std::vector<Var>& existentials = {}) {
  std::vector<Var> sources;
  for (const auto& v : vars)
    if (!v.is_nil()) sources.push_back(v);
  auto atoms = spatial_atoms(sources, vars);
  std::vector<std::vector<SpatialAtom>> spatial{{}};
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    spatial.push_back({atoms[i]});
    for (std::size_t j = i; j < atoms.size(); ++j) spatial.push_back({atoms[i], atoms[j]});
  }
  std::vector<SymbolicHeap> out;
  for (const auto& pure : pure_choices(vars))
    for (const auto& sp : spatial) {
      SymbolicHeap h;
      h.existentials.insert(existentials.begin(), existentials.end());
      h.pure = pure;
      h.spatial = sp;
      std::erase_if(h.existentials, [&](const Var& e) { return !h.vars().count(e); });
      out.push_back(std::move(h));
    }
  return out;
}

/// The pairwise family: free variables x and y, plus nil.
inline std::vector<SymbolicHeap> pairwise() { return heaps({Var{"x"}, Var{"y"}, Var::nil()}); }

/// The same shapes over the free variable x, nil and an existential z.
inline std::vector<SymbolicHeap> with_existential() { return heaps({Var{"x"}, Var{"z"}, Var::nil()}, {Var{"z"}}); }

}  // namespace shape::family
