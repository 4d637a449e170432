#include "shape/solver/batch.hpp"

#include <algorithm>

#include "shape/formula/ops.hpp"

namespace shape {

namespace {

template <class Body>
void for_each_index(long n, Execution exec, Body&& body) {
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) body(i);
  } else {
    for (long i = 0; i < n; ++i) body(i);
  }
}

std::set<Var> free_pointer_vars(const SymbolicHeap& h) {
  std::set<Var> out;
  for (const auto& a : h.spatial) collect_vars(a, out);
  for (const auto& a : h.pure)
    if (!std::holds_alternative<IntVal>(a)) collect_vars(a, out);
  std::erase_if(out, [&](const Var& v) { return v.is_nil() || h.is_existential(v); });
  return out;
}

// Renames the existentials of `h` away from every name in `taken`.
SymbolicHeap rename_apart(const SymbolicHeap& h, const std::set<Var>& taken) {
  std::map<Var, Var> m;
  int fresh = 0;
  std::set<Var> own = h.vars();
  for (const auto& e : h.existentials) {
    if (!taken.count(e)) continue;
    Var v;
    do v = Var{"_l" + std::to_string(fresh++)};
    while (taken.count(v) || own.count(v));
    m[e] = v;
  }
  return m.empty() ? h : rename(h, m);
}

}  // namespace

std::vector<char> check_sat_all(const std::vector<SymbolicHeap>& hs, Execution exec, const SolverOptions& opts) {
  std::vector<char> out(hs.size(), 0);
  for_each_index(static_cast<long>(hs.size()), exec, [&](long i) { out[i] = check_sat(hs[i], opts).sat; });
  return out;
}

std::vector<char> entailment_matrix(const std::vector<SymbolicHeap>& hs, Execution exec, const SolverOptions& opts) {
  const long n = static_cast<long>(hs.size());
  std::vector<std::optional<SymbolicHeap>> norm(n);
  std::vector<int> bound(n, 0);
  for_each_index(n, exec, [&](long i) {
    norm[i] = normalize(hs[i]);
    if (norm[i]) bound[i] = compute_bound(*norm[i]).max_locations;
  });
  int max_bound = 0;
  std::set<Var> rhs_vars, all_vars;
  for (long i = 0; i < n; ++i) {
    if (!norm[i]) continue;
    max_bound = std::max(max_bound, bound[i]);
    auto fv = free_pointer_vars(*norm[i]);
    rhs_vars.insert(fv.begin(), fv.end());
    auto vs = norm[i]->vars();
    all_vars.insert(vs.begin(), vs.end());
  }

  std::vector<char> out(static_cast<std::size_t>(n * n), 0);
  for_each_index(n, exec, [&](long i) {
    char* row = &out[static_cast<std::size_t>(i * n)];
    if (!norm[i]) {
      std::fill(row, row + n, 1);
      return;
    }
    SymbolicHeap lhs = rename_apart(*norm[i], all_vars);
    EnumerationLimits lim{bound[i] + max_bound, opts.unfold_slack, rhs_vars};
    std::vector<HeapModel> models;
    enumerate_models(lhs, lim, [&](const HeapModel& m) {
      models.push_back(m);
      return false;
    });
    bool lhs_sat = std::any_of(models.begin(), models.end(),
                               [&](const HeapModel& m) { return m.num_locations <= bound[i]; });
    for (long j = 0; j < n; ++j) {
      if (!norm[j]) {
        row[j] = !lhs_sat;
      } else if (*norm[i] == *norm[j]) {
        row[j] = 1;
      } else {
        int limit = bound[i] + bound[j];
        row[j] = std::all_of(models.begin(), models.end(), [&](const HeapModel& m) {
          return m.num_locations > limit || satisfies(m, *norm[j]);
        });
      }
    }
  });
  return out;
}

}  // namespace shape
