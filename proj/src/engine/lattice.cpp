#include "lattice.hpp"

#include <algorithm>
#include <numeric>

#include "shape/engine/engine.hpp"
#include "shape/formula/ops.hpp"

namespace shape::detail {

bool EntailOracle::entails(const SymbolicHeap& a, const SymbolicHeap& b) {
  if (a == b) return true;
  auto key = std::make_pair(a, b);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  bool v = check_entail(a, b, opts_).valid;
  memo_.emplace(std::move(key), v);
  return v;
}

namespace {

// Candidates for `s` among `t`, closest allocation count first.
std::vector<std::size_t> candidates(const SymbolicHeap& s, const std::vector<const SymbolicHeap*>& t) {
  int as = alloc_count(s);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < t.size(); ++j)
    if (alloc_count(*t[j]) <= as) out.push_back(j);
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    return as - alloc_count(*t[a]) < as - alloc_count(*t[b]);
  });
  return out;
}

}  // namespace

std::vector<bool> retained(const std::vector<const SymbolicHeap*>& heaps, EntailOracle& oracle) {
  std::vector<bool> keep(heaps.size(), true);
  for (std::size_t i = heaps.size(); i-- > 0;) {
    for (std::size_t j : candidates(*heaps[i], heaps)) {
      if (j == i || !keep[j]) continue;
      if (oracle.entails(*heaps[i], *heaps[j])) {
        keep[i] = false;
        break;
      }
    }
  }
  return keep;
}

bool covered(const std::vector<const SymbolicHeap*>& s, const std::vector<const SymbolicHeap*>& t,
             EntailOracle& oracle) {
  for (const auto* h : s) {
    auto c = candidates(*h, t);
    if (std::none_of(c.begin(), c.end(), [&](std::size_t j) { return oracle.entails(*h, *t[j]); })) return false;
  }
  return true;
}

}  // namespace shape::detail

namespace shape {

namespace {

std::vector<const SymbolicHeap*> pointers(const StateSet& s) {
  std::vector<const SymbolicHeap*> out;
  for (const auto& h : s.heaps) out.push_back(&h);
  return out;
}

}  // namespace

StateSet join(const StateSet& current, const StateSet& incoming, const SolverOptions& opts) {
  StateSet all = current;
  for (const auto& h : incoming.heaps) all.insert(h);
  detail::EntailOracle oracle(opts);
  auto keep = detail::retained(pointers(all), oracle);
  StateSet out;
  for (std::size_t i = 0; i < all.heaps.size(); ++i)
    if (keep[i]) out.heaps.push_back(all.heaps[i]);
  return out;
}

bool is_fixpoint(const StateSet& s, const StateSet& t, const SolverOptions& opts) {
  detail::EntailOracle oracle(opts);
  return detail::covered(pointers(s), pointers(t), oracle);
}

}  // namespace shape
