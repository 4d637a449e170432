#include <chrono>
#include <sstream>

#include "criteria.hpp"
#include "family.hpp"
#include "oracle/oracle.hpp"
#include "shape/formula/ops.hpp"
#include "shape/solver/batch.hpp"

namespace acceptance {

using namespace shape;

namespace {

constexpr int kOracleCap = 8;

struct Tally {
  long formulas = 0, pairs = 0, valid = 0, disagreements = 0;
  std::ostringstream examples;

  void disagree(const std::string& what) {
    if (disagreements++ < 5) examples << " [" << what << "]";
  }
};

int oracle_size(const SymbolicHeap& h) {
  auto n = normalize(h);
  return std::min(compute_bound(n ? *n : h).max_locations + 2, kOracleCap);
}

// The oracle side works on one universe of models per family: bit k of
// holds[i] says whether model k satisfies formula i. Entailment is then
// bitset inclusion over all models up to the cap.
void compare_family(const std::vector<SymbolicHeap>& hs, Tally& t) {
  std::vector<const SymbolicHeap*> ptrs;
  for (const auto& h : hs) ptrs.push_back(&h);
  std::vector<HeapModel> universe;
  oracle::enumerate(oracle::signature_of(ptrs), kOracleCap, [&](const HeapModel& m) {
    universe.push_back(m);
    return false;
  });

  const std::size_t n = hs.size(), um = universe.size(), words = (um + 63) / 64;
  std::vector<std::vector<std::uint64_t>> holds(n, std::vector<std::uint64_t>(words, 0));
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(n); ++i)
    for (std::size_t k = 0; k < um; ++k)
      if (oracle::satisfies(universe[k], hs[i])) holds[i][k / 64] |= std::uint64_t{1} << (k % 64);

  auto sat = check_sat_all(hs);
  for (std::size_t i = 0; i < n; ++i) {
    int size = oracle_size(hs[i]);
    bool o = false;
    for (std::size_t k = 0; k < um && !o; ++k)
      o = ((holds[i][k / 64] >> (k % 64)) & 1) && universe[k].num_locations <= size;
    if (o != static_cast<bool>(sat[i])) t.disagree("sat " + to_string(hs[i]));
  }

  auto ent = entailment_matrix(hs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      bool o = true;
      for (std::size_t w = 0; w < words && o; ++w) o = (holds[i][w] & ~holds[j][w]) == 0;
      bool s = ent[i * n + j];
      t.valid += s;
      if (o != s) t.disagree(to_string(hs[i]) + " |- " + to_string(hs[j]));
    }
  t.formulas += static_cast<long>(n);
  t.pairs += static_cast<long>(n * n);
}

}  // namespace

Outcome solver_oracle_agreement() {
  auto start = std::chrono::steady_clock::now();
  Tally t;
  compare_family(family::pairwise(), t);
  compare_family(family::with_existential(), t);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream s;
  s << t.formulas << " formulas, " << t.pairs << " ordered pairs (" << t.valid << " valid), " << t.disagreements
    << " disagreements, " << secs << "s" << t.examples.str();
  return {t.disagreements == 0 && secs < 300, s.str()};
}

}  // namespace acceptance
