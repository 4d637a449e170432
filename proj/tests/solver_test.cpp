#include <gtest/gtest.h>

#include "family.hpp"
#include "oracle/oracle.hpp"
#include "shape/solver/batch.hpp"
#include "shape/formula/ops.hpp"
#include "shape/solver/solver.hpp"

using namespace shape;

namespace {

SymbolicHeap F(const char* s) { return parse_formula(s); }

bool sat(const char* s) { return check_sat(F(s)).sat; }

bool entails(const char* l, const char* r) { return check_entail(F(l), F(r)).valid; }

HeapModel chain(std::vector<Loc> next_of, Loc x) {
  HeapModel m;
  m.num_locations = static_cast<int>(next_of.size());
  m.stack[Var{"x"}] = x;
  for (std::size_t i = 0; i < next_of.size(); ++i)
    m.heap[static_cast<Loc>(i + 1)] = Cell{{{"next", Ptr{next_of[i]}}}};
  return m;
}

}  // namespace

TEST(Bound, Examples) {
  EXPECT_EQ(compute_bound(F("x -> (next: nil)")).max_locations, 3);
  EXPECT_EQ(compute_bound(F("emp")).max_locations, 1);
  EXPECT_EQ(compute_bound(F("ls(2+; x, nil)")).max_locations, 6);
}

TEST(Satisfies, Examples) {
  HeapModel one = chain({kNilLoc}, 1);
  EXPECT_TRUE(satisfies(one, F("x -> (next: nil)")));
  EXPECT_FALSE(satisfies(one, F("ls(2+; x, nil)")));
  HeapModel two = chain({2, kNilLoc}, 1);
  EXPECT_TRUE(satisfies(two, F("E y . x -> (next: y) * ls(1+; y, nil)")));
  EXPECT_TRUE(satisfies(two, F("ls(2+; x, nil)")));
  EXPECT_FALSE(satisfies(two, F("x -> (next: nil)")));
}

TEST(CheckSat, Examples) {
  EXPECT_FALSE(sat("x -> (next: nil) * x -> (next: nil)"));
  EXPECT_FALSE(sat("ls(1+; x, x)"));
  auto r = check_sat(F("ls(0+; x, y)"));
  ASSERT_TRUE(r.sat);
  ASSERT_TRUE(r.model);
  EXPECT_TRUE(r.model->heap.empty());
  EXPECT_EQ(r.model->stack.at(Var{"x"}), r.model->stack.at(Var{"y"}));
  EXPECT_FALSE(sat("freed(x) * x -> (next: nil)"));
  EXPECT_TRUE(sat("emp"));
}

TEST(CheckSat, ModelsReplay) {
  for (const char* s : {"ls(2+; x, nil)", "E y . x -> (next: y) * ls(1+; y, nil)",
                        "dls(2+; x, y, nil, nil)", "nls(1+; x, nil, nil)", "x -> (d: 3, next: nil) * freed(y)"}) {
    auto r = check_sat(F(s));
    ASSERT_TRUE(r.sat) << s;
    EXPECT_TRUE(r.model->well_formed()) << s;
    EXPECT_TRUE(satisfies(*r.model, F(s))) << s;
  }
}

TEST(CheckEntail, Examples) {
  EXPECT_TRUE(entails("x -> (next: z) & z = nil", "ls(1+; x, nil)"));
  EXPECT_FALSE(entails("E y . ls(1+; x, y) * y -> (next: z)", "ls(2+; x, z)"));
  EXPECT_TRUE(entails("ls(2+; x, nil)", "ls(1+; x, nil)"));
  EXPECT_FALSE(entails("ls(1+; x, nil)", "ls(2+; x, nil)"));
  EXPECT_TRUE(entails("E y . x -> (next: y) * y -> (next: nil)", "ls(2+; x, nil)"));
}

// The acyclicity premise x != z alone does not make the two-step fold valid:
// z may be an inner cell of the first segment, or the cell y itself.
TEST(CheckEntail, DisequalityAloneDoesNotJustifyFold) {
  auto r = check_entail(F("E y . x != z & ls(1+; x, y) * y -> (next: z)"), F("ls(2+; x, z)"));
  EXPECT_FALSE(r.valid);
  ASSERT_TRUE(r.counter_model);
  EXPECT_TRUE(satisfies(*r.counter_model, F("E y . x != z & ls(1+; x, y) * y -> (next: z)")));
  EXPECT_TRUE(entails("E y . x != z & ls(1+; x, y) * y -> (next: z) * z -> (next: nil)",
                      "ls(2+; x, z) * z -> (next: nil)"));
}

TEST(CheckEntail, EmpAsRhs) {
  EXPECT_TRUE(entails("ls(0+; x, x)", "emp"));
  EXPECT_FALSE(entails("ls(0+; x, y)", "emp"));
  EXPECT_TRUE(entails("x = y & ls(0+; x, y)", "emp"));
}

TEST(CheckEntail, Dll) {
  EXPECT_TRUE(entails("E y . x -> (next: y, prev: nil) * y -> (next: z, prev: x) * z -> (next: nil, prev: y)",
                      "E y . dls(2+; x, y, nil, z) * z -> (next: nil, prev: y)"));
  // p may be x itself, which a segment forbids for its outer prev pointer.
  EXPECT_FALSE(entails("E y . x -> (next: y, prev: p) * y -> (next: z, prev: x) * z -> (next: nil, prev: y)",
                       "E y . dls(2+; x, y, p, z) * z -> (next: nil, prev: y)"));
  EXPECT_TRUE(entails("dls(2+; x, y, nil, nil)", "dls(1+; x, y, nil, nil)"));
  EXPECT_FALSE(entails("dls(0+; x, y, nil, nil)", "dls(1+; x, y, nil, nil)"));
}

TEST(CheckEntail, Nll) {
  EXPECT_TRUE(entails("E y w u v . x -> (nested: w, next: y) * ls(0+; w, nil) * y -> (nested: u, next: nil) * u -> (next: nil)",
                      "nls(2+; x, nil, nil)"));
  EXPECT_FALSE(entails("nls(1+; x, nil, nil)", "nls(2+; x, nil, nil)"));
}

TEST(EntailsDisequality, Basic) {
  EXPECT_TRUE(entails_disequality(F("x -> (next: nil)"), Var{"x"}, Var::nil()));
  EXPECT_TRUE(entails_disequality(F("x -> (next: nil) * y -> (next: nil)"), Var{"x"}, Var{"y"}));
  EXPECT_FALSE(entails_disequality(F("ls(0+; x, nil)"), Var{"x"}, Var::nil()));
}

TEST(Oracle, AgreesOnExamples) {
  for (const char* s : {"emp", "x -> (next: nil)", "ls(1+; x, x)", "ls(2+; x, nil)", "freed(x) * x -> (next: nil)",
                        "E y . x -> (next: y) * y -> (next: x)", "dls(1+; x, x, nil, nil)", "nls(1+; x, nil, nil)"}) {
    auto h = F(s);
    int size = std::min(compute_bound(h).max_locations + 2, 8);
    EXPECT_EQ(check_sat(h).sat, oracle::check_sat(h, size).has_value()) << s;
  }
}

namespace {

// Family members with at most one spatial atom: small enough for full
// entailment matrices.
std::vector<SymbolicHeap> small_family() {
  std::vector<SymbolicHeap> out;
  for (const auto& h : family::pairwise())
    if (h.spatial.size() <= 1) out.push_back(h);
  return out;
}

}  // namespace

TEST(Batch, SerialAndParallelAgree) {
  auto hs = small_family();
  EXPECT_EQ(check_sat_all(hs, Execution::Serial), check_sat_all(hs, Execution::Parallel));
  EXPECT_EQ(entailment_matrix(hs, Execution::Serial), entailment_matrix(hs, Execution::Parallel));
}

TEST(Batch, MatchesSingleQueries) {
  auto hs = small_family();
  auto sat = check_sat_all(hs);
  auto ent = entailment_matrix(hs);
  const std::size_t n = hs.size();
  for (std::size_t i = 0; i < n; i += 7) {
    EXPECT_EQ(static_cast<bool>(sat[i]), check_sat(hs[i]).sat) << to_string(hs[i]);
    for (std::size_t j = 0; j < n; j += 11)
      EXPECT_EQ(static_cast<bool>(ent[i * n + j]), check_entail(hs[i], hs[j]).valid)
          << to_string(hs[i]) << " |- " << to_string(hs[j]);
  }
}

TEST(CheckEntail, ReflexiveAndTransitive) {
  auto hs = small_family();
  auto ent = entailment_matrix(hs);
  const std::size_t n = hs.size();
  for (std::size_t i = 0; i < n; ++i) EXPECT_TRUE(ent[i * n + i]) << to_string(hs[i]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!ent[i * n + j]) continue;
      for (std::size_t k = 0; k < n; ++k)
        if (ent[j * n + k]) EXPECT_TRUE(ent[i * n + k]) << to_string(hs[i]) << " / " << to_string(hs[k]);
    }
}

TEST(CheckEntail, EmpOnlyForEmptyHeaps) {
  // h |= emp iff every model of h has an empty heap, checked by the oracle.
  auto emp = F("emp");
  for (const auto& h : small_family()) {
    int size = std::min(compute_bound(h).max_locations + 2, 8);
    bool only_empty = !oracle::check_sat(h, size) || oracle::check_entail(h, emp, size).valid;
    EXPECT_EQ(check_entail(h, emp).valid, only_empty) << to_string(h);
  }
}

TEST(CheckSat, ModelsReplayOnTheFamily) {
  for (const auto& h : family::with_existential()) {
    auto r = check_sat(h);
    if (r.sat) {
      ASSERT_TRUE(r.model);
      EXPECT_TRUE(satisfies(*r.model, h)) << to_string(h);
      EXPECT_TRUE(r.model->well_formed());
    }
  }
}

TEST(CheckEntail, CounterModelsReplay) {
  auto hs = small_family();
  for (std::size_t i = 0; i < hs.size(); i += 5)
    for (std::size_t j = 0; j < hs.size(); j += 13) {
      auto r = check_entail(hs[i], hs[j]);
      if (r.valid) continue;
      ASSERT_TRUE(r.counter_model);
      EXPECT_TRUE(satisfies(*r.counter_model, hs[i])) << to_string(hs[i]);
      EXPECT_FALSE(satisfies(*r.counter_model, hs[j])) << to_string(hs[i]) << " |- " << to_string(hs[j]);
    }
}
