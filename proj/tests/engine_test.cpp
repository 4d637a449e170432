#include <gtest/gtest.h>

#include <random>

#include "acceptance/fold_generator.hpp"
#include "shape/cfg/cfg.hpp"
#include "shape/engine/engine.hpp"
#include "shape/formula/ops.hpp"
#include "shape/frontend/frontend.hpp"
#include "shape/solver/solver.hpp"

using namespace shape;

namespace {

SymbolicHeap F(const char* s) { return parse_formula(s); }

SymbolicHeap canon(const SymbolicHeap& h) { return *normalize_canonical(h); }

bool same(const SymbolicHeap& a, const SymbolicHeap& b) { return canon(a) == canon(b); }

// Every edge label of `main` in a fixed program, looked up by its text.
class Edges {
 public:
  Edges()
      : program_(parse_program(R"(
struct node { struct node* next; };
int main() {
  struct node* x;
  struct node* y;
  int i;
  x = malloc(sizeof(struct node));
  free(x);
  x = x->next;
  x->next = y;
  x = y;
  i = 5;
  i = i + 1;
  if (i < 2) { i = 0; }
  if (x == y) { i = 1; }
  return 0;
}
)")),
        cfg_(build_cfg(program_.functions.front())) {
    ctx_.program = &program_;
    ctx_.function = &program_.functions.front();
  }

  TransferResult run(const std::string& text, const SymbolicHeap& h, int int_range = 5) {
    TransferContext ctx = ctx_;
    ctx.int_range = int_range;
    for (const auto& e : cfg_.edges)
      if (to_string(e.label) == text) return transfer(ctx, e.label, h);
    ADD_FAILURE() << "no edge " << text;
    return {};
  }

 private:
  ast::Program program_;
  CFG cfg_;
  TransferContext ctx_;
};

Report analyze(const std::string& source, Options opts = {}) { return analyze_program(parse_program(source), opts); }

const char* kDoubleFree = R"(
struct node { struct node* next; };
int main() {
  struct node* x;
  x = malloc(sizeof(struct node));
  free(x);
  free(x);
  return 0;
}
)";

const char* kNondetBuild = R"(
struct node { struct node* next; };
int main() {
  struct node* head;
  struct node* n;
  while (nondet()) {
    n = malloc(sizeof(struct node));
    n->next = head;
    head = n;
  }
  while (head != NULL) {
    n = head;
    head = head->next;
    free(n);
  }
  return 0;
}
)";

}  // namespace

// ---- materialization ----

TEST(Materialize, SegmentOfTwoOrMoreHasOneBranch) {
  auto m = materialize(F("ls(2+; x, nil)"), "x");
  ASSERT_EQ(m.cells.size(), 1u);
  EXPECT_TRUE(m.null.empty());
  EXPECT_FALSE(m.freed);
  EXPECT_FALSE(m.dangling);
  EXPECT_TRUE(same(m.cells[0], F("E y . x != nil & x -> (next: y) * ls(1+; y, nil)")))
      << to_string(m.cells[0]);
}

TEST(Materialize, PossiblyEmptySegmentSplits) {
  // One cell, or one cell followed by a nonempty rest.
  auto m = materialize(F("ls(0+; x, nil)"), "x");
  EXPECT_EQ(m.cells.size(), 2u);
  EXPECT_EQ(m.null.size(), 1u);
}

TEST(Materialize, NilAndFreed) {
  auto n = materialize(F("nil = x"), "x");
  EXPECT_TRUE(n.cells.empty());
  EXPECT_EQ(n.null.size(), 1u);
  auto f = materialize(F("freed(x)"), "x");
  EXPECT_TRUE(f.freed);
  EXPECT_TRUE(f.cells.empty());
}

TEST(Materialize, UnconstrainedPointerIsCaseSplit) {
  auto m = materialize(F("y -> (next: nil)"), "x");
  ASSERT_EQ(m.cells.size(), 1u);
  EXPECT_EQ(m.null.size(), 1u);
  EXPECT_TRUE(m.dangling);
}

TEST(Materialize, EveryBranchEntailsTheInput) {
  for (const char* text : {"ls(2+; x, nil)", "ls(0+; x, y) * y -> (next: nil)", "dls(1+; x, l, nil, nil)",
                           "dls(2+; f, x, nil, nil)", "nls(1+; x, nil, nil)"}) {
    SymbolicHeap h = F(text);
    auto m = materialize(h, "x");
    EXPECT_FALSE(m.cells.empty()) << text;
    for (const auto& c : m.cells) EXPECT_TRUE(check_entail(c, h).valid) << text << "  ~>  " << to_string(c);
    for (const auto& c : m.null) EXPECT_TRUE(check_entail(c, h).valid) << text << "  ~>  " << to_string(c);
  }
}

// ---- transfer ----

TEST(Transfer, FreeOfCellLeavesFreedMarker) {
  Edges e;
  auto r = e.run("free(x);", F("x -> (next: nil)"));
  EXPECT_TRUE(r.faults.empty());
  ASSERT_EQ(r.next.size(), 1u);
  EXPECT_TRUE(same(r.next[0].heap, F("freed(x)"))) << to_string(r.next[0].heap);
}

TEST(Transfer, FreeOfNullIsNoOp) {
  Edges e;
  auto r = e.run("free(x);", F("nil = x"));
  EXPECT_TRUE(r.faults.empty());
  ASSERT_EQ(r.next.size(), 1u);
}

TEST(Transfer, DoubleFreeIsDefinite) {
  Edges e;
  auto r = e.run("free(x);", F("freed(x)"));
  ASSERT_EQ(r.faults.size(), 1u);
  EXPECT_EQ(r.faults[0].property, Property::ValidFree);
  EXPECT_TRUE(r.faults[0].definite);
  EXPECT_TRUE(r.next.empty());
}

TEST(Transfer, LoadThroughFreedOrNull) {
  Edges e;
  auto a = e.run("x = x->next;", F("freed(x)"));
  ASSERT_EQ(a.faults.size(), 1u);
  EXPECT_EQ(a.faults[0].property, Property::ValidDeref);
  auto b = e.run("x->next = y;", F("nil = x"));
  ASSERT_EQ(b.faults.size(), 1u);
  EXPECT_EQ(b.faults[0].property, Property::ValidDeref);
}

TEST(Transfer, LoadWalksOneCell) {
  Edges e;
  auto r = e.run("x = x->next;", F("E a . x -> (next: a) * a -> (next: nil)"));
  EXPECT_TRUE(r.faults.empty());
  ASSERT_EQ(r.next.size(), 1u);
  // The old cell of x stays, under a fresh existential name.
  EXPECT_TRUE(check_entail(r.next[0].heap, F("E a . a -> (next: x) * x -> (next: nil)")).valid)
      << to_string(r.next[0].heap);
}

TEST(Transfer, MallocAddsFreshCell) {
  Edges e;
  auto r = e.run("x = malloc(sizeof(struct node));", F("emp"));
  ASSERT_EQ(r.next.size(), 1u);
  EXPECT_EQ(alloc_count(r.next[0].heap), 1);
  EXPECT_TRUE(check_entail(r.next[0].heap, F("E a . x -> (next: a)")).valid);
}

TEST(Transfer, IntegersOutsideTheRangeBecomeUnknown) {
  Edges e;
  auto in = e.run("i = i + 1;", F("i = 4"));
  ASSERT_EQ(in.next.size(), 1u);
  EXPECT_TRUE(same(in.next[0].heap, F("i = 5")));
  auto out = e.run("i = i + 1;", F("i = 5"));
  ASSERT_EQ(out.next.size(), 1u);
  EXPECT_TRUE(same(out.next[0].heap, F("emp"))) << to_string(out.next[0].heap);
  auto wide = e.run("i = i + 1;", F("i = 5"), 6);
  EXPECT_TRUE(same(wide.next[0].heap, F("i = 6")));
}

TEST(Transfer, IntegerConditions) {
  Edges e;
  EXPECT_TRUE(e.run("assume(i < 2)", F("i = 3")).next.empty());
  EXPECT_EQ(e.run("assume(!(i < 2))", F("i = 3")).next.size(), 1u);
  auto unknown = e.run("assume(i < 2)", F("emp"));
  ASSERT_EQ(unknown.next.size(), 1u);
  EXPECT_TRUE(unknown.next[0].imprecise);
}

TEST(Transfer, PointerConditions) {
  Edges e;
  EXPECT_TRUE(e.run("assume(x == y)", F("x != y & emp")).next.empty());
  auto r = e.run("assume(x == y)", F("x -> (next: nil) * y -> (next: nil)"));
  EXPECT_TRUE(r.next.empty());
  auto ok = e.run("assume(!(x == y))", F("x -> (next: nil) * y -> (next: nil)"));
  ASSERT_EQ(ok.next.size(), 1u);
  EXPECT_FALSE(ok.next[0].imprecise);
}

TEST(Transfer, FrameIsPreserved) {
  // Statements on x and y never touch an unrelated cell of w.
  Edges e;
  acceptance::FoldGenerator gen(7);
  const SpatialAtom frame = PointsTo{"w", {{"next", Var::nil()}}};
  for (int k = 0; k < 40; ++k) {
    SymbolicHeap h = gen.next();
    std::erase_if(h.spatial, [](const SpatialAtom& a) { return mentions(a, Var{"w"}); });
    h.spatial.push_back(frame);
    auto n = normalize(h);
    if (!n) continue;
    for (const char* stmt : {"x = x->next;", "x->next = y;", "free(x);", "x = y;"}) {
      auto r = e.run(stmt, *n);
      for (const auto& s : r.next) {
        auto it = std::find(s.heap.spatial.begin(), s.heap.spatial.end(), frame);
        EXPECT_NE(it, s.heap.spatial.end()) << stmt << " on " << to_string(*n) << "  ~>  " << to_string(s.heap);
      }
    }
  }
}

// ---- garbage ----

TEST(Garbage, UnreachableCellLeaks) {
  auto r = collect_garbage(F("E a . a -> (next: nil) * x -> (next: nil)"));
  ASSERT_EQ(r.faults.size(), 1u);
  EXPECT_EQ(r.faults[0].property, Property::ValidMemtrack);
  ASSERT_EQ(r.next.size(), 1u);
  EXPECT_TRUE(same(r.next[0].heap, F("x -> (next: nil)")));
}

TEST(Garbage, PossiblyEmptySegmentSplits) {
  auto r = collect_garbage(F("E a . ls(0+; a, nil)"));
  EXPECT_EQ(r.faults.size(), 1u);
  ASSERT_EQ(r.next.size(), 1u);
  EXPECT_TRUE(same(r.next[0].heap, F("emp")));
}

TEST(Garbage, UnreachableFreedIsDropped) {
  auto r = collect_garbage(F("E a . freed(a) * x -> (next: nil)"));
  EXPECT_TRUE(r.faults.empty());
  ASSERT_EQ(r.next.size(), 1u);
  EXPECT_TRUE(same(r.next[0].heap, F("x -> (next: nil)")));
}

// ---- join ----

TEST(Join, PrunesEntailedHeaps) {
  StateSet cur{{F("x -> (next: nil)")}};
  StateSet in{{F("ls(1+; x, nil)")}};
  auto j = join(cur, in);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_TRUE(same(j.heaps[0], F("ls(1+; x, nil)")));
  EXPECT_TRUE(is_fixpoint(cur, in));
  EXPECT_FALSE(is_fixpoint(in, cur));
}

TEST(Join, KeepsIncomparableHeaps) {
  auto j = join(StateSet{{F("nil = x")}}, StateSet{{F("x -> (next: nil)")}});
  EXPECT_EQ(j.size(), 2u);
}

TEST(Join, IsAnUpperBound) {
  acceptance::FoldGenerator gen(11);
  for (int k = 0; k < 20; ++k) {
    StateSet a, b;
    for (int i = 0; i < 2; ++i) {
      if (auto h = normalize(gen.next())) a.insert(*h);
      if (auto h = normalize(gen.next())) b.insert(*h);
    }
    auto j = join(a, b);
    EXPECT_TRUE(is_fixpoint(a, j));
    EXPECT_TRUE(is_fixpoint(b, j));
    EXPECT_LE(j.size(), a.size() + b.size());
  }
}

// ---- summaries ----

TEST(Summary, SplitSeparatesFrame) {
  auto s = split_at_call(F("x -> (next: y) * y -> (next: nil) * z -> (next: nil)"), {ArgValue{true, "x", {}}});
  EXPECT_EQ(alloc_count(s.pre), 2);
  EXPECT_TRUE(same(s.frame, F("z -> (next: nil)"))) << to_string(s.frame);
  EXPECT_EQ(s.back.at("_p0"), Var{"x"});
}

TEST(Summary, EmptyPreconditionApplies) {
  Summary s{"make", F("emp"), {{F("E a . _ret -> (next: a)"), false}}, {}};
  auto r = apply_summary(s, {}, F("y -> (next: nil)"));
  ASSERT_TRUE(r);
  ASSERT_EQ(r->size(), 1u);
  EXPECT_TRUE(check_entail((*r)[0].heap, F("E a . _cr -> (next: a) * y -> (next: nil)")).valid)
      << to_string((*r)[0].heap);
}

TEST(Summary, MismatchedPreconditionIsRejected) {
  Summary s{"destroy", canon(F("ls(1+; _p0, nil)")), {{F("emp"), false}}, {}};
  EXPECT_FALSE(apply_summary(s, {ArgValue{true, "x", {}}}, F("x -> (next: nil)")));
  auto r = apply_summary(s, {ArgValue{true, "x", {}}}, F("ls(1+; x, nil) * y -> (next: nil)"));
  ASSERT_TRUE(r);
  ASSERT_EQ(r->size(), 1u);
  EXPECT_TRUE(same((*r)[0].heap, F("y -> (next: nil)"))) << to_string((*r)[0].heap);
}

// ---- whole programs ----

TEST(Analyze, DoubleFreeTrace) {
  auto r = analyze(kDoubleFree);
  const auto& v = r.verdict(Property::ValidFree);
  EXPECT_EQ(v.outcome, Outcome::False);
  ASSERT_EQ(v.trace.size(), 3u);
  EXPECT_EQ(v.trace[0].text, "x = malloc(sizeof(struct node));");
  EXPECT_EQ(v.trace[2].text, "free(x);");
  EXPECT_EQ(v.trace[2].loc.line, 7);
  EXPECT_EQ(r.verdict(Property::ValidDeref).outcome, Outcome::True);
}

TEST(Analyze, TracesOnlyForFalse) {
  auto r = analyze(kNondetBuild);
  for (const auto& v : r.verdicts) {
    EXPECT_EQ(v.outcome, Outcome::True);
    EXPECT_TRUE(v.trace.empty());
  }
}

TEST(Analyze, UnboundedLoopNeedsAbstraction) {
  Options o;
  o.abstraction = false;
  o.loop_ceiling = 20;
  EXPECT_THROW(analyze(kNondetBuild, o), LoopCeilingExceeded);
}

TEST(Analyze, BoundedLoopWithoutAbstraction) {
  Options o;
  o.abstraction = false;
  auto r = analyze(R"(
struct node { struct node* next; };
int main() {
  struct node* h;
  struct node* n;
  int i;
  i = 0;
  while (i < 3) {
    n = malloc(sizeof(struct node));
    n->next = h;
    h = n;
    i = i + 1;
  }
  while (h != NULL) {
    n = h->next;
    free(h);
    h = n;
  }
  return 0;
}
)",
                   o);
  for (const auto& v : r.verdicts) EXPECT_EQ(v.outcome, Outcome::True) << to_string(v.property);
}

TEST(Analyze, SummariesAreReused) {
  auto r = analyze(R"(
struct node { struct node* next; };
struct node* cell() {
  struct node* c;
  c = malloc(sizeof(struct node));
  c->next = NULL;
  return c;
}
int main() {
  struct node* a;
  struct node* b;
  a = cell();
  b = cell();
  free(a);
  free(b);
  return 0;
}
)");
  EXPECT_EQ(r.stats.analyses.at("cell"), 1);
  EXPECT_EQ(r.stats.summary_hits.at("cell"), 1);
  for (const auto& v : r.verdicts) EXPECT_EQ(v.outcome, Outcome::True) << to_string(v.property);
}

TEST(Analyze, FaultInCalleeHasTraceThroughCall) {
  auto r = analyze(R"(
struct node { struct node* next; };
void drop(struct node* p) {
  free(p);
}
int main() {
  struct node* a;
  a = malloc(sizeof(struct node));
  drop(a);
  free(a);
  return 0;
}
)");
  const auto& v = r.verdict(Property::ValidFree);
  ASSERT_EQ(v.outcome, Outcome::False);
  EXPECT_EQ(v.trace.back().text, "free(a);");
}

TEST(Analyze, StatesJson) {
  Options o;
  o.record_states = true;
  auto r = analyze(kDoubleFree, o);
  auto text = states_to_json(r);
  EXPECT_NE(text.find("\"functions\""), std::string::npos);
  EXPECT_NE(text.find("\"main\""), std::string::npos);
}

TEST(Properties, Names) {
  for (auto p : all_properties()) EXPECT_EQ(parse_property(to_string(p)), p);
  EXPECT_FALSE(parse_property("valid-everything"));
  EXPECT_EQ(to_string(Outcome::Unknown), "UNKNOWN");
}
