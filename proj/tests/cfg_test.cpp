#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "shape/cfg/cfg.hpp"
#include "shape/frontend/frontend.hpp"

using namespace shape;

namespace {

CFG main_cfg(const std::string& body) {
  auto p = parse_program("struct n { struct n* next; };\nint main() {\n" + body + "\n}");
  return build_cfg(p.functions.back());
}

std::set<NodeId> reachable(const CFG& g, NodeId from, const std::set<std::pair<NodeId, NodeId>>& skip = {},
                           NodeId removed = -1) {
  std::set<NodeId> seen;
  std::vector<NodeId> todo;
  if (from != removed) todo.push_back(from);
  while (!todo.empty()) {
    NodeId n = todo.back();
    todo.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto* e : g.out_edges(n))
      if (e->dst != removed && !skip.count({e->src, e->dst})) todo.push_back(e->dst);
  }
  return seen;
}

// d dominates n iff n is unreachable from entry once d is removed.
bool dominates(const CFG& g, NodeId d, NodeId n) { return d == n || !reachable(g, g.entry, {}, d).count(n); }

// Back edges of a depth-first traversal from entry.
std::set<std::pair<NodeId, NodeId>> back_edges(const CFG& g) {
  std::set<std::pair<NodeId, NodeId>> out;
  std::vector<int> state(g.num_nodes, 0);
  std::function<void(NodeId)> dfs = [&](NodeId n) {
    state[n] = 1;
    for (const auto* e : g.out_edges(n)) {
      if (state[e->dst] == 1) out.insert({n, e->dst});
      if (state[e->dst] == 0) dfs(e->dst);
    }
    state[n] = 2;
  };
  dfs(g.entry);
  return out;
}

int branch_pairs(const CFG& g) {
  int n = 0;
  for (const auto& e : g.edges) n += e.label.kind == EdgeLabel::Assume;
  return n;
}

void check_invariants(const CFG& g) {
  EXPECT_EQ(reachable(g, g.entry).size(), static_cast<std::size_t>(g.num_nodes));
  EXPECT_TRUE(g.in_edges(g.entry).empty() || g.loop_heads.count(g.entry));
  if (g.exit >= 0) EXPECT_TRUE(g.out_edges(g.exit).empty());
  EXPECT_EQ(static_cast<int>(g.edges.size()), g.num_nodes - 1 + branch_pairs(g));
  auto back = back_edges(g);
  std::set<NodeId> heads;
  for (const auto& [s, d] : back) heads.insert(d);
  EXPECT_EQ(heads, g.loop_heads);
  // Without back edges nothing returns to a node it left.
  for (NodeId n = 0; n < g.num_nodes; ++n)
    for (const auto* e : g.out_edges(n))
      if (!back.count({e->src, e->dst})) EXPECT_FALSE(reachable(g, e->dst, back).count(n));
  auto rpo = g.reverse_postorder();
  EXPECT_EQ(rpo.size(), static_cast<std::size_t>(g.num_nodes));
  EXPECT_EQ(rpo.front(), g.entry);
}

}  // namespace

TEST(Cfg, StraightLineIsAChain) {
  auto g = main_cfg("struct n* x;\nx = NULL;\nx = malloc(sizeof(struct n));\nfree(x);\nreturn 0;");
  EXPECT_EQ(g.num_nodes, 5);
  EXPECT_EQ(g.edges.size(), 4u);
  EXPECT_TRUE(g.loop_heads.empty());
  check_invariants(g);
}

TEST(Cfg, SingleLoop) {
  auto g = main_cfg("int i;\ni = 0;\nwhile (i < 3) { i = i + 1; }\nreturn 0;");
  ASSERT_EQ(g.loop_heads.size(), 1u);
  NodeId head = *g.loop_heads.begin();
  auto out = g.out_edges(head);
  ASSERT_EQ(out.size(), 2u);
  std::set<EdgeLabel::Kind> kinds{out[0]->label.kind, out[1]->label.kind};
  EXPECT_EQ(kinds, (std::set<EdgeLabel::Kind>{EdgeLabel::Assume, EdgeLabel::AssumeNot}));
  check_invariants(g);
}

TEST(Cfg, NestedLoops) {
  auto g = main_cfg("int i;\nint j;\nwhile (i < 3) {\n j = 0;\n while (j < 2) { j = j + 1; }\n i = i + 1;\n}\nreturn 0;");
  ASSERT_EQ(g.loop_heads.size(), 2u);
  auto rpo = g.reverse_postorder();
  NodeId outer = -1, inner = -1;
  for (auto n : rpo)
    if (g.loop_heads.count(n)) (outer < 0 ? outer : inner) = n;
  EXPECT_TRUE(dominates(g, outer, inner));
  EXPECT_FALSE(dominates(g, inner, outer));
  check_invariants(g);
}

TEST(Cfg, IfDiamond) {
  auto g = main_cfg("int i;\nif (i == 0) { i = 1; } else { i = 2; }\nreturn 0;");
  EXPECT_TRUE(g.loop_heads.empty());
  int assumes = 0;
  for (const auto& e : g.edges) assumes += e.label.kind != EdgeLabel::Stmt;
  EXPECT_EQ(assumes, 2);
  check_invariants(g);
}

TEST(Cfg, EarlyReturnInLoop) {
  auto g = main_cfg("int i;\nwhile (nondet()) { if (i == 1) { return 1; } i = 1; }\nreturn 0;");
  EXPECT_EQ(g.loop_heads.size(), 1u);
  check_invariants(g);
}

TEST(Cfg, LabelsKeepSourceLines) {
  auto g = main_cfg("struct n* x;\nx = NULL;\nreturn 0;");
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(to_string(g.edges[0].label), "x = NULL;");
  EXPECT_EQ(g.edges[0].label.loc.line, 4);
}

TEST(Cfg, CorpusInvariants) {
  for (const auto& entry : std::filesystem::directory_iterator(SHAPE_CORPUS_DIR)) {
    std::ifstream in(entry.path());
    std::ostringstream s;
    s << in.rdbuf();
    ast::Program p;
    try {
      p = parse_program(s.str());
    } catch (const UnsupportedFeature&) {
      continue;
    }
    for (const auto& f : p.functions) {
      SCOPED_TRACE(entry.path().string() + " " + f.name);
      auto g = build_cfg(f);
      check_invariants(g);
      EXPECT_NE(to_dot(g).find("digraph"), std::string::npos);
    }
  }
}
