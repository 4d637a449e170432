#pragma once

// Per-function control-flow graphs with one statement or branch guard per
// edge.

#include <set>
#include <string>
#include <vector>

#include "shape/frontend/ast.hpp"

namespace shape {

using NodeId = int;

struct EdgeLabel {
  enum Kind { Stmt, Assume, AssumeNot } kind = Stmt;
  /// For Stmt: a simple statement (never If or While).
  ast::Stmt stmt;
  /// For Assume and AssumeNot.
  ast::Cond cond;
  ast::SourceLoc loc;
};

struct Edge {
  NodeId src = 0;
  EdgeLabel label;
  NodeId dst = 0;
};

struct CFG {
  std::string function;
  int num_nodes = 0;
  std::vector<Edge> edges;
  NodeId entry = 0;
  /// -1 when no path leaves the function.
  NodeId exit = -1;
  std::set<NodeId> loop_heads;

  std::vector<const Edge*> out_edges(NodeId n) const;
  std::vector<const Edge*> in_edges(NodeId n) const;
  /// Reverse postorder of a depth-first traversal from entry.
  std::vector<NodeId> reverse_postorder() const;
};

CFG build_cfg(const ast::FunDef& f);

/// Graphviz rendering; loop heads are drawn as double circles.
std::string to_dot(const CFG& g);

/// Text of an edge label as shown in traces and DOT output.
std::string to_string(const EdgeLabel& l);

}  // namespace shape
