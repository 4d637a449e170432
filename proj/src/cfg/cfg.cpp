#include "shape/cfg/cfg.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "shape/frontend/frontend.hpp"

namespace shape {

using namespace ast;

std::vector<const Edge*> CFG::out_edges(NodeId n) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges)
    if (e.src == n) out.push_back(&e);
  return out;
}

std::vector<const Edge*> CFG::in_edges(NodeId n) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges)
    if (e.dst == n) out.push_back(&e);
  return out;
}

std::vector<NodeId> CFG::reverse_postorder() const {
  std::vector<NodeId> post;
  std::vector<char> seen(num_nodes, 0);
  std::function<void(NodeId)> dfs = [&](NodeId n) {
    seen[n] = 1;
    for (const Edge* e : out_edges(n))
      if (!seen[e->dst]) dfs(e->dst);
    post.push_back(n);
  };
  dfs(entry);
  std::reverse(post.begin(), post.end());
  return post;
}

namespace {

class Builder {
 public:
  CFG build(const FunDef& f) {
    g_.function = f.name;
    NodeId entry = fresh();
    NodeId end = lower(f.body, entry);
    if (end >= 0) {
      Stmt ret;
      ret.node = Return{};
      ret.loc = f.loc;
      add(end, {EdgeLabel::Stmt, ret, {}, f.loc}, exit());
    }
    compact(entry);
    find_loop_heads();
    return g_;
  }

 private:
  NodeId fresh() { return next_++; }

  NodeId exit() {
    if (exit_ < 0) exit_ = fresh();
    return exit_;
  }

  void add(NodeId a, EdgeLabel l, NodeId b) { g_.edges.push_back({a, std::move(l), b}); }

  // Redirects every edge touching `from` to `to`.
  void merge(NodeId from, NodeId to) {
    for (auto& e : g_.edges) {
      if (e.src == from) e.src = to;
      if (e.dst == from) e.dst = to;
    }
    if (exit_ == from) exit_ = to;
  }

  // Lowers `b` starting at `cur`; returns the node after it, or -1 when
  // control cannot fall through.
  NodeId lower(const Block& b, NodeId cur) {
    for (const auto& s : b) {
      if (cur < 0) break;
      cur = lower(s, cur);
    }
    return cur;
  }

  NodeId lower(const Stmt& s, NodeId cur) {
    if (const auto* n = std::get_if<If>(&s.node)) {
      NodeId t = fresh();
      add(cur, {EdgeLabel::Assume, {}, n->cond, s.loc}, t);
      NodeId t_end = lower(n->then_body, t);
      NodeId e = fresh();
      add(cur, {EdgeLabel::AssumeNot, {}, n->cond, s.loc}, e);
      NodeId e_end = n->else_body ? lower(*n->else_body, e) : e;
      if (t_end < 0) return e_end;
      if (e_end < 0) return t_end;
      merge(e_end, t_end);
      return t_end;
    }
    if (const auto* w = std::get_if<While>(&s.node)) {
      NodeId head = cur;
      NodeId body = fresh();
      add(head, {EdgeLabel::Assume, {}, w->cond, s.loc}, body);
      NodeId body_end = lower(w->body, body);
      if (body_end >= 0) merge(body_end, head);
      NodeId after = fresh();
      add(head, {EdgeLabel::AssumeNot, {}, w->cond, s.loc}, after);
      return after;
    }
    if (std::holds_alternative<Return>(s.node)) {
      add(cur, {EdgeLabel::Stmt, s, {}, s.loc}, exit());
      return -1;
    }
    NodeId n = fresh();
    add(cur, {EdgeLabel::Stmt, s, {}, s.loc}, n);
    return n;
  }

  // Drops merged-away ids and numbers nodes in creation order.
  void compact(NodeId entry) {
    std::set<NodeId> live{entry};
    if (exit_ >= 0) live.insert(exit_);
    for (const auto& e : g_.edges) live.insert(e.src), live.insert(e.dst);
    std::map<NodeId, NodeId> id;
    for (NodeId n : live) id[n] = static_cast<NodeId>(id.size());
    for (auto& e : g_.edges) e.src = id[e.src], e.dst = id[e.dst];
    g_.num_nodes = static_cast<int>(id.size());
    g_.entry = id[entry];
    g_.exit = exit_ >= 0 ? id[exit_] : -1;
  }

  void find_loop_heads() {
    std::vector<int> state(g_.num_nodes, 0);
    std::function<void(NodeId)> dfs = [&](NodeId n) {
      state[n] = 1;
      for (const Edge* e : g_.out_edges(n)) {
        if (state[e->dst] == 1)
          g_.loop_heads.insert(e->dst);
        else if (state[e->dst] == 0)
          dfs(e->dst);
      }
      state[n] = 2;
    };
    dfs(g_.entry);
  }

  CFG g_;
  NodeId next_ = 0;
  NodeId exit_ = -1;
};

}  // namespace

CFG build_cfg(const FunDef& f) { return Builder().build(f); }

std::string to_string(const EdgeLabel& l) {
  switch (l.kind) {
    case EdgeLabel::Stmt:
      return to_source(l.stmt);
    case EdgeLabel::Assume:
      return "assume(" + to_source(l.cond) + ")";
    case EdgeLabel::AssumeNot:
      return "assume(!(" + to_source(l.cond) + "))";
  }
  return "";
}

std::string to_dot(const CFG& g) {
  std::ostringstream os;
  os << "digraph \"" << g.function << "\" {\n";
  for (NodeId n = 0; n < g.num_nodes; ++n) {
    os << "  n" << n << " [label=\"" << n << "\"";
    if (g.loop_heads.count(n)) os << ", shape=doublecircle";
    if (n == g.entry) os << ", style=bold";
    if (n == g.exit) os << ", shape=box";
    os << "];\n";
  }
  for (const auto& e : g.edges) {
    std::string label = to_string(e.label);
    std::string escaped;
    for (char c : label) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    os << "  n" << e.src << " -> n" << e.dst << " [label=\"" << escaped << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace shape
