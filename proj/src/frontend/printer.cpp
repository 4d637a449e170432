#include <sstream>

#include "shape/frontend/frontend.hpp"
#include "shape/util/overloaded.hpp"

namespace shape {

using namespace ast;

namespace {

std::string type_str(const Type& t) {
  switch (t.kind) {
    case Type::Void:
      return "void";
    case Type::Int:
      return "int";
    case Type::Ptr:
      return "struct " + t.struct_name + "*";
  }
  return "";
}

std::string operand(const Operand& o) {
  switch (o.kind) {
    case Operand::Var:
      return o.name;
    case Operand::Null:
      return "NULL";
    case Operand::Int:
      return std::to_string(o.value);
  }
  return "";
}

std::string args(const std::vector<Operand>& as) {
  std::string s = "(";
  for (std::size_t i = 0; i < as.size(); ++i) s += (i ? ", " : "") + operand(as[i]);
  return s + ")";
}

std::string cond(const Cond& c) {
  static const char* ops[] = {"==", "!=", "<", "<="};
  if (c.op == Cond::Nondet) return "nondet()";
  return operand(c.a) + " " + ops[c.op] + " " + operand(c.b);
}

std::string rhs(const Rhs& r) {
  return std::visit(overloaded{
                        [](const NullRhs&) { return std::string("NULL"); },
                        [](const VarRhs& v) { return v.name; },
                        [](const IntRhs& i) { return std::to_string(i.value); },
                        [](const LoadRhs& l) { return l.var + "->" + l.field; },
                        [](const MallocRhs& m) { return "malloc(sizeof(struct " + m.struct_name + "))"; },
                        [](const CallRhs& c) { return c.fn + args(c.args); },
                        [](const NondetRhs&) { return std::string("nondet()"); },
                    },
                    r);
}

void block(std::ostringstream& os, const Block& b, int depth);

void stmt(std::ostringstream& os, const Stmt& s, int depth) {
  std::string pad(2 * depth, ' ');
  std::visit(overloaded{
                 [&](const VarAssign& a) { os << pad << a.var << " = " << rhs(a.rhs) << ";\n"; },
                 [&](const FieldStore& st) { os << pad << st.var << "->" << st.field << " = " << operand(st.value) << ";\n"; },
                 [&](const Free& f) { os << pad << "free(" << f.var << ");\n"; },
                 [&](const If& n) {
                   os << pad << "if (" << cond(n.cond) << ") {\n";
                   block(os, n.then_body, depth + 1);
                   os << pad << "}";
                   if (n.else_body) {
                     os << " else {\n";
                     block(os, *n.else_body, depth + 1);
                     os << pad << "}";
                   }
                   os << "\n";
                 },
                 [&](const While& w) {
                   os << pad << "while (" << cond(w.cond) << ") {\n";
                   block(os, w.body, depth + 1);
                   os << pad << "}\n";
                 },
                 [&](const Return& r) { os << pad << "return" << (r.value ? " " + operand(*r.value) : "") << ";\n"; },
                 [&](const CallStmt& c) { os << pad << c.fn << args(c.args) << ";\n"; },
                 [&](const IntOp& op) {
                   os << pad << op.var << " = " << operand(op.first);
                   for (const auto& [c, b] : op.rest) os << " " << c << " " << operand(b);
                   os << ";\n";
                 },
             },
             s.node);
}

void block(std::ostringstream& os, const Block& b, int depth) {
  for (const auto& s : b) stmt(os, s, depth);
}

}  // namespace

std::string to_source(const Stmt& s) {
  std::ostringstream os;
  if (const auto* n = std::get_if<If>(&s.node)) return "if (" + cond(n->cond) + ")";
  if (const auto* w = std::get_if<While>(&s.node)) return "while (" + cond(w->cond) + ")";
  stmt(os, s, 0);
  std::string out = os.str();
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string to_source(const Cond& c) { return cond(c); }

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& s : p.structs) {
    os << "struct " << s.name << " {\n";
    for (const auto& f : s.fields) os << "  " << type_str(f.type) << " " << f.name << ";\n";
    os << "};\n\n";
  }
  for (const auto& f : p.functions) {
    os << type_str(f.return_type) << " " << f.name << "(";
    for (std::size_t i = 0; i < f.params.size(); ++i)
      os << (i ? ", " : "") << type_str(f.params[i].type) << " " << f.params[i].name;
    os << ") {\n";
    for (const auto& d : f.locals) os << "  " << type_str(d.type) << " " << d.name << ";\n";
    block(os, f.body, 1);
    os << "}\n\n";
  }
  return os.str();
}

}  // namespace shape
