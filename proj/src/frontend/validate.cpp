#include <functional>
#include <set>

#include "shape/frontend/frontend.hpp"
#include "shape/util/overloaded.hpp"

namespace shape {

using namespace ast;

const Decl* StructDef::field(const std::string& f) const {
  for (const auto& d : fields)
    if (d.name == f) return &d;
  return nullptr;
}

std::optional<Type> FunDef::type_of(const std::string& v) const {
  for (const auto& d : params)
    if (d.name == v) return d.type;
  for (const auto& d : locals)
    if (d.name == v) return d.type;
  return std::nullopt;
}

const StructDef* Program::find_struct(const std::string& name) const {
  for (const auto& s : structs)
    if (s.name == name) return &s;
  return nullptr;
}

const FunDef* Program::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

std::string to_string(StructKind::Kind k) {
  switch (k) {
    case StructKind::SLL:
      return "SLL";
    case StructKind::DLL:
      return "DLL";
    case StructKind::NLL:
      return "NLL";
    case StructKind::Plain:
      return "Plain";
  }
  return "?";
}

std::map<std::string, StructKind> classify_structs(const Program& p) {
  std::map<std::string, StructKind> out;
  auto self_and_other = [](const StructDef& s, std::vector<const Decl*>& self, std::vector<const Decl*>& other) {
    for (const auto& f : s.fields) {
      if (!f.type.is_ptr()) continue;
      (f.type.struct_name == s.name ? self : other).push_back(&f);
    }
  };
  // SLL and DLL depend on the struct alone; NLL needs the SLLs first.
  for (const auto& s : p.structs) {
    std::vector<const Decl*> self, other;
    self_and_other(s, self, other);
    StructKind k;
    if (self.size() == 1 && other.empty()) {
      k.kind = StructKind::SLL;
      k.next = self[0]->name;
    } else if (self.size() == 2 && other.empty()) {
      k.kind = StructKind::DLL;
      k.next = self[0]->name;
      k.prev = self[1]->name;
    }
    out[s.name] = k;
  }
  for (const auto& s : p.structs) {
    std::vector<const Decl*> self, other;
    self_and_other(s, self, other);
    if (self.size() != 1 || other.size() != 1) continue;
    auto it = out.find(other[0]->type.struct_name);
    if (it == out.end() || it->second.kind != StructKind::SLL) continue;
    StructKind k;
    k.kind = StructKind::NLL;
    k.next = self[0]->name;
    k.nested = other[0]->name;
    k.nested_struct = other[0]->type.struct_name;
    out[s.name] = k;
  }
  return out;
}

namespace {

class Validator {
 public:
  explicit Validator(const Program& p) : p_(p) {}

  void run() {
    std::set<std::string> names;
    for (const auto& s : p_.structs) {
      if (!names.insert(s.name).second) throw ParseError("duplicate struct '" + s.name + "'", s.loc);
      std::set<std::string> fields;
      for (const auto& f : s.fields) {
        if (!fields.insert(f.name).second) throw ParseError("duplicate field '" + f.name + "'", f.loc);
        check_type(f.type, f.loc, false);
      }
    }
    auto kinds = classify_structs(p_);
    for (const auto& s : p_.structs) {
      if (kinds.at(s.name).kind == StructKind::Plain) continue;
      for (const auto& f : s.fields)
        if (f.type.kind == Type::Int) throw UnsupportedFeature("integer fields in list structures", f.loc);
    }
    names.clear();
    for (const auto& f : p_.functions) {
      if (!names.insert(f.name).second) throw ParseError("duplicate function '" + f.name + "'", f.loc);
      if (f.name == "nondet" || f.name == "malloc" || f.name == "free")
        throw ParseError("'" + f.name + "' is a builtin", f.loc);
    }
    const FunDef* entry = p_.find_function(p_.entry);
    if (!entry) throw ParseError("no '" + p_.entry + "' function", {1, 1});
    if (!entry->params.empty()) throw ParseError("'" + p_.entry + "' must not take parameters", entry->loc);
    for (const auto& f : p_.functions) function(f);
    reject_recursion();
  }

 private:
  void check_type(const Type& t, SourceLoc loc, bool allow_void) const {
    if (t.kind == Type::Void && !allow_void) throw ParseError("void is not a value type", loc);
    if (t.is_ptr() && !p_.find_struct(t.struct_name))
      throw ParseError("unknown struct '" + t.struct_name + "'", loc);
  }

  static std::string show(const Type& t) {
    switch (t.kind) {
      case Type::Void:
        return "void";
      case Type::Int:
        return "int";
      case Type::Ptr:
        return "struct " + t.struct_name + "*";
    }
    return "?";
  }

  void function(const FunDef& f) {
    f_ = &f;
    check_type(f.return_type, f.loc, true);
    std::set<std::string> vars;
    for (const auto* ds : {&f.params, &f.locals})
      for (const auto& d : *ds) {
        check_type(d.type, d.loc, false);
        if (!vars.insert(d.name).second) throw ParseError("duplicate variable '" + d.name + "'", d.loc);
      }
    block(f.body);
  }

  Type var_type(const std::string& v, SourceLoc loc) const {
    auto t = f_->type_of(v);
    if (!t) throw ParseError("undeclared variable '" + v + "'", loc);
    return *t;
  }

  const Decl& field_of(const std::string& v, const std::string& field, SourceLoc loc) const {
    Type t = var_type(v, loc);
    if (!t.is_ptr()) throw ParseError("'" + v + "' is not a pointer", loc);
    const Decl* d = p_.find_struct(t.struct_name)->field(field);
    if (!d) throw ParseError("struct " + t.struct_name + " has no field '" + field + "'", loc);
    return *d;
  }

  // Whether an operand may be used where a value of type `want` is expected.
  bool fits(const Operand& o, const Type& want, SourceLoc loc) const {
    switch (o.kind) {
      case Operand::Null:
        return want.is_ptr();
      case Operand::Int:
        return want.kind == Type::Int;
      case Operand::Var:
        return var_type(o.name, loc) == want;
    }
    return false;
  }

  void expect_fits(const Operand& o, const Type& want, SourceLoc loc) const {
    if (!fits(o, want, loc)) throw ParseError("type mismatch, expected " + show(want), loc);
  }

  void call(const std::string& fn, const std::vector<Operand>& args, SourceLoc loc) {
    const FunDef* g = p_.find_function(fn);
    if (!g) throw ParseError("unknown function '" + fn + "'", loc);
    if (g->params.size() != args.size()) throw ParseError("wrong number of arguments to '" + fn + "'", loc);
    for (std::size_t i = 0; i < args.size(); ++i) expect_fits(args[i], g->params[i].type, loc);
    calls_[f_->name].insert(fn);
  }

  void cond(const Cond& c, SourceLoc loc) {
    if (c.op == Cond::Nondet) return;
    auto type_of = [&](const Operand& o) -> std::optional<Type> {
      if (o.kind == Operand::Var) return var_type(o.name, loc);
      if (o.kind == Operand::Int) return Type::int_type();
      return std::nullopt;
    };
    auto ta = type_of(c.a), tb = type_of(c.b);
    if (c.op == Cond::Lt || c.op == Cond::Leq) {
      if (!ta || !tb || ta->kind != Type::Int || tb->kind != Type::Int)
        throw ParseError("ordering comparison needs integers", loc);
      return;
    }
    bool ok = (ta && tb) ? (ta->kind == Type::Int ? tb->kind == Type::Int : tb->is_ptr())
                         : ((!ta || ta->is_ptr()) && (!tb || tb->is_ptr()));
    if (!ok) throw ParseError("comparison of incompatible operands", loc);
  }

  void block(const Block& b) {
    for (const auto& s : b) stmt(s);
  }

  void stmt(const Stmt& s) {
    std::visit(overloaded{
                   [&](const VarAssign& a) { assign(a, s.loc); },
                   [&](const FieldStore& st) { expect_fits(st.value, field_of(st.var, st.field, s.loc).type, s.loc); },
                   [&](const Free& fr) {
                     if (!var_type(fr.var, s.loc).is_ptr()) throw ParseError("free of a non-pointer", s.loc);
                   },
                   [&](const If& n) {
                     cond(n.cond, s.loc);
                     block(n.then_body);
                     if (n.else_body) block(*n.else_body);
                   },
                   [&](const While& w) {
                     cond(w.cond, s.loc);
                     block(w.body);
                   },
                   [&](const Return& r) {
                     if (f_->return_type.kind == Type::Void) {
                       if (r.value) throw ParseError("void function returns a value", s.loc);
                     } else if (!r.value) {
                       throw ParseError("missing return value", s.loc);
                     } else {
                       expect_fits(*r.value, f_->return_type, s.loc);
                     }
                   },
                   [&](const CallStmt& c) { call(c.fn, c.args, s.loc); },
                   [&](const IntOp& op) {
                     Type i = Type::int_type();
                     if (var_type(op.var, s.loc) != i) throw ParseError("arithmetic result must be int", s.loc);
                     expect_fits(op.first, i, s.loc);
                     for (const auto& step : op.rest) expect_fits(step.second, i, s.loc);
                   },
               },
               s.node);
  }

  void assign(const VarAssign& a, SourceLoc loc) {
    Type t = var_type(a.var, loc);
    auto mismatch = [&] { throw ParseError("type mismatch in assignment to '" + a.var + "'", loc); };
    std::visit(overloaded{
                   [&](const NullRhs&) {
                     if (!t.is_ptr()) mismatch();
                   },
                   [&](const VarRhs& v) {
                     if (var_type(v.name, loc) != t) mismatch();
                   },
                   [&](const IntRhs&) {
                     if (t.kind != Type::Int) mismatch();
                   },
                   [&](const LoadRhs& l) {
                     if (field_of(l.var, l.field, loc).type != t) mismatch();
                   },
                   [&](const MallocRhs& m) {
                     if (!p_.find_struct(m.struct_name)) throw ParseError("unknown struct '" + m.struct_name + "'", loc);
                     if (t != Type::ptr(m.struct_name)) mismatch();
                   },
                   [&](const CallRhs& c) {
                     call(c.fn, c.args, loc);
                     if (p_.find_function(c.fn)->return_type != t) mismatch();
                   },
                   [&](const NondetRhs&) {
                     if (t.kind != Type::Int) mismatch();
                   },
               },
               a.rhs);
  }

  void reject_recursion() const {
    std::map<std::string, int> state;
    std::function<void(const std::string&)> dfs = [&](const std::string& f) {
      state[f] = 1;
      auto it = calls_.find(f);
      if (it != calls_.end())
        for (const auto& g : it->second) {
          if (state[g] == 1) throw UnsupportedFeature("recursion through '" + g + "'", p_.find_function(g)->loc);
          if (state[g] == 0) dfs(g);
        }
      state[f] = 2;
    };
    for (const auto& f : p_.functions)
      if (state[f.name] == 0) dfs(f.name);
  }

  const Program& p_;
  const FunDef* f_ = nullptr;
  std::map<std::string, std::set<std::string>> calls_;
};

}  // namespace

void validate(const Program& p) { Validator(p).run(); }

}  // namespace shape
