#pragma once

// Abstract syntax of the mini pointer language.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace shape::ast {

/// 1-based source position. Positions never take part in structural
/// equality, so a reparsed program compares equal to the original.
struct SourceLoc {
  int line = 0;
  int column = 0;
  bool operator==(const SourceLoc&) const { return true; }
};

struct Type {
  enum Kind { Void, Int, Ptr } kind = Void;
  std::string struct_name;  // for Ptr

  static Type void_type() { return {Void, {}}; }
  static Type int_type() { return {Int, {}}; }
  static Type ptr(std::string s) { return {Ptr, std::move(s)}; }
  bool is_ptr() const { return kind == Ptr; }
  bool operator==(const Type&) const = default;
};

struct Decl {
  Type type;
  std::string name;
  SourceLoc loc;
  bool operator==(const Decl&) const = default;
};

struct StructDef {
  std::string name;
  std::vector<Decl> fields;
  SourceLoc loc;

  const Decl* field(const std::string& f) const;
  bool operator==(const StructDef&) const = default;
};

/// A variable, NULL or an integer literal.
struct Operand {
  enum Kind { Var, Null, Int } kind = Null;
  std::string name;
  std::int64_t value = 0;

  static Operand var(std::string n) { return {Var, std::move(n), 0}; }
  static Operand null() { return {Null, {}, 0}; }
  static Operand integer(std::int64_t v) { return {Int, {}, v}; }
  bool operator==(const Operand&) const = default;
};

// ---- right-hand sides ----

struct NullRhs {
  bool operator==(const NullRhs&) const = default;
};
struct VarRhs {
  std::string name;
  bool operator==(const VarRhs&) const = default;
};
struct IntRhs {
  std::int64_t value = 0;
  bool operator==(const IntRhs&) const = default;
};
struct LoadRhs {
  std::string var, field;
  bool operator==(const LoadRhs&) const = default;
};
struct MallocRhs {
  std::string struct_name;
  bool operator==(const MallocRhs&) const = default;
};
struct CallRhs {
  std::string fn;
  std::vector<Operand> args;
  bool operator==(const CallRhs&) const = default;
};
struct NondetRhs {
  bool operator==(const NondetRhs&) const = default;
};

using Rhs = std::variant<NullRhs, VarRhs, IntRhs, LoadRhs, MallocRhs, CallRhs, NondetRhs>;

struct Cond {
  enum Op { Eq, Neq, Lt, Leq, Nondet } op = Nondet;
  Operand a, b;
  bool operator==(const Cond&) const = default;
};

// ---- statements ----

struct Stmt;
using Block = std::vector<Stmt>;

struct VarAssign {
  std::string var;
  Rhs rhs;
  bool operator==(const VarAssign&) const = default;
};
struct FieldStore {
  std::string var, field;
  Operand value;
  bool operator==(const FieldStore&) const = default;
};
struct Free {
  std::string var;
  bool operator==(const Free&) const = default;
};
struct If {
  Cond cond;
  Block then_body;
  std::optional<Block> else_body;
  bool operator==(const If&) const;
};
struct While {
  Cond cond;
  Block body;
  bool operator==(const While&) const;
};
struct Return {
  std::optional<Operand> value;
  bool operator==(const Return&) const = default;
};
struct CallStmt {
  std::string fn;
  std::vector<Operand> args;
  bool operator==(const CallStmt&) const = default;
};
/// x = a op1 b op2 c ..., evaluated left to right, each op '+' or '-'.
struct IntOp {
  std::string var;
  Operand first;
  std::vector<std::pair<char, Operand>> rest;  // non-empty
  bool operator==(const IntOp&) const = default;
};

struct Stmt {
  std::variant<VarAssign, FieldStore, Free, If, While, Return, CallStmt, IntOp> node;
  SourceLoc loc;
  bool operator==(const Stmt&) const = default;
};

inline bool If::operator==(const If& o) const {
  return cond == o.cond && then_body == o.then_body && else_body == o.else_body;
}
inline bool While::operator==(const While& o) const { return cond == o.cond && body == o.body; }

struct FunDef {
  std::string name;
  Type return_type;
  std::vector<Decl> params;
  std::vector<Decl> locals;
  Block body;
  SourceLoc loc;

  /// Declared type of a parameter or local, if any.
  std::optional<Type> type_of(const std::string& v) const;
  bool operator==(const FunDef&) const = default;
};

struct Program {
  std::vector<StructDef> structs;
  std::vector<FunDef> functions;
  std::string entry = "main";

  const StructDef* find_struct(const std::string& name) const;
  const FunDef* find_function(const std::string& name) const;
  bool operator==(const Program&) const = default;
};

}  // namespace shape::ast
