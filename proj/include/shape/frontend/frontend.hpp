#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "shape/frontend/ast.hpp"

namespace shape {

/// Syntax or static-semantics error in the input program.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, ast::SourceLoc loc)
      : std::runtime_error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + msg), loc_(loc) {}
  ast::SourceLoc loc() const { return loc_; }

 private:
  ast::SourceLoc loc_;
};

/// A construct that is recognized but outside the analyzed subset. Reported
/// as the ERROR verdict.
class UnsupportedFeature : public std::runtime_error {
 public:
  UnsupportedFeature(const std::string& what, ast::SourceLoc loc)
      : std::runtime_error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": unsupported: " + what),
        loc_(loc) {}
  ast::SourceLoc loc() const { return loc_; }

 private:
  ast::SourceLoc loc_;
};

/// Parses and checks a program. Throws ParseError or UnsupportedFeature.
ast::Program parse_program(const std::string& source);

/// Canonical source text; parse_program(print_program(p)) == p.
std::string print_program(const ast::Program& p);

/// One-line rendering used in traces. Branching statements print their head.
std::string to_source(const ast::Stmt& s);
std::string to_source(const ast::Cond& c);

struct StructKind {
  enum Kind { SLL, DLL, NLL, Plain } kind = Plain;
  std::string next;
  std::string prev;           // DLL
  std::string nested;         // NLL
  std::string nested_struct;  // NLL: the SLL struct of the nested lists
  bool operator==(const StructKind&) const = default;
};

std::string to_string(StructKind::Kind k);

/// Guesses the list shape of every struct from its pointer fields.
std::map<std::string, StructKind> classify_structs(const ast::Program& p);

}  // namespace shape
