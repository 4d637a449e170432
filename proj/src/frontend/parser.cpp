#include <cctype>
#include <set>

#include "shape/frontend/frontend.hpp"

namespace shape {

using namespace ast;

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  SourceLoc loc;
};

const std::set<std::string> kKeywords = {"struct", "int",  "void",   "if",     "else",   "while",
                                         "return", "free", "malloc", "sizeof", "NULL",   "nondet"};

// Recognized C words that the subset does not cover.
const std::set<std::string> kUnsupportedWords = {
    "for",   "do",     "switch", "case",  "default", "goto",     "break",  "continue", "typedef",
    "static", "extern", "union",  "enum",  "char",    "long",     "short",  "unsigned", "signed",
    "float", "double", "const",  "volatile", "bool",  "_Bool",    "register", "inline", "auto"};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourceLoc loc{line, col};
    if (src.compare(i, 2, "/*") == 0) throw UnsupportedFeature("block comments", loc);
    if (c == '#') throw UnsupportedFeature("preprocessor directives", loc);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), loc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, src.substr(i, j - i), loc});
      advance(j - i);
      continue;
    }
    static const char* two[] = {"->", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-="};
    bool matched = false;
    for (const char* t : two) {
      if (src.compare(i, 2, t) == 0) {
        out.push_back({Tok::Sym, t, loc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    out.push_back({Tok::Sym, std::string(1, c), loc});
    advance(1);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End) {
      reject_unsupported_word();
      if (is("struct") && peek(1).kind == Tok::Ident && is_sym("{", 2)) {
        p.structs.push_back(struct_def());
        continue;
      }
      SourceLoc loc = peek().loc;
      Type t = type();
      std::string name = ident();
      if (!is_sym("(")) throw UnsupportedFeature("global variables", loc);
      p.functions.push_back(fun_def(t, name, loc));
    }
    return p;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool is(const char* word, std::size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == word; }
  bool is_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"), t.loc);
  }

  void expect(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  void expect_word(const char* w) {
    if (!is(w)) fail(std::string("expected '") + w + "'");
    next();
  }

  void reject_unsupported_word() const {
    const Token& t = peek();
    if (t.kind == Tok::Ident && kUnsupportedWords.count(t.text)) throw UnsupportedFeature("'" + t.text + "'", t.loc);
  }

  // Symbols that belong to C constructs outside the subset.
  void reject_unsupported_symbol() const {
    const Token& t = peek();
    if (t.kind != Tok::Sym) return;
    if (t.text == "[" || t.text == "]") throw UnsupportedFeature("arrays", t.loc);
    if (t.text == "&") throw UnsupportedFeature("address-of", t.loc);
    if (t.text == "*") throw UnsupportedFeature("pointer dereference with '*'", t.loc);
    if (t.text == "&&" || t.text == "||" || t.text == "!") throw UnsupportedFeature("compound conditions", t.loc);
    if (t.text == "++" || t.text == "--" || t.text == "+=" || t.text == "-=")
      throw UnsupportedFeature("compound assignment", t.loc);
    if (t.text == "/" || t.text == "%") throw UnsupportedFeature("arithmetic operator", t.loc);
    if (t.text == "\"" || t.text == "'") throw UnsupportedFeature("string and character literals", t.loc);
  }

  std::string ident() {
    reject_unsupported_word();
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text)) fail("expected identifier");
    if (t.text[0] == '_') throw ParseError("identifiers starting with '_' are reserved", t.loc);
    if (t.text == "nil") throw ParseError("'nil' is a reserved identifier", t.loc);
    return next().text;
  }

  std::int64_t integer() {
    bool neg = false;
    if (is_sym("-") || is_sym("+")) neg = next().text == "-";
    if (peek().kind != Tok::Int) fail("expected integer");
    const Token& t = next();
    try {
      std::int64_t v = std::stoll(t.text);
      return neg ? -v : v;
    } catch (const std::out_of_range&) {
      throw ParseError("integer literal out of range", t.loc);
    }
  }

  Type type() {
    reject_unsupported_word();
    if (is("void")) {
      next();
      return Type::void_type();
    }
    if (is("int")) {
      next();
      if (is_sym("*")) throw UnsupportedFeature("pointers to int", peek().loc);
      return Type::int_type();
    }
    if (is("struct")) {
      next();
      std::string s = ident();
      if (!is_sym("*")) {
        if (is_sym("{")) fail("nested struct definition");
        throw UnsupportedFeature("struct values (only pointers to structs are supported)", peek().loc);
      }
      next();
      if (is_sym("*")) throw UnsupportedFeature("pointers to pointers", peek().loc);
      return Type::ptr(s);
    }
    fail("expected type");
  }

  bool at_type() const { return is("int") || is("void") || is("struct"); }

  StructDef struct_def() {
    StructDef s;
    s.loc = peek().loc;
    expect_word("struct");
    s.name = ident();
    expect("{");
    while (!is_sym("}")) {
      Decl d;
      d.loc = peek().loc;
      d.type = type();
      d.name = ident();
      reject_unsupported_symbol();
      expect(";");
      s.fields.push_back(d);
    }
    next();
    expect(";");
    return s;
  }

  FunDef fun_def(Type ret, std::string name, SourceLoc loc) {
    FunDef f;
    f.name = std::move(name);
    f.return_type = ret;
    f.loc = loc;
    expect("(");
    if (is("void") && is_sym(")", 1)) next();
    while (!is_sym(")")) {
      if (!f.params.empty()) expect(",");
      Decl d;
      d.loc = peek().loc;
      d.type = type();
      d.name = ident();
      reject_unsupported_symbol();
      f.params.push_back(d);
    }
    next();
    expect("{");
    while (at_type()) {
      Decl d;
      d.loc = peek().loc;
      d.type = type();
      d.name = ident();
      reject_unsupported_symbol();
      if (is_sym("=")) fail("initializers are not allowed in declarations");
      expect(";");
      f.locals.push_back(d);
    }
    while (!is_sym("}")) {
      if (peek().kind == Tok::End) fail("unterminated function body");
      if (at_type()) fail("declarations must precede statements");
      f.body.push_back(stmt());
    }
    next();
    return f;
  }

  Block block() {
    expect("{");
    Block b;
    while (!is_sym("}")) {
      if (peek().kind == Tok::End) fail("unterminated block");
      if (at_type()) fail("declarations are only allowed at the start of a function body");
      b.push_back(stmt());
    }
    next();
    return b;
  }

  Operand atom2() {
    if (is("NULL")) {
      next();
      return Operand::null();
    }
    if (peek().kind == Tok::Int || is_sym("-") || is_sym("+")) return Operand::integer(integer());
    reject_unsupported_symbol();
    return Operand::var(ident());
  }

  Cond cond() {
    Cond c;
    if (is("nondet")) {
      next();
      expect("(");
      expect(")");
      c.op = Cond::Nondet;
      return c;
    }
    c.a = atom2();
    reject_unsupported_symbol();
    if (is_sym("=="))
      c.op = Cond::Eq;
    else if (is_sym("!="))
      c.op = Cond::Neq;
    else if (is_sym("<"))
      c.op = Cond::Lt;
    else if (is_sym("<="))
      c.op = Cond::Leq;
    else
      fail("expected '==', '!=', '<' or '<='");
    next();
    c.b = atom2();
    reject_unsupported_symbol();
    return c;
  }

  std::vector<Operand> args() {
    expect("(");
    std::vector<Operand> out;
    while (!is_sym(")")) {
      if (!out.empty()) expect(",");
      out.push_back(atom2());
    }
    next();
    return out;
  }

  Stmt stmt() {
    reject_unsupported_word();
    reject_unsupported_symbol();
    Stmt s;
    s.loc = peek().loc;
    if (is("free")) {
      next();
      expect("(");
      s.node = Free{ident()};
      expect(")");
      expect(";");
      return s;
    }
    if (is("if")) {
      next();
      If n;
      expect("(");
      n.cond = cond();
      expect(")");
      n.then_body = block();
      if (is("else")) {
        next();
        if (is("if"))
          n.else_body = Block{stmt()};
        else
          n.else_body = block();
      }
      s.node = std::move(n);
      return s;
    }
    if (is("while")) {
      next();
      While w;
      expect("(");
      w.cond = cond();
      expect(")");
      w.body = block();
      s.node = std::move(w);
      return s;
    }
    if (is("return")) {
      next();
      Return r;
      if (!is_sym(";")) {
        r.value = atom2();
        if (is_sym("+") || is_sym("-")) throw UnsupportedFeature("arithmetic in return", peek().loc);
      }
      expect(";");
      s.node = r;
      return s;
    }
    if (is_sym("{")) fail("nested blocks are not part of the language");
    std::string x = ident();
    if (is_sym("(")) {
      s.node = CallStmt{x, args()};
      expect(";");
      return s;
    }
    if (is_sym("->")) {
      next();
      std::string f = ident();
      reject_unsupported_symbol();
      expect("=");
      s.node = field_store(x, f);
      expect(";");
      return s;
    }
    reject_unsupported_symbol();
    expect("=");
    s.node = assignment(x);
    expect(";");
    return s;
  }

  FieldStore field_store(const std::string& x, const std::string& f) {
    SourceLoc loc = peek().loc;
    if (is("malloc") || is("nondet") || is_sym("(") ||
        (peek().kind == Tok::Ident && (is_sym("->", 1) || is_sym("(", 1))))
      throw UnsupportedFeature("field store of a non-atomic value (assign it to a local first)", loc);
    Operand v = atom2();
    if (is_sym("+") || is_sym("-")) throw UnsupportedFeature("arithmetic in a field store", peek().loc);
    return FieldStore{x, f, v};
  }

  std::variant<VarAssign, FieldStore, Free, If, While, Return, CallStmt, IntOp> assignment(const std::string& x) {
    if (is_sym("(")) {
      if (is("struct", 1) || is("int", 1) || is("void", 1)) throw UnsupportedFeature("casts", peek().loc);
      fail("unexpected '('");
    }
    if (is("NULL")) {
      next();
      return VarAssign{x, NullRhs{}};
    }
    if (is("malloc")) {
      next();
      expect("(");
      expect_word("sizeof");
      expect("(");
      expect_word("struct");
      std::string s = ident();
      expect(")");
      expect(")");
      return VarAssign{x, MallocRhs{s}};
    }
    if (is("nondet")) {
      next();
      expect("(");
      expect(")");
      return VarAssign{x, NondetRhs{}};
    }
    if (peek().kind == Tok::Ident && is_sym("(", 1)) {
      std::string f = ident();
      return VarAssign{x, CallRhs{f, args()}};
    }
    if (peek().kind == Tok::Ident && is_sym("->", 1)) {
      std::string y = ident();
      next();
      std::string f = ident();
      return VarAssign{x, LoadRhs{y, f}};
    }
    Operand a = atom2();
    if (a.kind == Operand::Null) fail("unexpected NULL");
    if (is_sym("*")) throw UnsupportedFeature("arithmetic operator", peek().loc);
    reject_unsupported_symbol();
    if (is_sym("+") || is_sym("-")) {
      IntOp chain{x, a, {}};
      while (is_sym("+") || is_sym("-")) {
        char op = next().text[0];
        Operand b = atom2();
        if (b.kind == Operand::Null) fail("NULL in arithmetic");
        if (is_sym("*")) throw UnsupportedFeature("arithmetic operator", peek().loc);
        reject_unsupported_symbol();
        chain.rest.emplace_back(op, b);
      }
      return chain;
    }
    if (a.kind == Operand::Int) return VarAssign{x, IntRhs{a.value}};
    return VarAssign{x, VarRhs{a.name}};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

void validate(const Program& p);

Program parse_program(const std::string& source) {
  Program p = Parser(lex(source)).program();
  validate(p);
  return p;
}

}  // namespace shape
