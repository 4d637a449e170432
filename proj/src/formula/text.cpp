#include <algorithm>
#include <cctype>
#include <sstream>

#include "shape/formula/ops.hpp"
#include "shape/util/overloaded.hpp"

namespace shape {

// ---- printing ----

std::string to_string(const FieldValue& v) {
  return std::visit(overloaded{
                        [](const Var& x) { return x.name; },
                        [](std::int64_t n) { return std::to_string(n); },
                        [](const UnknownInt&) { return std::string("?"); },
                    },
                    v);
}

std::string to_string(const PureAtom& a) {
  return std::visit(overloaded{
                        [](const Eq& e) { return e.a.name + " = " + e.b.name; },
                        [](const Neq& e) { return e.a.name + " != " + e.b.name; },
                        [](const IntVal& e) { return e.x.name + " = " + std::to_string(e.value); },
                    },
                    a);
}

std::string to_string(const SpatialAtom& a) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const PointsTo& p) {
                   os << p.src.name << " -> (";
                   for (std::size_t i = 0; i < p.fields.size(); ++i) {
                     if (i) os << ", ";
                     os << p.fields[i].first << ": " << to_string(p.fields[i].second);
                   }
                   os << ")";
                 },
                 [&](const Ls& l) {
                   os << "ls";
                   if (l.link != "next") os << "<" << l.link << ">";
                   os << "(" << l.min << "+; " << l.src.name << ", " << l.dst.name << ")";
                 },
                 [&](const Dls& d) {
                   os << "dls";
                   if (d.next != "next" || d.prev != "prev") os << "<" << d.next << "," << d.prev << ">";
                   os << "(" << d.min << "+; " << d.first.name << ", " << d.last.name << ", "
                      << d.prev_of_first.name << ", " << d.next_of_last.name << ")";
                 },
                 [&](const Nls& n) {
                   os << "nls";
                   if (n.next != "next" || n.nested != "nested" || n.inner != "next")
                     os << "<" << n.next << "," << n.nested << "," << n.inner << ">";
                   os << "(" << n.min << "+; " << n.src.name << ", " << n.dst.name << ", "
                      << n.sink.name << ")";
                 },
                 [&](const Freed& f) { os << "freed(" << f.loc.name << ")"; },
             },
             a);
  return os.str();
}

std::string to_string(const SymbolicHeap& h) {
  std::ostringstream os;
  if (!h.existentials.empty()) {
    os << "E";
    for (const auto& e : h.existentials) os << " " << e.name;
    os << " . ";
  }
  bool first = true;
  for (const auto& a : h.pure) {
    if (!first) os << " & ";
    os << to_string(a);
    first = false;
  }
  if (!h.spatial.empty()) {
    if (!first) os << " & ";
    for (std::size_t i = 0; i < h.spatial.size(); ++i) {
      if (i) os << " * ";
      os << to_string(h.spatial[i]);
    }
  } else if (first) {
    os << "emp";
  }
  return os.str();
}

// ---- parsing ----

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, s.substr(start, i - start), start});
      continue;
    }
    bool neg_number = c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || neg_number) {
      ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Int, s.substr(start, i - start), start});
      continue;
    }
    static const char* two[] = {"->", "!=", "|-"};
    bool matched = false;
    for (const char* t : two) {
      if (s.compare(i, 2, t) == 0) {
        out.push_back({Tok::Sym, t, start});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string("=&*(),:;+<>.?").find(c) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, c), start});
      ++i;
      continue;
    }
    throw FormulaSyntaxError(std::string("unexpected character '") + c + "'", i);
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SymbolicHeap heap() {
    SymbolicHeap h;
    if (peek().kind == Tok::Ident && (peek().text == "E" || peek().text == "exists") &&
        peek(1).kind == Tok::Ident) {
      next();
      while (peek().kind == Tok::Ident) {
        Var v = var(next());
        if (v.is_nil()) fail("nil cannot be quantified");
        h.existentials.insert(v);
      }
      expect(".");
    }
    atom(h);
    while (is_sym("&") || is_sym("*")) {
      next();
      atom(h);
    }
    return h;
  }

  bool at(const char* sym) const { return is_sym(sym); }
  bool at_end() const { return peek().kind == Tok::End; }
  void expect(const char* sym) {
    if (!is_sym(sym)) fail(std::string("expected '") + sym + "'");
    next();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw FormulaSyntaxError(msg + (peek().kind == Tok::End ? " (at end)" : " near '" + peek().text + "'"),
                             peek().offset);
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool is_sym(const char* s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }

  static Var var(const Token& t) { return Var{t.text}; }

  Var term() {
    if (peek().kind != Tok::Ident) fail("expected variable");
    return var(next());
  }

  std::string ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier");
    return next().text;
  }

  std::int64_t integer() {
    if (peek().kind != Tok::Int) fail("expected integer");
    return std::stoll(next().text);
  }

  int min_length() {
    std::int64_t n = integer();
    if (n < 0) fail("negative minimum length");
    expect("+");
    expect(";");
    return static_cast<int>(n);
  }

  std::vector<std::string> field_params(std::size_t count) {
    std::vector<std::string> out;
    if (!is_sym("<")) return out;
    next();
    for (std::size_t i = 0; i < count; ++i) {
      if (i) expect(",");
      out.push_back(ident());
    }
    expect(">");
    return out;
  }

  void atom(SymbolicHeap& h) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("expected atom");
    bool pred_call = is_sym("(", 1) || is_sym("<", 1);
    if (t.text == "emp" && !is_sym("=", 1) && !is_sym("!=", 1) && !is_sym("->", 1)) {
      next();
      return;
    }
    if (pred_call && t.text == "ls") {
      next();
      auto fs = field_params(1);
      expect("(");
      Ls l;
      l.min = min_length();
      l.src = term();
      expect(",");
      l.dst = term();
      expect(")");
      if (!fs.empty()) l.link = fs[0];
      h.spatial.push_back(l);
      return;
    }
    if (pred_call && t.text == "dls") {
      next();
      auto fs = field_params(2);
      expect("(");
      Dls d;
      d.min = min_length();
      d.first = term();
      expect(",");
      d.last = term();
      expect(",");
      d.prev_of_first = term();
      expect(",");
      d.next_of_last = term();
      expect(")");
      if (!fs.empty()) d.next = fs[0], d.prev = fs[1];
      h.spatial.push_back(d);
      return;
    }
    if (pred_call && t.text == "nls") {
      next();
      auto fs = field_params(3);
      expect("(");
      Nls n;
      n.min = min_length();
      n.src = term();
      expect(",");
      n.dst = term();
      expect(",");
      n.sink = term();
      expect(")");
      if (!fs.empty()) n.next = fs[0], n.nested = fs[1], n.inner = fs[2];
      h.spatial.push_back(n);
      return;
    }
    if (is_sym("(", 1) && t.text == "freed") {
      next();
      expect("(");
      Var v = term();
      expect(")");
      h.spatial.push_back(Freed{v});
      return;
    }
    Var lhs = term();
    if (is_sym("->")) {
      next();
      expect("(");
      PointsTo p{lhs, {}};
      while (!is_sym(")")) {
        if (!p.fields.empty()) expect(",");
        std::string f = ident();
        expect(":");
        FieldValue v;
        if (peek().kind == Tok::Int)
          v = integer();
        else if (is_sym("?"))
          next(), v = UnknownInt{};
        else
          v = term();
        if (p.field(f)) fail("duplicate field '" + f + "'");
        p.fields.emplace_back(f, v);
      }
      next();
      std::sort(p.fields.begin(), p.fields.end());
      h.spatial.push_back(p);
      return;
    }
    if (is_sym("=")) {
      next();
      if (peek().kind == Tok::Int)
        h.pure.push_back(IntVal{lhs, integer()});
      else
        h.pure.push_back(Eq{lhs, term()});
      return;
    }
    if (is_sym("!=")) {
      next();
      h.pure.push_back(Neq{lhs, term()});
      return;
    }
    fail("expected '->', '=' or '!='");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

SymbolicHeap parse_formula(const std::string& text) {
  Parser p(lex(text));
  SymbolicHeap h = p.heap();
  if (!p.at_end()) p.fail("trailing input");
  return h;
}

Entailment parse_entailment(const std::string& text) {
  Parser p(lex(text));
  Entailment e;
  e.lhs = p.heap();
  p.expect("|-");
  e.rhs = p.heap();
  if (!p.at_end()) p.fail("trailing input");
  return e;
}

}  // namespace shape
