#pragma once

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mvdb/ucq.hpp"

namespace mvdb {

namespace detail {

struct Token {
  enum class Kind { kIdent, kInt, kFloat, kString, kSymbol, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  std::size_t column = 0;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [&](std::size_t col, const std::string& msg) {
    throw Error(ErrorCode::kInput, "syntax error at column " + std::to_string(col) + ": " + msg);
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.column = i + 1;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Token::Kind::kIdent;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool is_float = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        is_float = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_float = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = is_float ? Token::Kind::kFloat : Token::Kind::kInt;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != c) ++j;
      if (j >= src.size()) fail(t.column, "unterminated string");
      t.kind = Token::Kind::kString;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      i = j + 1;
    } else {
      static const char* kSymbols[] = {":-", "<=", ">=", "!=", "<>", "(", ")", ",", ";", "[", "]",
                                       "+",  "-",  "*",  "/",  "=",  "<", ">"};
      bool matched = false;
      for (const char* s : kSymbols) {
        std::string_view sv(s);
        if (src.substr(i, sv.size()) == sv) {
          t.kind = Token::Kind::kSymbol;
          t.text = std::string(sv);
          i += sv.size();
          matched = true;
          break;
        }
      }
      if (!matched) fail(t.column, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.column = src.size() + 1;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const Instance& inst) : toks_(std::move(toks)), inst_(inst) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  std::size_t position() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

  bool at_symbol(std::string_view s) const {
    return peek().kind == Token::Kind::kSymbol && peek().text == s;
  }
  bool accept(std::string_view s) {
    if (!at_symbol(s)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    std::string got = t.kind == Token::Kind::kEnd ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorCode::kInput,
                "syntax error at column " + std::to_string(t.column) + ": " + msg + ", got " + got);
  }

  static bool is_variable_name(const std::string& s) {
    return !s.empty() && (std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_');
  }

  // IDENT [ '(' vars ')' ]
  std::pair<std::string, std::vector<std::string>> parse_head() {
    if (peek().kind != Token::Kind::kIdent) fail("expected head name");
    std::string name = next().text;
    std::vector<std::string> vars;
    if (accept("(")) {
      if (!accept(")")) {
        do {
          if (peek().kind != Token::Kind::kIdent || !is_variable_name(peek().text)) {
            fail("expected head variable");
          }
          vars.push_back(next().text);
        } while (accept(","));
        expect(")");
      }
    }
    return {name, vars};
  }

  // Parses one disjunct body; stops before ';', ']' or end.
  ConjunctiveQuery parse_body(const std::vector<std::string>& head_vars) {
    ConjunctiveQuery cq;
    vars_.clear();
    cq_ = &cq;
    for (const auto& h : head_vars) {
      if (vars_.count(h)) fail("duplicate head variable " + h);
      cq.head.push_back(var_id(h));
    }
    do {
      parse_item(cq);
    } while (accept(","));
    std::set<VarId> in_atoms;
    for (const auto& a : cq.atoms)
      for (VarId v : atom_vars(a)) in_atoms.insert(v);
    for (const auto& pr : cq.predicates)
      for (VarId v : predicate_vars(pr))
        if (!in_atoms.count(v)) {
          throw Error(ErrorCode::kInput, "predicate variable " + cq.var_names[v] + " does not occur in any atom");
        }
    for (std::size_t i = 0; i < head_vars.size(); ++i) {
      bool found = false;
      for (const auto& a : cq.atoms)
        for (const auto& t : a.args)
          if (t.is_var() && t.id == cq.head[i]) found = true;
      if (!found) {
        throw Error(ErrorCode::kInput, "head variable " + head_vars[i] + " does not occur in any atom");
      }
    }
    cq_ = nullptr;
    return cq;
  }

  // Expression over an already-parsed disjunct's variables; no new variables.
  ExprPtr parse_closed_expr(ConjunctiveQuery& cq) {
    cq_ = &cq;
    vars_.clear();
    for (VarId v = 0; v < cq.var_names.size(); ++v) vars_[cq.var_names[v]] = v;
    closed_ = true;
    auto e = parse_expr();
    closed_ = false;
    cq_ = nullptr;
    return e;
  }

 private:
  VarId var_id(const std::string& name) {
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    if (closed_) fail("variable " + name + " is not bound in the body");
    auto id = static_cast<VarId>(cq_->var_names.size());
    cq_->var_names.push_back(name);
    vars_.emplace(name, id);
    return id;
  }

  void parse_item(ConjunctiveQuery& cq) {
    const auto& t = peek();
    if (t.kind == Token::Kind::kIdent && peek(1).kind == Token::Kind::kSymbol && peek(1).text == "(" &&
        t.text != "exp") {
      auto rel = inst_.schema().find(t.text);
      if (!rel) fail("unknown relation " + t.text);
      cq.atoms.push_back(parse_atom(*rel));
      return;
    }
    Predicate p;
    p.lhs = parse_expr();
    const auto& op = peek();
    if (op.kind == Token::Kind::kIdent && op.text == "contains") {
      next();
      p.op = CmpOp::kContains;
    } else if (op.kind == Token::Kind::kSymbol) {
      if (op.text == "=") p.op = CmpOp::kEq;
      else if (op.text == "!=" || op.text == "<>") p.op = CmpOp::kNe;
      else if (op.text == "<") p.op = CmpOp::kLt;
      else if (op.text == "<=") p.op = CmpOp::kLe;
      else if (op.text == ">") p.op = CmpOp::kGt;
      else if (op.text == ">=") p.op = CmpOp::kGe;
      else fail("expected comparison operator");
      next();
    } else {
      fail("expected comparison operator");
    }
    p.rhs = parse_expr();
    cq.predicates.push_back(std::move(p));
  }

  Atom parse_atom(RelId rel) {
    const auto& rs = inst_.schema().relation(rel);
    next();
    expect("(");
    Atom a;
    a.relation = rel;
    if (!at_symbol(")")) {
      do {
        std::size_t pos = a.args.size();
        if (pos >= rs.arity()) fail("too many arguments for " + rs.name);
        a.args.push_back(parse_atom_term(rs.attributes[pos].type));
      } while (accept(","));
    }
    expect(")");
    if (a.args.size() != rs.arity()) {
      throw Error(ErrorCode::kInput, "arity mismatch: " + rs.name + " expects " + std::to_string(rs.arity()) +
                                         " arguments, got " + std::to_string(a.args.size()));
    }
    return a;
  }

  Term parse_atom_term(AttrType type) {
    const auto& t = peek();
    if (t.kind == Token::Kind::kIdent) {
      if (!is_variable_name(t.text)) fail("variables must start with a lowercase letter");
      return Term::var(var_id(next().text));
    }
    bool neg = false;
    if (at_symbol("-")) {
      next();
      neg = true;
    }
    const auto& c = peek();
    Value v;
    if (c.kind == Token::Kind::kInt) {
      if (type != AttrType::kInt) fail("integer constant for string attribute");
      std::int64_t x = 0;
      std::from_chars(c.text.data(), c.text.data() + c.text.size(), x);
      v = neg ? -x : x;
    } else if (c.kind == Token::Kind::kString && !neg) {
      if (type != AttrType::kString) fail("string constant for integer attribute");
      v = c.text;
    } else {
      fail("expected variable or constant");
    }
    next();
    auto id = inst_.dictionary().find(v);
    return Term::constant(id ? *id : kMissingConst);
  }

  ExprPtr parse_expr() {
    auto e = parse_product();
    while (at_symbol("+") || at_symbol("-")) {
      auto k = next().text == "+" ? Expr::Kind::kAdd : Expr::Kind::kSub;
      e = Expr::binary(k, e, parse_product());
    }
    return e;
  }

  ExprPtr parse_product() {
    auto e = parse_factor();
    while (at_symbol("*") || at_symbol("/")) {
      auto k = next().text == "*" ? Expr::Kind::kMul : Expr::Kind::kDiv;
      e = Expr::binary(k, e, parse_factor());
    }
    return e;
  }

  ExprPtr parse_factor() {
    const auto& t = peek();
    if (accept("-")) return Expr::binary(Expr::Kind::kNeg, parse_factor(), nullptr);
    if (accept("(")) {
      auto e = parse_expr();
      expect(")");
      return e;
    }
    if (t.kind == Token::Kind::kInt || t.kind == Token::Kind::kFloat) {
      double d = std::stod(next().text);
      return Expr::of_literal(d);
    }
    if (t.kind == Token::Kind::kString) return Expr::of_literal(next().text);
    if (t.kind == Token::Kind::kIdent) {
      if (t.text == "exp" && peek(1).kind == Token::Kind::kSymbol && peek(1).text == "(") {
        next();
        expect("(");
        auto e = parse_expr();
        expect(")");
        return Expr::binary(Expr::Kind::kExp, e, nullptr);
      }
      if (!is_variable_name(t.text)) fail("variables must start with a lowercase letter");
      return Expr::of_term(Term::var(var_id(next().text)));
    }
    fail("expected expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Instance& inst_;
  ConjunctiveQuery* cq_ = nullptr;
  std::unordered_map<std::string, VarId> vars_;
  bool closed_ = false;
};

}  // namespace detail

// `HEAD :- body [; body]*`
inline Ucq parse_query(std::string_view text, const Instance& inst) {
  detail::Parser p(detail::tokenize(text), inst);
  auto [name, head] = p.parse_head();
  p.expect(":-");
  Ucq q;
  q.name = name;
  do {
    q.disjuncts.push_back(p.parse_body(head));
  } while (p.accept(";"));
  if (p.peek().kind != detail::Token::Kind::kEnd) p.fail("unexpected trailing input");
  return q;
}

// A correlation view: each answer of `body` gets weight `weight[d]` evaluated
// under a witnessing binding of disjunct d.
struct MarkoView {
  std::string name;
  std::vector<std::string> head;
  std::vector<ExprPtr> weight;  // one per disjunct, over that disjunct's variables
  Ucq body;
};

// `VIEW NAME(head...) [weight_expr] :- body`
inline MarkoView parse_view(std::string_view text, const Instance& inst) {
  detail::Parser p(detail::tokenize(text), inst);
  if (p.peek().kind != detail::Token::Kind::kIdent || p.peek().text != "VIEW") p.fail("expected VIEW");
  p.next();
  auto [name, head] = p.parse_head();
  p.expect("[");
  std::size_t weight_start = p.position();
  int depth = 0;
  while (!(depth == 0 && p.at_symbol("]"))) {
    if (p.peek().kind == detail::Token::Kind::kEnd) p.fail("unterminated weight expression");
    if (p.at_symbol("(")) ++depth;
    if (p.at_symbol(")")) --depth;
    p.next();
  }
  std::size_t weight_end = p.position();
  p.expect("]");
  p.expect(":-");
  MarkoView v;
  v.name = name;
  v.head = head;
  v.body.name = name;
  do {
    v.body.disjuncts.push_back(p.parse_body(head));
  } while (p.accept(";"));
  if (p.peek().kind != detail::Token::Kind::kEnd) p.fail("unexpected trailing input");
  for (auto& cq : v.body.disjuncts) {
    p.seek(weight_start);
    v.weight.push_back(p.parse_closed_expr(cq));
    if (p.position() != weight_end) p.fail("malformed weight expression");
  }
  return v;
}

}  // namespace mvdb
