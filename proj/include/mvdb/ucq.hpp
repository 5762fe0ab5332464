#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mvdb/relational.hpp"

namespace mvdb {

using VarId = std::uint32_t;

struct Term {
  enum class Kind { kVar, kConst };
  Kind kind = Kind::kConst;
  std::uint32_t id = 0;  // VarId or ConstId

  static Term var(VarId v) { return {Kind::kVar, v}; }
  static Term constant(ConstId c) { return {Kind::kConst, c}; }
  bool is_var() const { return kind == Kind::kVar; }
  bool operator==(const Term&) const = default;
};

struct Atom {
  RelId relation = 0;
  std::vector<Term> args;
};

// Numeric or string result of evaluating an expression.
using ExprValue = std::variant<double, std::string>;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { kTerm, kLiteral, kAdd, kSub, kMul, kDiv, kNeg, kExp };
  Kind kind = Kind::kLiteral;
  Term term;
  ExprValue literal = 0.0;
  ExprPtr lhs;
  ExprPtr rhs;

  static ExprPtr of_term(Term t) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::kTerm;
    e->term = t;
    return e;
  }
  static ExprPtr of_literal(ExprValue v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::kLiteral;
    e->literal = std::move(v);
    return e;
  }
  static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
  }
};

enum class CmpOp { kEq, kNe, kLt, kLe, kGt, kGe, kContains };

struct Predicate {
  CmpOp op = CmpOp::kEq;
  ExprPtr lhs;
  ExprPtr rhs;
};

// Head variables are VarIds 0..head.size()-1 of each disjunct.
struct ConjunctiveQuery {
  std::vector<std::string> var_names;
  std::vector<VarId> head;
  std::vector<Atom> atoms;
  std::vector<Predicate> predicates;
};

struct Ucq {
  std::string name;
  std::vector<ConjunctiveQuery> disjuncts;

  std::size_t head_arity() const { return disjuncts.empty() ? 0 : disjuncts.front().head.size(); }
  bool is_boolean() const { return head_arity() == 0; }
};

// ---------------------------------------------------------------------------
// expression evaluation

inline ExprValue to_expr_value(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<std::string>(v);
}

// `binding[v]` is the constant bound to variable v, or kMissingConst.
inline ExprValue eval_expr(const Expr& e, const std::vector<ConstId>& binding, const Dictionary& dict) {
  auto num = [](const ExprValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw Error(ErrorCode::kInput, "arithmetic on string value");
  };
  switch (e.kind) {
    case Expr::Kind::kTerm: {
      ConstId c = e.term.is_var() ? binding.at(e.term.id) : e.term.id;
      if (c == kMissingConst) throw Error(ErrorCode::kInput, "unbound variable in expression");
      return to_expr_value(dict.value(c));
    }
    case Expr::Kind::kLiteral:
      return e.literal;
    case Expr::Kind::kAdd:
      return num(eval_expr(*e.lhs, binding, dict)) + num(eval_expr(*e.rhs, binding, dict));
    case Expr::Kind::kSub:
      return num(eval_expr(*e.lhs, binding, dict)) - num(eval_expr(*e.rhs, binding, dict));
    case Expr::Kind::kMul:
      return num(eval_expr(*e.lhs, binding, dict)) * num(eval_expr(*e.rhs, binding, dict));
    case Expr::Kind::kDiv:
      return num(eval_expr(*e.lhs, binding, dict)) / num(eval_expr(*e.rhs, binding, dict));
    case Expr::Kind::kNeg:
      return -num(eval_expr(*e.lhs, binding, dict));
    case Expr::Kind::kExp:
      return std::exp(num(eval_expr(*e.lhs, binding, dict)));
  }
  return 0.0;
}

inline bool eval_predicate(const Predicate& p, const std::vector<ConstId>& binding, const Dictionary& dict) {
  ExprValue a = eval_expr(*p.lhs, binding, dict);
  ExprValue b = eval_expr(*p.rhs, binding, dict);
  if (p.op == CmpOp::kContains) {
    const auto* sa = std::get_if<std::string>(&a);
    const auto* sb = std::get_if<std::string>(&b);
    if (!sa || !sb) throw Error(ErrorCode::kInput, "contains requires string operands");
    return sa->find(*sb) != std::string::npos;
  }
  if (a.index() != b.index()) {
    // int vs string never compare equal
    if (p.op == CmpOp::kEq) return false;
    if (p.op == CmpOp::kNe) return true;
    throw Error(ErrorCode::kInput, "ordered comparison between string and number");
  }
  switch (p.op) {
    case CmpOp::kEq: return a == b;
    case CmpOp::kNe: return a != b;
    case CmpOp::kLt: return a < b;
    case CmpOp::kLe: return a <= b;
    case CmpOp::kGt: return a > b;
    case CmpOp::kGe: return a >= b;
    case CmpOp::kContains: break;
  }
  return false;
}

inline void collect_expr_vars(const Expr& e, std::set<VarId>& out) {
  if (e.kind == Expr::Kind::kTerm && e.term.is_var()) out.insert(e.term.id);
  if (e.lhs) collect_expr_vars(*e.lhs, out);
  if (e.rhs) collect_expr_vars(*e.rhs, out);
}

inline std::set<VarId> predicate_vars(const Predicate& p) {
  std::set<VarId> out;
  collect_expr_vars(*p.lhs, out);
  collect_expr_vars(*p.rhs, out);
  return out;
}

inline std::set<VarId> atom_vars(const Atom& a) {
  std::set<VarId> out;
  for (const auto& t : a.args)
    if (t.is_var()) out.insert(t.id);
  return out;
}

inline bool atom_is_ground(const Atom& a) {
  for (const auto& t : a.args)
    if (t.is_var()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// substitution

inline ExprPtr substitute_expr(const ExprPtr& e, VarId v, ConstId c) {
  if (!e) return e;
  if (e->kind == Expr::Kind::kTerm) {
    if (e->term.is_var() && e->term.id == v) return Expr::of_term(Term::constant(c));
    return e;
  }
  if (e->kind == Expr::Kind::kLiteral) return e;
  auto l = substitute_expr(e->lhs, v, c);
  auto r = substitute_expr(e->rhs, v, c);
  if (l == e->lhs && r == e->rhs) return e;
  auto out = std::make_shared<Expr>(*e);
  out->lhs = l;
  out->rhs = r;
  return out;
}

// Replaces variable v by constant c everywhere, including the head.
inline ConjunctiveQuery substitute_var(const ConjunctiveQuery& cq, VarId v, ConstId c) {
  ConjunctiveQuery out = cq;
  for (auto& a : out.atoms)
    for (auto& t : a.args)
      if (t.is_var() && t.id == v) t = Term::constant(c);
  for (auto& p : out.predicates) {
    p.lhs = substitute_expr(p.lhs, v, c);
    p.rhs = substitute_expr(p.rhs, v, c);
  }
  std::erase(out.head, v);
  return out;
}

// Binds the head variables to `answer`, producing a Boolean query.
inline Ucq substitute(const Ucq& q, const std::vector<ConstId>& answer) {
  if (answer.size() != q.head_arity()) {
    throw Error(ErrorCode::kInput, "answer arity does not match head arity of " + q.name);
  }
  Ucq out;
  out.name = q.name;
  for (const auto& cq : q.disjuncts) {
    ConjunctiveQuery b = cq;
    const auto head = cq.head;
    for (std::size_t i = 0; i < head.size(); ++i) b = substitute_var(b, head[i], answer[i]);
    b.head.clear();
    out.disjuncts.push_back(std::move(b));
  }
  return out;
}

inline std::set<RelId> relations_of(const ConjunctiveQuery& cq) {
  std::set<RelId> out;
  for (const auto& a : cq.atoms) out.insert(a.relation);
  return out;
}

inline Ucq disjunction(const Ucq& a, const Ucq& b) {
  Ucq out = a;
  for (const auto& cq : b.disjuncts) out.disjuncts.push_back(cq);
  return out;
}

inline std::string to_string(const ConjunctiveQuery& cq, const Instance& inst) {
  auto term = [&](const Term& t) -> std::string {
    if (t.is_var()) return cq.var_names.at(t.id);
    if (t.id == kMissingConst) return "?";
    const auto& v = inst.dictionary().value(t.id);
    if (std::holds_alternative<std::string>(v)) return "\"" + std::get<std::string>(v) + "\"";
    return to_string(v);
  };
  std::string s;
  for (std::size_t i = 0; i < cq.atoms.size(); ++i) {
    if (i) s += ", ";
    s += inst.schema().relation(cq.atoms[i].relation).name + "(";
    for (std::size_t j = 0; j < cq.atoms[i].args.size(); ++j) {
      if (j) s += ",";
      s += term(cq.atoms[i].args[j]);
    }
    s += ")";
  }
  if (!cq.predicates.empty()) s += ", <" + std::to_string(cq.predicates.size()) + " predicates>";
  return s;
}

}  // namespace mvdb
