// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hhl/value.hpp"

namespace hhl {

// ---------------------------------------------------------------------------
// Program expressions: evaluated in a single program state.

enum class BinOp { Add, Sub, Mul, Xor, Concat, Index };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class BoolOp { And, Or, Not, Implies };

inline CmpOp cmpComplement(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
  }
  return CmpOp::Eq;
}

struct PExpr;
using PExprPtr = std::shared_ptr<const PExpr>;

struct PExpr {
  enum class Kind { Lit, Var, Bin, Len, Cmp, Bool } kind;
  Value lit;                     // Lit
  std::string var;               // Var
  BinOp bop{};                   // Bin
  CmpOp cop{};                   // Cmp
  BoolOp lop{};                  // Bool
  PExprPtr a, b;                 // operands (b unused for Len / unary Not)

  static PExprPtr mkLit(Value v) {
    auto e = std::make_shared<PExpr>();
    e->kind = Kind::Lit;
    e->lit = std::move(v);
    return e;
  }
  static PExprPtr mkVar(std::string name) {
    auto e = std::make_shared<PExpr>();
    e->kind = Kind::Var;
    e->var = std::move(name);
    return e;
  }
  static PExprPtr mkBin(BinOp op, PExprPtr l, PExprPtr r) {
    auto e = std::make_shared<PExpr>();
    e->kind = Kind::Bin;
    e->bop = op;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }
  static PExprPtr mkLen(PExprPtr x) {
    auto e = std::make_shared<PExpr>();
    e->kind = Kind::Len;
    e->a = std::move(x);
    return e;
  }
  static PExprPtr mkCmp(CmpOp op, PExprPtr l, PExprPtr r) {
    auto e = std::make_shared<PExpr>();
    e->kind = Kind::Cmp;
    e->cop = op;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }
  static PExprPtr mkBool(BoolOp op, PExprPtr l, PExprPtr r) {
    auto e = std::make_shared<PExpr>();
    e->kind = Kind::Bool;
    e->lop = op;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }
};

// Negation in comparison normal form: complements comparison operators and
// pushes through and/or, so printed guards read like their manual duals
// (e.g. not (i < n) becomes i >= n).
inline PExprPtr pNot(const PExprPtr& e) {
  switch (e->kind) {
    case PExpr::Kind::Lit:
      if (e->lit.isBool()) return PExpr::mkLit(Value(!e->lit.asBool()));
      break;
    case PExpr::Kind::Cmp:
      return PExpr::mkCmp(cmpComplement(e->cop), e->a, e->b);
    case PExpr::Kind::Bool:
      switch (e->lop) {
        case BoolOp::Not: return e->a;
        case BoolOp::And:
          return PExpr::mkBool(BoolOp::Or, pNot(e->a), pNot(e->b));
        case BoolOp::Or:
          return PExpr::mkBool(BoolOp::And, pNot(e->a), pNot(e->b));
        case BoolOp::Implies:
          return PExpr::mkBool(BoolOp::And, e->a, pNot(e->b));
      }
      break;
    default:
      break;
  }
  return PExpr::mkBool(BoolOp::Not, e, nullptr);
}

inline bool pexprEqual(const PExprPtr& x, const PExprPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case PExpr::Kind::Lit: return x->lit == y->lit;
    case PExpr::Kind::Var: return x->var == y->var;
    case PExpr::Kind::Bin:
      return x->bop == y->bop && pexprEqual(x->a, y->a) &&
             pexprEqual(x->b, y->b);
    case PExpr::Kind::Len: return pexprEqual(x->a, y->a);
    case PExpr::Kind::Cmp:
      return x->cop == y->cop && pexprEqual(x->a, y->a) &&
             pexprEqual(x->b, y->b);
    case PExpr::Kind::Bool:
      return x->lop == y->lop && pexprEqual(x->a, y->a) &&
             (x->lop == BoolOp::Not || pexprEqual(x->b, y->b));
  }
  return false;
}

inline void pexprVars(const PExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == PExpr::Kind::Var) out.insert(e->var);
  pexprVars(e->a, out);
  pexprVars(e->b, out);
}

// ---------------------------------------------------------------------------
// Commands. Deterministic If/While are kept first class so proof rules can
// match on them; the executable semantics always desugars first.

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

struct Command {
  enum class Kind { Skip, Assign, Havoc, Assume, Seq, Choice, Iter, If, While }
      kind;
  std::string var;     // Assign / Havoc
  PExprPtr expr;       // Assign / Assume / If / While guard
  CommandPtr c1, c2;   // children

  static CommandPtr mkSkip() {
    auto c = std::make_shared<Command>();
    c->kind = Kind::Skip;
    return c;
  }
  static CommandPtr mkAssign(std::string x, PExprPtr e) {
    auto c = std::make_shared<Command>();
    c->kind = Kind::Assign;
    c->var = std::move(x);
    c->expr = std::move(e);
    return c;
  }
  static CommandPtr mkHavoc(std::string x) {
    auto c = std::make_shared<Command>();
    c->kind = Kind::Havoc;
    c->var = std::move(x);
    return c;
  }
  static CommandPtr mkAssume(PExprPtr e) {
    auto c = std::make_shared<Command>();
    c->kind = Kind::Assume;
    c->expr = std::move(e);
    return c;
  }
  static CommandPtr mkSeq(CommandPtr a, CommandPtr b) {
    auto c = std::make_shared<Command>();
    c->kind = Kind::Seq;
    c->c1 = std::move(a);
    c->c2 = std::move(b);
    return c;
  }
  static CommandPtr mkChoice(CommandPtr a, CommandPtr b) {
    auto c = std::make_shared<Command>();
    c->kind = Kind::Choice;
    c->c1 = std::move(a);
    c->c2 = std::move(b);
    return c;
  }
  static CommandPtr mkIter(CommandPtr body) {
    auto c = std::make_shared<Command>();
    c->kind = Kind::Iter;
    c->c1 = std::move(body);
    return c;
  }
  static CommandPtr mkIf(PExprPtr b, CommandPtr t, CommandPtr e) {
    auto c = std::make_shared<Command>();
    c->kind = Kind::If;
    c->expr = std::move(b);
    c->c1 = std::move(t);
    c->c2 = std::move(e);
    return c;
  }
  static CommandPtr mkWhile(PExprPtr b, CommandPtr body) {
    auto c = std::make_shared<Command>();
    c->kind = Kind::While;
    c->expr = std::move(b);
    c->c1 = std::move(body);
    return c;
  }
};

// if (b) {C1} else {C2}  ==  (assume b; C1) [] (assume !b; C2)
// while (b) {C}          ==  iter { assume b; C }; assume !b
inline CommandPtr desugar(const CommandPtr& c) {
  switch (c->kind) {
    case Command::Kind::Skip:
    case Command::Kind::Assign:
    case Command::Kind::Havoc:
    case Command::Kind::Assume:
      return c;
    case Command::Kind::Seq:
      return Command::mkSeq(desugar(c->c1), desugar(c->c2));
    case Command::Kind::Choice:
      return Command::mkChoice(desugar(c->c1), desugar(c->c2));
    case Command::Kind::Iter:
      return Command::mkIter(desugar(c->c1));
    case Command::Kind::If:
      return Command::mkChoice(
          Command::mkSeq(Command::mkAssume(c->expr), desugar(c->c1)),
          Command::mkSeq(Command::mkAssume(pNot(c->expr)), desugar(c->c2)));
    case Command::Kind::While:
      return Command::mkSeq(
          Command::mkIter(
              Command::mkSeq(Command::mkAssume(c->expr), desugar(c->c1))),
          Command::mkAssume(pNot(c->expr)));
  }
  return c;
}

// Program variables potentially written: left-hand sides of assignments and
// havocked variables, through all constructors.
inline void wrVarsInto(const CommandPtr& c, std::set<std::string>& out) {
  if (!c) return;
  switch (c->kind) {
    case Command::Kind::Assign:
    case Command::Kind::Havoc:
      out.insert(c->var);
      return;
    default:
      wrVarsInto(c->c1, out);
      wrVarsInto(c->c2, out);
      return;
  }
}
inline std::set<std::string> wrVars(const CommandPtr& c) {
  std::set<std::string> out;
  wrVarsInto(c, out);
  return out;
}

inline bool commandEqual(const CommandPtr& x, const CommandPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  return x->var == y->var && pexprEqual(x->expr, y->expr) &&
         commandEqual(x->c1, y->c1) && commandEqual(x->c2, y->c2);
}

// ---------------------------------------------------------------------------
// Declarations. Domain hints finitize the oracle's search space and the
// havoc fan-out; the raw semantics does not otherwise depend on them.

struct DomainHint {
  enum class Kind { None, IntAny, ListAny, IntRange, Bool, List } kind =
      Kind::None;
  Int lo, hi;                            // IntRange
  std::shared_ptr<DomainHint> elem;      // List element hint
  long maxLen = 0;                       // List

  static DomainHint none() { return DomainHint{}; }
  static DomainHint intAny() {
    DomainHint d;
    d.kind = Kind::IntAny;
    return d;
  }
  static DomainHint listAny() {
    DomainHint d;
    d.kind = Kind::ListAny;
    return d;
  }
  static DomainHint intRange(Int lo, Int hi) {
    DomainHint d;
    d.kind = Kind::IntRange;
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    return d;
  }
  static DomainHint boolean() {
    DomainHint d;
    d.kind = Kind::Bool;
    return d;
  }
  static DomainHint list(DomainHint e, long maxLen) {
    DomainHint d;
    d.kind = Kind::List;
    d.elem = std::make_shared<DomainHint>(std::move(e));
    d.maxLen = maxLen;
    return d;
  }

  bool finite() const {
    switch (kind) {
      case Kind::None:
      case Kind::IntAny:
      case Kind::ListAny: return false;
      case Kind::IntRange: return true;
      case Kind::Bool: return true;
      case Kind::List: return elem && elem->finite();
    }
    return false;
  }

  // All values of a finite hint, in canonical order.
  std::vector<Value> enumerate() const {
    std::vector<Value> out;
    switch (kind) {
      case Kind::None:
      case Kind::IntAny:
      case Kind::ListAny:
        throw EvalError("cannot enumerate an unbounded domain");
      case Kind::IntRange:
        for (Int v = lo; v <= hi; ++v) out.emplace_back(v);
        break;
      case Kind::Bool:
        out.emplace_back(false);
        out.emplace_back(true);
        break;
      case Kind::List: {
        std::vector<Value> elems = elem->enumerate();
        std::vector<ValueList> layer = {ValueList{}};
        out.emplace_back(ValueList{});
        for (long n = 1; n <= maxLen; n++) {
          std::vector<ValueList> next;
          for (const auto& l : layer)
            for (const auto& e : elems) {
              ValueList ext = l;
              ext.push_back(e);
              out.emplace_back(ext);
              next.push_back(std::move(ext));
            }
          layer = std::move(next);
        }
        break;
      }
    }
    return out;
  }
};

struct VarDecl {
  std::string name;
  DomainHint hint;
};

// A parsed program: declared program variables, declared logical variables,
// and the body command. Namespaces of pvars and lvars are disjoint.
struct Program {
  std::vector<VarDecl> pvars;
  std::vector<VarDecl> lvars;
  CommandPtr body;

  bool isPVar(const std::string& n) const {
    for (const auto& d : pvars)
      if (d.name == n) return true;
    return false;
  }
  bool isLVar(const std::string& n) const {
    for (const auto& d : lvars)
      if (d.name == n) return true;
    return false;
  }
  const DomainHint* hintOf(const std::string& n) const {
    for (const auto& d : pvars)
      if (d.name == n) return &d.hint;
    for (const auto& d : lvars)
      if (d.name == n) return &d.hint;
    return nullptr;
  }
};

}  // namespace hhl
