// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "hhl/hyper_ast.hpp"

namespace hhl {

// Concrete syntax for hyper-expressions. When `self` is non-empty, lookups
// on that state print bare (the box/low implicit-state convention).
inline int hexprPrec(const HExprPtr& e) {
  switch (e->kind) {
    case HExpr::Kind::Lit:
    case HExpr::Kind::QVar:
    case HExpr::Kind::PLook:
    case HExpr::Kind::LLook:
    case HExpr::Kind::Len: return 100;
    case HExpr::Kind::Bin:
      return e->bop == BinOp::Index ? 90 : e->bop == BinOp::Mul ? 60 : 50;
    case HExpr::Kind::Cmp: return 40;
    case HExpr::Kind::Bool:
      switch (e->lop) {
        case BoolOp::Not: return 45;
        case BoolOp::And: return 30;
        case BoolOp::Or: return 20;
        case BoolOp::Implies: return 10;
      }
  }
  return 0;
}

inline std::string printHExpr(const HExprPtr& e, const std::string& self = "");

inline std::string printHChild(const HExprPtr& parent, const HExprPtr& child,
                               bool tightened, const std::string& self) {
  std::string s = printHExpr(child, self);
  if (hexprPrec(child) < hexprPrec(parent) ||
      (tightened && hexprPrec(child) == hexprPrec(parent)))
    return "(" + s + ")";
  return s;
}

inline std::string printHExpr(const HExprPtr& e, const std::string& self) {
  switch (e->kind) {
    case HExpr::Kind::Lit: return e->lit.show();
    case HExpr::Kind::QVar: return e->var;
    case HExpr::Kind::PLook:
      if (!self.empty() && e->stateRef == self) return e->field;
      return e->stateRef + "[" + e->field + "]";
    case HExpr::Kind::LLook:
      if (!self.empty() && e->stateRef == self) return e->field;
      return e->stateRef + ".L[" + e->field + "]";
    case HExpr::Kind::Len: return "len(" + printHExpr(e->a, self) + ")";
    case HExpr::Kind::Bin: {
      if (e->bop == BinOp::Index)
        return printHChild(e, e->a, false, self) + "[" +
               printHExpr(e->b, self) + "]";
      const char* op = e->bop == BinOp::Add      ? " + "
                       : e->bop == BinOp::Sub    ? " - "
                       : e->bop == BinOp::Mul    ? " * "
                       : e->bop == BinOp::Concat ? " ++ "
                                                 : " xor ";
      return printHChild(e, e->a, false, self) + op +
             printHChild(e, e->b, true, self);
    }
    case HExpr::Kind::Cmp: {
      const char* op = e->cop == CmpOp::Eq   ? " = "
                       : e->cop == CmpOp::Ne ? " != "
                       : e->cop == CmpOp::Lt ? " < "
                       : e->cop == CmpOp::Le ? " <= "
                       : e->cop == CmpOp::Gt ? " > "
                                             : " >= ";
      return printHChild(e, e->a, true, self) + op +
             printHChild(e, e->b, true, self);
    }
    case HExpr::Kind::Bool: {
      if (e->lop == BoolOp::Not)
        return "!" + printHChild(e, e->a, true, self);
      const char* op = e->lop == BoolOp::And  ? " && "
                       : e->lop == BoolOp::Or ? " || "
                                              : " => ";
      bool r = e->lop == BoolOp::Implies;
      return printHChild(e, e->a, r, self) + op + printHChild(e, e->b, !r, self);
    }
  }
  return "?";
}

inline std::string printDomainRef(const DomainRef& d) {
  switch (d.kind) {
    case DomainRef::Kind::Default: return "";
    case DomainRef::Kind::OfVar: return ": dom(" + d.var + ")";
    case DomainRef::Kind::Explicit: {
      // contiguous int ranges print as lo..hi
      bool range = d.values.size() >= 2;
      for (size_t i = 0; range && i < d.values.size(); i++) {
        if (!d.values[i].isInt()) range = false;
        else if (i && d.values[i].asInt() != d.values[i - 1].asInt() + 1)
          range = false;
      }
      if (range)
        return ": " + d.values.front().asInt().str() + ".." +
               d.values.back().asInt().str();
      std::string s = ": {";
      for (size_t i = 0; i < d.values.size(); i++) {
        if (i) s += ", ";
        s += d.values[i].show();
      }
      return s + "}";
    }
  }
  return "";
}

inline std::string printStateRefExpr(const StateRefExpr& s, const Layout* ly) {
  std::string base;
  if (s.literal) {
    base = "state(";
    bool first = true;
    if (ly) {
      for (size_t i = 0; i < ly->pvars.size(); i++) {
        if (!first) base += ", ";
        first = false;
        base += ly->pvars[i] + " := " + s.literal->prog.vals[i].show();
      }
      for (size_t i = 0; i < ly->lvars.size(); i++) {
        if (!first) base += ", ";
        first = false;
        base += "L[" + ly->lvars[i] + "] := " + s.literal->log[i].show();
      }
    }
    base += ")";
  } else {
    base = s.ref;
  }
  if (s.progUpdates.empty() && s.logUpdates.empty()) return base;
  std::string out = base + " with ";
  bool first = true;
  for (const auto& [x, e] : s.progUpdates) {
    if (!first) out += ", ";
    first = false;
    out += x + " := " + printHExpr(e);
  }
  for (const auto& [x, e] : s.logUpdates) {
    if (!first) out += ", ";
    first = false;
    out += "L[" + x + "] := " + printHExpr(e);
  }
  return out;
}

// Assertion printing. Precedence: (+) lowest, then =>, ||, &&; quantifiers
// extend maximally to the right.
inline std::string printHAssertion(const HPtr& A, const Layout* ly = nullptr);
inline std::string printStateLevel(const HPtr& A, const std::string& self,
                                   const Layout* ly);

inline int hassertPrec(const HPtr& A) {
  switch (A->kind) {
    case HK::Otimes: return 5;
    case HK::Implies: return 10;
    case HK::Or: return 20;
    case HK::And: return 30;
    case HK::ForallVal:
    case HK::ExistsVal:
    case HK::ForallState:
    case HK::ExistsState:
    case HK::ForallStateU:
    case HK::ExistsStateU:
    case HK::BigOtimesFamily: return 7;
    default: return 100;
  }
}

inline std::string printHAChild(const HPtr& parent, const HPtr& child,
                                bool tightened, const Layout* ly) {
  std::string s = printHAssertion(child, ly);
  if (hassertPrec(child) < hassertPrec(parent) ||
      (tightened && hassertPrec(child) == hassertPrec(parent)))
    return "(" + s + ")";
  return s;
}

inline std::string printHAssertion(const HPtr& A, const Layout* ly) {
  switch (A->kind) {
    case HK::Bool: return A->bval ? "true" : "false";
    case HK::Cmp: {
      const char* op = A->cop == CmpOp::Eq   ? " = "
                       : A->cop == CmpOp::Ne ? " != "
                       : A->cop == CmpOp::Lt ? " < "
                       : A->cop == CmpOp::Le ? " <= "
                       : A->cop == CmpOp::Gt ? " > "
                                             : " >= ";
      return printHExpr(A->e1) + op + printHExpr(A->e2);
    }
    case HK::And:
      return printHAChild(A, A->a, false, ly) + " && " +
             printHAChild(A, A->b, true, ly);
    case HK::Or:
      return printHAChild(A, A->a, false, ly) + " || " +
             printHAChild(A, A->b, true, ly);
    case HK::Implies:
      return printHAChild(A, A->a, true, ly) + " => " +
             printHAChild(A, A->b, false, ly);
    case HK::Otimes:
      return printHAChild(A, A->a, false, ly) + " (+) " +
             printHAChild(A, A->b, true, ly);
    case HK::ForallVal:
    case HK::ExistsVal: {
      const char* kw = A->kind == HK::ForallVal ? "forall " : "exists ";
      return std::string(kw) + A->binder + printDomainRef(A->dom) + ". " +
             printHAssertion(A->a, ly);
    }
    case HK::ForallState:
    case HK::ExistsState: {
      const char* kw = A->kind == HK::ForallState ? "forall " : "exists ";
      return std::string(kw) + A->binder + " in S. " +
             printHAssertion(A->a, ly);
    }
    case HK::ForallStateU:
    case HK::ExistsStateU: {
      const char* kw = A->kind == HK::ForallStateU ? "forall " : "exists ";
      return std::string(kw) + A->binder + " in U. " +
             printHAssertion(A->a, ly);
    }
    case HK::Emp: return "emp";
    case HK::Box:
      // body is state-level; print lookups on the binder bare
      return "box(" + printStateLevel(A->a, A->binder, ly) + ")";
    case HK::Low: return "low(" + printHExpr(A->e1, A->binder) + ")";
    case HK::Member:
      return "member(" + printStateRefExpr(A->sref, ly) + ")";
    case HK::BigOtimes:
      return "bigotimes(" + printHAssertion(A->a, ly) + ")";
    case HK::BigOtimesFamily:
      return "bigotimes " + A->binder + printDomainRef(A->dom) + ". " +
             printHAssertion(A->a, ly);
    case HK::AtMost: return "atmost(" + printHAssertion(A->a, ly) + ")";
    case HK::AtLeast: return "atleast(" + printHAssertion(A->a, ly) + ")";
    case HK::CardCmp: {
      std::string s = "card{ " + printHExpr(A->e1) + " | " + A->binder +
                      " in S";
      if (A->a) s += ", " + printHAssertion(A->a, ly);
      s += " }";
      const char* op = A->cop == CmpOp::Eq   ? " = "
                       : A->cop == CmpOp::Ne ? " != "
                       : A->cop == CmpOp::Lt ? " < "
                       : A->cop == CmpOp::Le ? " <= "
                       : A->cop == CmpOp::Gt ? " > "
                                             : " >= ";
      return s + op + printHExpr(A->e2);
    }
  }
  return "?";
}

// State-level printing with an implicit self state (box bodies).
inline std::string printStateLevel(const HPtr& A, const std::string& self,
                                   const Layout* ly) {
  switch (A->kind) {
    case HK::Bool: return A->bval ? "true" : "false";
    case HK::Cmp: {
      const char* op = A->cop == CmpOp::Eq   ? " = "
                       : A->cop == CmpOp::Ne ? " != "
                       : A->cop == CmpOp::Lt ? " < "
                       : A->cop == CmpOp::Le ? " <= "
                       : A->cop == CmpOp::Gt ? " > "
                                             : " >= ";
      return printHExpr(A->e1, self) + op + printHExpr(A->e2, self);
    }
    case HK::And:
      return printStateLevel(A->a, self, ly) + " && " +
             (A->b->kind == HK::Or || A->b->kind == HK::Implies
                  ? "(" + printStateLevel(A->b, self, ly) + ")"
                  : printStateLevel(A->b, self, ly));
    case HK::Or:
      return printStateLevel(A->a, self, ly) + " || " +
             printStateLevel(A->b, self, ly);
    case HK::Implies: {
      std::string l = printStateLevel(A->a, self, ly);
      if (A->a->kind == HK::Implies) l = "(" + l + ")";
      return l + " => " + printStateLevel(A->b, self, ly);
    }
    case HK::ForallVal:
    case HK::ExistsVal: {
      const char* kw = A->kind == HK::ForallVal ? "forall " : "exists ";
      return std::string(kw) + A->binder + printDomainRef(A->dom) + ". " +
             printStateLevel(A->a, self, ly);
    }
    default:
      return printHAssertion(A, ly);
  }
}

}  // namespace hhl
