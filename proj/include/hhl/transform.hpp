// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>

#include "hhl/hyper_ast.hpp"
#include "hhl/hyper_parser.hpp"

namespace hhl {

// ---------------------------------------------------------------------------
// Substitution machinery.

inline HExprPtr liftPExpr(const PExprPtr& e, const std::string& stateRef) {
  switch (e->kind) {
    case PExpr::Kind::Lit: return HExpr::mkLit(e->lit);
    case PExpr::Kind::Var: return HExpr::mkPLook(stateRef, e->var);
    case PExpr::Kind::Bin:
      return HExpr::mkBin(e->bop, liftPExpr(e->a, stateRef),
                          liftPExpr(e->b, stateRef));
    case PExpr::Kind::Len: return HExpr::mkLen(liftPExpr(e->a, stateRef));
    case PExpr::Kind::Cmp:
      return HExpr::mkCmp(e->cop, liftPExpr(e->a, stateRef),
                          liftPExpr(e->b, stateRef));
    case PExpr::Kind::Bool:
      return HExpr::mkBool(e->lop, liftPExpr(e->a, stateRef),
                           e->b ? liftPExpr(e->b, stateRef) : nullptr);
  }
  throw UnsupportedFragment("liftPExpr: malformed expression");
}

// Lifts a program-state predicate to a state predicate on `self`, as an
// assertion (comparisons become assertion-level nodes where possible).
inline HPtr liftPExprToAssertion(const PExprPtr& e, const std::string& self) {
  switch (e->kind) {
    case PExpr::Kind::Lit:
      if (e->lit.isBool()) return HAssertion::mkBool(e->lit.asBool());
      break;
    case PExpr::Kind::Cmp:
      return HAssertion::mkCmp(e->cop, liftPExpr(e->a, self),
                               liftPExpr(e->b, self));
    case PExpr::Kind::Bool:
      switch (e->lop) {
        case BoolOp::And:
          return HAssertion::mkAnd(liftPExprToAssertion(e->a, self),
                                   liftPExprToAssertion(e->b, self));
        case BoolOp::Or:
          return HAssertion::mkOr(liftPExprToAssertion(e->a, self),
                                  liftPExprToAssertion(e->b, self));
        case BoolOp::Implies:
          return HAssertion::mkImplies(liftPExprToAssertion(e->a, self),
                                       liftPExprToAssertion(e->b, self));
        case BoolOp::Not:
          return negate(liftPExprToAssertion(e->a, self));
      }
      break;
    default:
      break;
  }
  // bare boolean expression
  return HAssertion::mkCmp(CmpOp::Eq, liftPExpr(e, self),
                           HExpr::mkLit(Value(true)));
}

inline HExprPtr substLookupInExpr(const HExprPtr& e, const std::string& ref,
                                  const std::string& var, bool logical,
                                  const HExprPtr& repl) {
  if (!e) return e;
  bool hit = logical ? (e->kind == HExpr::Kind::LLook)
                     : (e->kind == HExpr::Kind::PLook);
  if (hit && e->stateRef == ref && e->field == var) return repl;
  if (e->kind == HExpr::Kind::Lit || e->kind == HExpr::Kind::QVar ||
      e->kind == HExpr::Kind::PLook || e->kind == HExpr::Kind::LLook)
    return e;
  auto c = std::make_shared<HExpr>(*e);
  c->a = substLookupInExpr(e->a, ref, var, logical, repl);
  c->b = substLookupInExpr(e->b, ref, var, logical, repl);
  return c;
}

// Substitutes lookups ref[var] (or ref.L[var]) by `repl` throughout A,
// stopping where `ref` is rebound.
inline HPtr substLookup(const HPtr& A, const std::string& ref,
                        const std::string& var, bool logical,
                        const HExprPtr& repl) {
  if (!A) return A;
  auto expr = [&](const HExprPtr& e) {
    return substLookupInExpr(e, ref, var, logical, repl);
  };
  auto c = std::make_shared<HAssertion>(*A);
  switch (A->kind) {
    case HK::Bool:
    case HK::Emp:
      return A;
    case HK::Cmp:
      c->e1 = expr(A->e1);
      c->e2 = expr(A->e2);
      return c;
    case HK::And:
    case HK::Or:
    case HK::Implies:
    case HK::Otimes:
      c->a = substLookup(A->a, ref, var, logical, repl);
      c->b = substLookup(A->b, ref, var, logical, repl);
      return c;
    case HK::ForallVal:
    case HK::ExistsVal:
    case HK::BigOtimesFamily:
    case HK::BigOtimes:
    case HK::AtMost:
    case HK::AtLeast:
      c->a = substLookup(A->a, ref, var, logical, repl);
      return c;
    case HK::ForallState:
    case HK::ExistsState:
    case HK::ForallStateU:
    case HK::ExistsStateU:
    case HK::Box:
      if (A->binder == ref) return A;  // shadowed
      c->a = substLookup(A->a, ref, var, logical, repl);
      return c;
    case HK::Low:
      if (A->binder == ref) return A;
      c->e1 = expr(A->e1);
      return c;
    case HK::Member: {
      StateRefExpr s = A->sref;
      for (auto& [x, e] : s.progUpdates) e = expr(e);
      for (auto& [x, e] : s.logUpdates) e = expr(e);
      c->sref = std::move(s);
      return c;
    }
    case HK::CardCmp:
      c->e2 = expr(A->e2);
      if (A->binder == ref) return c;
      c->e1 = expr(A->e1);
      if (A->a) c->a = substLookup(A->a, ref, var, logical, repl);
      return c;
  }
  return A;
}

inline HExprPtr substQVarInExpr(const HExprPtr& e, const std::string& name,
                                const HExprPtr& repl) {
  if (!e) return e;
  if (e->kind == HExpr::Kind::QVar && e->var == name) return repl;
  if (e->kind == HExpr::Kind::Lit || e->kind == HExpr::Kind::QVar ||
      e->kind == HExpr::Kind::PLook || e->kind == HExpr::Kind::LLook)
    return e;
  auto c = std::make_shared<HExpr>(*e);
  c->a = substQVarInExpr(e->a, name, repl);
  c->b = substQVarInExpr(e->b, name, repl);
  return c;
}

// Substitutes a free value variable by an expression; stops at shadowing
// binders. Used to instantiate indexed families.
inline HPtr substQVar(const HPtr& A, const std::string& name,
                      const HExprPtr& repl) {
  if (!A) return A;
  auto expr = [&](const HExprPtr& e) { return substQVarInExpr(e, name, repl); };
  auto c = std::make_shared<HAssertion>(*A);
  switch (A->kind) {
    case HK::Bool:
    case HK::Emp:
      return A;
    case HK::Cmp:
      c->e1 = expr(A->e1);
      c->e2 = expr(A->e2);
      return c;
    case HK::And:
    case HK::Or:
    case HK::Implies:
    case HK::Otimes:
      c->a = substQVar(A->a, name, repl);
      c->b = substQVar(A->b, name, repl);
      return c;
    case HK::ForallVal:
    case HK::ExistsVal:
    case HK::BigOtimesFamily:
      if (A->binder == name) return A;
      c->a = substQVar(A->a, name, repl);
      return c;
    case HK::BigOtimes:
    case HK::AtMost:
    case HK::AtLeast:
    case HK::ForallState:
    case HK::ExistsState:
    case HK::ForallStateU:
    case HK::ExistsStateU:
    case HK::Box:
      c->a = substQVar(A->a, name, repl);
      return c;
    case HK::Low:
      c->e1 = expr(A->e1);
      return c;
    case HK::Member: {
      StateRefExpr s = A->sref;
      for (auto& [x, e] : s.progUpdates) e = expr(e);
      for (auto& [x, e] : s.logUpdates) e = expr(e);
      c->sref = std::move(s);
      return c;
    }
    case HK::CardCmp:
      c->e1 = expr(A->e1);
      c->e2 = expr(A->e2);
      if (A->a) c->a = substQVar(A->a, name, repl);
      return c;
  }
  return A;
}

// Renames a free state reference.
inline HPtr renameStateRef(const HPtr& A, const std::string& from,
                           const std::string& to);
inline HExprPtr renameStateRefInExpr(const HExprPtr& e, const std::string& from,
                                     const std::string& to) {
  if (!e) return e;
  auto c = std::make_shared<HExpr>(*e);
  if ((e->kind == HExpr::Kind::PLook || e->kind == HExpr::Kind::LLook) &&
      e->stateRef == from) {
    c->stateRef = to;
    return c;
  }
  if (e->kind == HExpr::Kind::Lit || e->kind == HExpr::Kind::QVar ||
      e->kind == HExpr::Kind::PLook || e->kind == HExpr::Kind::LLook)
    return e;
  c->a = renameStateRefInExpr(e->a, from, to);
  c->b = renameStateRefInExpr(e->b, from, to);
  return c;
}
inline HPtr renameStateRef(const HPtr& A, const std::string& from,
                           const std::string& to) {
  if (!A) return A;
  auto expr = [&](const HExprPtr& e) {
    return renameStateRefInExpr(e, from, to);
  };
  auto c = std::make_shared<HAssertion>(*A);
  switch (A->kind) {
    case HK::Bool:
    case HK::Emp:
      return A;
    case HK::Cmp:
      c->e1 = expr(A->e1);
      c->e2 = expr(A->e2);
      return c;
    case HK::And:
    case HK::Or:
    case HK::Implies:
    case HK::Otimes:
      c->a = renameStateRef(A->a, from, to);
      c->b = renameStateRef(A->b, from, to);
      return c;
    case HK::ForallVal:
    case HK::ExistsVal:
    case HK::BigOtimesFamily:
    case HK::BigOtimes:
    case HK::AtMost:
    case HK::AtLeast:
      c->a = renameStateRef(A->a, from, to);
      return c;
    case HK::ForallState:
    case HK::ExistsState:
    case HK::ForallStateU:
    case HK::ExistsStateU:
    case HK::Box:
      if (A->binder == from) return A;
      c->a = renameStateRef(A->a, from, to);
      return c;
    case HK::Low:
      if (A->binder == from) return A;
      c->e1 = expr(A->e1);
      return c;
    case HK::Member: {
      StateRefExpr s = A->sref;
      if (s.ref == from) s.ref = to;
      for (auto& [x, e] : s.progUpdates) e = expr(e);
      for (auto& [x, e] : s.logUpdates) e = expr(e);
      c->sref = std::move(s);
      return c;
    }
    case HK::CardCmp:
      c->e2 = expr(A->e2);
      if (A->binder == from) return c;
      c->e1 = expr(A->e1);
      if (A->a) c->a = renameStateRef(A->a, from, to);
      return c;
  }
  return A;
}

// ---------------------------------------------------------------------------
// The three backward transformations for atomic statements. They are defined
// on the quantifier fragment; split-union, membership, and cardinality atoms
// are rejected.

namespace detail {

inline void rejectExtended(const HPtr& A, const char* what) {
  switch (A->kind) {
    case HK::Member:
    case HK::Otimes:
    case HK::BigOtimes:
    case HK::BigOtimesFamily:
    case HK::AtMost:
    case HK::AtLeast:
    case HK::CardCmp:
    case HK::ForallStateU:
    case HK::ExistsStateU:
      throw UnsupportedFragment(std::string(what) +
                                " is undefined on set-level atoms");
    default:
      return;
  }
}

class FreshNames {
 public:
  explicit FreshNames(const HPtr& A) {
    NameInfo n = names(A);
    used_ = n.allBinders;
    for (const auto& s : n.freeQVars) used_.insert(s);
    for (const auto& s : n.freeStateRefs) used_.insert(s);
  }
  std::string fresh(const std::string& stem) {
    for (;;) {
      std::string cand = stem + std::to_string(counter_++);
      if (!used_.count(cand)) {
        used_.insert(cand);
        return cand;
      }
    }
  }

 private:
  std::set<std::string> used_;
  int counter_ = 0;
};

}  // namespace detail

class AssignTransformer {
 public:
  AssignTransformer(PExprPtr e, std::string x) : e_(std::move(e)), x_(std::move(x)) {}

  HPtr run(const HPtr& A) {
    detail::rejectExtended(A, "the assignment transformation");
    auto c = std::make_shared<HAssertion>(*A);
    switch (A->kind) {
      case HK::Bool:
      case HK::Cmp:
      case HK::Emp:
        return A;
      case HK::And:
      case HK::Or:
      case HK::Implies:
        c->a = run(A->a);
        c->b = run(A->b);
        return c;
      case HK::ForallVal:
      case HK::ExistsVal:
        c->a = run(A->a);
        return c;
      case HK::ForallState:
      case HK::ExistsState: {
        HPtr body = substLookup(A->a, A->binder, x_, false,
                                liftPExpr(e_, A->binder));
        c->a = run(body);
        return c;
      }
      case HK::Box: {
        c->a = substLookup(A->a, A->binder, x_, false,
                           liftPExpr(e_, A->binder));
        return c;
      }
      case HK::Low: {
        c->e1 = substLookupInExpr(A->e1, A->binder, x_, false,
                                  liftPExpr(e_, A->binder));
        return c;
      }
      default:
        throw UnsupportedFragment("assignment transformation: unknown node");
    }
  }

 private:
  PExprPtr e_;
  std::string x_;
};

inline HPtr transformAssign(const PExprPtr& e, const std::string& x,
                            const HPtr& A) {
  return AssignTransformer(e, x).run(A);
}

class HavocTransformer {
 public:
  HavocTransformer(std::string x, const HPtr& A)
      : x_(std::move(x)), fresh_(A) {}

  HPtr run(const HPtr& A) {
    detail::rejectExtended(A, "the havoc transformation");
    auto c = std::make_shared<HAssertion>(*A);
    switch (A->kind) {
      case HK::Bool:
      case HK::Cmp:
      case HK::Emp:
        return A;
      case HK::And:
      case HK::Or:
      case HK::Implies:
        c->a = run(A->a);
        c->b = run(A->b);
        return c;
      case HK::ForallVal:
      case HK::ExistsVal:
        c->a = run(A->a);
        return c;
      case HK::ForallState:
      case HK::ExistsState: {
        std::string v = fresh_.fresh("v");
        HPtr body =
            substLookup(A->a, A->binder, x_, false, HExpr::mkQVar(v));
        HPtr inner = run(body);
        HK q = A->kind == HK::ForallState ? HK::ForallVal : HK::ExistsVal;
        c->a = HAssertion::mkQuantVal(q, v, DomainRef::ofVar(x_), inner);
        return c;
      }
      case HK::Box: {
        if (!mentions(A->a, A->binder)) return A;
        std::string v = fresh_.fresh("v");
        HPtr body =
            substLookup(A->a, A->binder, x_, false, HExpr::mkQVar(v));
        return HAssertion::mkQuantState(
            HK::ForallState, A->binder,
            HAssertion::mkQuantVal(HK::ForallVal, v, DomainRef::ofVar(x_),
                                   body));
      }
      case HK::Low: {
        std::set<std::string> p;
        hexprNames(A->e1, nullptr, nullptr, &p, nullptr);
        bool uses = false;
        walkExpr(A->e1, A->binder, uses);
        if (!uses) return A;
        // low(e) with the havocked variable inside: expand to the two-state
        // form with one fresh value per state
        std::string s2 = fresh_.fresh("_l");
        std::string v1 = fresh_.fresh("v");
        std::string v2 = fresh_.fresh("v");
        HExprPtr e1 =
            substLookupInExpr(A->e1, A->binder, x_, false, HExpr::mkQVar(v1));
        HExprPtr renamed = renameStateRefInExpr(A->e1, A->binder, s2);
        HExprPtr e2 = substLookupInExpr(renamed, s2, x_, false,
                                        HExpr::mkQVar(v2));
        return HAssertion::mkQuantState(
            HK::ForallState, A->binder,
            HAssertion::mkQuantVal(
                HK::ForallVal, v1, DomainRef::ofVar(x_),
                HAssertion::mkQuantState(
                    HK::ForallState, s2,
                    HAssertion::mkQuantVal(
                        HK::ForallVal, v2, DomainRef::ofVar(x_),
                        HAssertion::mkCmp(CmpOp::Eq, e1, e2)))));
      }
      default:
        throw UnsupportedFragment("havoc transformation: unknown node");
    }
  }

 private:
  static void walkExpr(const HExprPtr& e, const std::string& ref, bool& uses) {
    if (!e || uses) return;
    if (e->kind == HExpr::Kind::PLook && e->stateRef == ref) {
      uses = true;
      return;
    }
    walkExpr(e->a, ref, uses);
    walkExpr(e->b, ref, uses);
  }
  bool mentions(const HPtr& A, const std::string& binder) {
    // does the state-level body look up the havocked variable of `binder`?
    bool found = false;
    scan(A, binder, found);
    return found;
  }
  void scan(const HPtr& A, const std::string& ref, bool& found) {
    if (!A || found) return;
    switch (A->kind) {
      case HK::Cmp:
        scanE(A->e1, ref, found);
        scanE(A->e2, ref, found);
        return;
      case HK::Low:
        if (A->binder != ref) scanE(A->e1, ref, found);
        return;
      default:
        if (A->e1) scanE(A->e1, ref, found);
        if (A->e2) scanE(A->e2, ref, found);
        if (A->a) scan(A->a, ref, found);
        if (A->b) scan(A->b, ref, found);
        return;
    }
  }
  void scanE(const HExprPtr& e, const std::string& ref, bool& found) {
    if (!e || found) return;
    if (e->kind == HExpr::Kind::PLook && e->stateRef == ref &&
        e->field == x_) {
      found = true;
      return;
    }
    scanE(e->a, ref, found);
    scanE(e->b, ref, found);
  }

  std::string x_;
  detail::FreshNames fresh_;
};

inline HPtr transformHavoc(const std::string& x, const HPtr& A) {
  return HavocTransformer(x, A).run(A);
}

class AssumeTransformer {
 public:
  AssumeTransformer(StatePred p, const HPtr& A)
      : p_(std::move(p)), fresh_(A) {
    NameInfo n = names(p_.body);
    for (const auto& r : n.freeStateRefs)
      if (r != p_.self) pFree_.insert(r);
  }

  HPtr run(const HPtr& A) {
    detail::rejectExtended(A, "the assume transformation");
    auto c = std::make_shared<HAssertion>(*A);
    switch (A->kind) {
      case HK::Bool:
      case HK::Cmp:
        return A;
      case HK::And:
      case HK::Or:
      case HK::Implies:
        c->a = run(A->a);
        c->b = run(A->b);
        return c;
      case HK::ForallVal:
      case HK::ExistsVal:
        c->a = run(A->a);
        return c;
      case HK::ForallState:
      case HK::ExistsState: {
        std::string binder = A->binder;
        HPtr body = A->a;
        if (pFree_.count(binder)) {
          std::string nb = fresh_.fresh("_r");
          body = renameStateRef(body, binder, nb);
          binder = nb;
        }
        HPtr guard = renameStateRef(p_.body, p_.self, binder);
        HPtr inner = run(body);
        if (A->kind == HK::ForallState)
          return HAssertion::mkQuantState(HK::ForallState, binder,
                                          HAssertion::mkImplies(guard, inner));
        return HAssertion::mkQuantState(HK::ExistsState, binder,
                                        HAssertion::mkAnd(guard, inner));
      }
      case HK::Emp: {
        std::string s = fresh_.fresh("_r");
        HPtr guard = renameStateRef(p_.body, p_.self, s);
        return HAssertion::mkQuantState(
            HK::ForallState, s,
            HAssertion::mkImplies(guard, HAssertion::mkFalse()));
      }
      case HK::Box: {
        std::string binder = A->binder;
        HPtr body = A->a;
        if (pFree_.count(binder)) {
          std::string nb = fresh_.fresh("_r");
          body = renameStateRef(body, binder, nb);
          binder = nb;
        }
        HPtr guard = renameStateRef(p_.body, p_.self, binder);
        return HAssertion::mkQuantState(HK::ForallState, binder,
                                        HAssertion::mkImplies(guard, body));
      }
      case HK::Low: {
        std::string s1 = A->binder;
        HExprPtr e1 = A->e1;
        if (pFree_.count(s1)) {
          std::string nb = fresh_.fresh("_r");
          e1 = renameStateRefInExpr(e1, s1, nb);
          s1 = nb;
        }
        std::string s2 = fresh_.fresh("_r");
        HExprPtr e2 = renameStateRefInExpr(e1, s1, s2);
        HPtr g1 = renameStateRef(p_.body, p_.self, s1);
        HPtr g2 = renameStateRef(p_.body, p_.self, s2);
        return HAssertion::mkQuantState(
            HK::ForallState, s1,
            HAssertion::mkImplies(
                g1, HAssertion::mkQuantState(
                        HK::ForallState, s2,
                        HAssertion::mkImplies(
                            g2, HAssertion::mkCmp(CmpOp::Eq, e1, e2)))));
      }
      default:
        throw UnsupportedFragment("assume transformation: unknown node");
    }
  }

 private:
  StatePred p_;
  std::set<std::string> pFree_;
  detail::FreshNames fresh_;
};

inline HPtr transformAssume(const StatePred& p, const HPtr& A) {
  return AssumeTransformer(p, A).run(A);
}

inline HPtr transformAssumePExpr(const PExprPtr& guard, const HPtr& A) {
  StatePred p;
  p.self = "_g";
  p.body = liftPExprToAssertion(guard, p.self);
  return transformAssume(p, A);
}

// ---------------------------------------------------------------------------
// Cleanup: drops value quantifiers whose binder never occurs. The havoc
// transformation introduces one quantifier per state binder regardless of
// use; this pass elides the vacuous ones.

inline bool usesQVar(const HExprPtr& e, const std::string& name) {
  if (!e) return false;
  if (e->kind == HExpr::Kind::QVar) return e->var == name;
  return usesQVar(e->a, name) || usesQVar(e->b, name);
}

inline bool usesQVarA(const HPtr& A, const std::string& name) {
  if (!A) return false;
  switch (A->kind) {
    case HK::ForallVal:
    case HK::ExistsVal:
    case HK::BigOtimesFamily:
      if (A->binder == name) return false;
      return usesQVarA(A->a, name);
    case HK::Member: {
      for (const auto& [x, e] : A->sref.progUpdates)
        if (usesQVar(e, name)) return true;
      for (const auto& [x, e] : A->sref.logUpdates)
        if (usesQVar(e, name)) return true;
      return false;
    }
    default:
      return usesQVar(A->e1, name) || usesQVar(A->e2, name) ||
             usesQVarA(A->a, name) || usesQVarA(A->b, name);
  }
}

inline HPtr simplify(const HPtr& A) {
  if (!A) return A;
  auto c = std::make_shared<HAssertion>(*A);
  switch (A->kind) {
    case HK::ForallVal:
    case HK::ExistsVal: {
      HPtr body = simplify(A->a);
      if (!usesQVarA(body, A->binder)) return body;
      c->a = body;
      return c;
    }
    case HK::And:
    case HK::Or:
    case HK::Implies:
    case HK::Otimes:
      c->a = simplify(A->a);
      c->b = simplify(A->b);
      return c;
    case HK::ForallState:
    case HK::ExistsState:
    case HK::ForallStateU:
    case HK::ExistsStateU:
    case HK::Box:
    case HK::BigOtimes:
    case HK::BigOtimesFamily:
    case HK::AtMost:
    case HK::AtLeast:
      c->a = simplify(A->a);
      return c;
    case HK::CardCmp:
      if (A->a) c->a = simplify(A->a);
      return c;
    default:
      return A;
  }
}

}  // namespace hhl
