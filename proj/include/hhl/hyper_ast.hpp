// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hhl/ast.hpp"
#include "hhl/state.hpp"

namespace hhl {

struct UnsupportedFragment : std::runtime_error {
  explicit UnsupportedFragment(const std::string& m) : std::runtime_error(m) {}
};

// ---------------------------------------------------------------------------
// Hyper-expressions: literals, quantified value variables, and per-state
// variable lookups. Boolean operators are value-level here, so state
// predicates embed uniformly.

struct HExpr;
using HExprPtr = std::shared_ptr<const HExpr>;

struct HExpr {
  enum class Kind { Lit, QVar, PLook, LLook, Bin, Len, Cmp, Bool } kind;
  Value lit;
  std::string var;       // QVar name
  std::string stateRef;  // PLook / LLook
  std::string field;     // looked-up variable
  BinOp bop{};
  CmpOp cop{};
  BoolOp lop{};
  HExprPtr a, b;

  static HExprPtr mkLit(Value v) {
    auto e = std::make_shared<HExpr>();
    e->kind = Kind::Lit;
    e->lit = std::move(v);
    return e;
  }
  static HExprPtr mkQVar(std::string n) {
    auto e = std::make_shared<HExpr>();
    e->kind = Kind::QVar;
    e->var = std::move(n);
    return e;
  }
  static HExprPtr mkPLook(std::string ref, std::string field) {
    auto e = std::make_shared<HExpr>();
    e->kind = Kind::PLook;
    e->stateRef = std::move(ref);
    e->field = std::move(field);
    return e;
  }
  static HExprPtr mkLLook(std::string ref, std::string field) {
    auto e = std::make_shared<HExpr>();
    e->kind = Kind::LLook;
    e->stateRef = std::move(ref);
    e->field = std::move(field);
    return e;
  }
  static HExprPtr mkBin(BinOp op, HExprPtr l, HExprPtr r) {
    auto e = std::make_shared<HExpr>();
    e->kind = Kind::Bin;
    e->bop = op;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }
  static HExprPtr mkLen(HExprPtr x) {
    auto e = std::make_shared<HExpr>();
    e->kind = Kind::Len;
    e->a = std::move(x);
    return e;
  }
  static HExprPtr mkCmp(CmpOp op, HExprPtr l, HExprPtr r) {
    auto e = std::make_shared<HExpr>();
    e->kind = Kind::Cmp;
    e->cop = op;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }
  static HExprPtr mkBool(BoolOp op, HExprPtr l, HExprPtr r) {
    auto e = std::make_shared<HExpr>();
    e->kind = Kind::Bool;
    e->lop = op;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }
};

// Range of a quantified value variable: the universe's default domain, the
// domain of a named program/logical variable (what havoc elimination
// introduces), or an explicit value set.
struct DomainRef {
  enum class Kind { Default, OfVar, Explicit } kind = Kind::Default;
  std::string var;
  std::vector<Value> values;

  static DomainRef dflt() { return DomainRef{}; }
  static DomainRef ofVar(std::string v) {
    DomainRef d;
    d.kind = Kind::OfVar;
    d.var = std::move(v);
    return d;
  }
  static DomainRef explicitSet(std::vector<Value> vs) {
    DomainRef d;
    d.kind = Kind::Explicit;
    d.values = std::move(vs);
    return d;
  }
  friend bool operator==(const DomainRef& a, const DomainRef& b) {
    return a.kind == b.kind && a.var == b.var && a.values == b.values;
  }
};

// A state denotation for membership atoms: a named reference or a literal
// state, with optional program/logical variable updates.
struct StateRefExpr {
  std::string ref;                  // empty iff literal
  std::optional<ExtState> literal;  // used by generated refutation preconditions
  std::vector<std::pair<std::string, HExprPtr>> progUpdates;
  std::vector<std::pair<std::string, HExprPtr>> logUpdates;
};

// ---------------------------------------------------------------------------
// Hyper-assertions.

struct HAssertion;
using HPtr = std::shared_ptr<const HAssertion>;

struct HAssertion {
  enum class Kind {
    Bool,          // literal
    Cmp,           // e1 op e2
    And, Or, Implies,
    ForallVal, ExistsVal,       // binder, dom, a
    ForallState, ExistsState,   // binder, a   (range over the judged set)
    ForallStateU, ExistsStateU, // binder, a   (range over the universe grid)
    Emp,                        // the judged set is empty
    Box,                        // binder, a: state predicate holds in every state
    Low,                        // binder, expr: expr evaluates equally in all states
    Member,                     // sref: the denoted state is in the judged set
    Otimes,                     // a, b: the set splits into a part satisfying each
    BigOtimes,                  // a: the set is a union of parts all satisfying a
    BigOtimesFamily,            // binder (index), dom, a: indexed split-union
    AtMost,                     // a: some superset satisfies a
    AtLeast,                    // a: some subset satisfies a
    CardCmp,                    // binder, expr (element), guard?, cop, bound
  } kind;

  bool bval = false;
  CmpOp cop{};
  HExprPtr e1, e2;     // Cmp; CardCmp uses e1 = element expr, e2 = bound
  HPtr a, b;           // children; CardCmp uses a = guard (may be null)
  std::string binder;
  DomainRef dom;
  StateRefExpr sref;

  static HPtr mkBool(bool v) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::Bool;
    x->bval = v;
    return x;
  }
  static HPtr mkCmp(CmpOp op, HExprPtr l, HExprPtr r) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::Cmp;
    x->cop = op;
    x->e1 = std::move(l);
    x->e2 = std::move(r);
    return x;
  }
  static HPtr mkBin(Kind k, HPtr l, HPtr r) {
    auto x = std::make_shared<HAssertion>();
    x->kind = k;
    x->a = std::move(l);
    x->b = std::move(r);
    return x;
  }
  static HPtr mkAnd(HPtr l, HPtr r) { return mkBin(Kind::And, l, r); }
  static HPtr mkOr(HPtr l, HPtr r) { return mkBin(Kind::Or, l, r); }
  static HPtr mkImplies(HPtr l, HPtr r) { return mkBin(Kind::Implies, l, r); }
  static HPtr mkQuantVal(Kind k, std::string binder, DomainRef dom, HPtr body) {
    auto x = std::make_shared<HAssertion>();
    x->kind = k;
    x->binder = std::move(binder);
    x->dom = std::move(dom);
    x->a = std::move(body);
    return x;
  }
  static HPtr mkQuantState(Kind k, std::string binder, HPtr body) {
    auto x = std::make_shared<HAssertion>();
    x->kind = k;
    x->binder = std::move(binder);
    x->a = std::move(body);
    return x;
  }
  static HPtr mkEmp() {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::Emp;
    return x;
  }
  static HPtr mkBox(std::string binder, HPtr body) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::Box;
    x->binder = std::move(binder);
    x->a = std::move(body);
    return x;
  }
  static HPtr mkLow(std::string binder, HExprPtr e) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::Low;
    x->binder = std::move(binder);
    x->e1 = std::move(e);
    return x;
  }
  static HPtr mkMember(StateRefExpr s) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::Member;
    x->sref = std::move(s);
    return x;
  }
  static HPtr mkOtimes(HPtr l, HPtr r) { return mkBin(Kind::Otimes, l, r); }
  static HPtr mkBigOtimes(HPtr body) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::BigOtimes;
    x->a = std::move(body);
    return x;
  }
  static HPtr mkBigOtimesFamily(std::string binder, DomainRef dom, HPtr body) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::BigOtimesFamily;
    x->binder = std::move(binder);
    x->dom = std::move(dom);
    x->a = std::move(body);
    return x;
  }
  static HPtr mkAtMost(HPtr body) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::AtMost;
    x->a = std::move(body);
    return x;
  }
  static HPtr mkAtLeast(HPtr body) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::AtLeast;
    x->a = std::move(body);
    return x;
  }
  static HPtr mkCardCmp(std::string binder, HExprPtr elem, HPtr guard,
                        CmpOp op, HExprPtr bound) {
    auto x = std::make_shared<HAssertion>();
    x->kind = Kind::CardCmp;
    x->binder = std::move(binder);
    x->e1 = std::move(elem);
    x->a = std::move(guard);
    x->cop = op;
    x->e2 = std::move(bound);
    return x;
  }

  static HPtr mkTrue() { return mkBool(true); }
  static HPtr mkFalse() { return mkBool(false); }
};

using HK = HAssertion::Kind;

// ---------------------------------------------------------------------------
// Name collection.

inline void hexprNames(const HExprPtr& e, std::set<std::string>* qvars,
                       std::set<std::string>* srefs,
                       std::set<std::string>* pfields,
                       std::set<std::string>* lfields) {
  if (!e) return;
  switch (e->kind) {
    case HExpr::Kind::QVar:
      if (qvars) qvars->insert(e->var);
      return;
    case HExpr::Kind::PLook:
      if (srefs) srefs->insert(e->stateRef);
      if (pfields) pfields->insert(e->field);
      return;
    case HExpr::Kind::LLook:
      if (srefs) srefs->insert(e->stateRef);
      if (lfields) lfields->insert(e->field);
      return;
    default:
      hexprNames(e->a, qvars, srefs, pfields, lfields);
      hexprNames(e->b, qvars, srefs, pfields, lfields);
      return;
  }
}

struct NameInfo {
  std::set<std::string> freeQVars;
  std::set<std::string> freeStateRefs;
  std::set<std::string> fvProg;  // program vars in look-ups or updates
  std::set<std::string> fvLog;   // logical vars in look-ups or updates
  std::set<std::string> allBinders;
};

inline void collectNames(const HPtr& A, std::set<std::string> boundQ,
                         std::set<std::string> boundS, NameInfo& out) {
  if (!A) return;
  auto expr = [&](const HExprPtr& e) {
    std::set<std::string> q, s;
    hexprNames(e, &q, &s, &out.fvProg, &out.fvLog);
    for (const auto& v : q)
      if (!boundQ.count(v)) out.freeQVars.insert(v);
    for (const auto& v : s)
      if (!boundS.count(v)) out.freeStateRefs.insert(v);
  };
  switch (A->kind) {
    case HK::Bool:
    case HK::Emp:
      return;
    case HK::Cmp:
      expr(A->e1);
      expr(A->e2);
      return;
    case HK::And:
    case HK::Or:
    case HK::Implies:
    case HK::Otimes:
      collectNames(A->a, boundQ, boundS, out);
      collectNames(A->b, boundQ, boundS, out);
      return;
    case HK::ForallVal:
    case HK::ExistsVal:
    case HK::BigOtimesFamily: {
      out.allBinders.insert(A->binder);
      if (A->dom.kind == DomainRef::Kind::OfVar) {
        // a domain tied to a variable name references neither namespace
      }
      auto q = boundQ;
      q.insert(A->binder);
      collectNames(A->a, q, boundS, out);
      return;
    }
    case HK::ForallState:
    case HK::ExistsState:
    case HK::ForallStateU:
    case HK::ExistsStateU:
    case HK::Box: {
      out.allBinders.insert(A->binder);
      auto s = boundS;
      s.insert(A->binder);
      collectNames(A->a, boundQ, s, out);
      return;
    }
    case HK::Low: {
      out.allBinders.insert(A->binder);
      std::set<std::string> q, s;
      hexprNames(A->e1, &q, &s, &out.fvProg, &out.fvLog);
      for (const auto& v : q)
        if (!boundQ.count(v)) out.freeQVars.insert(v);
      for (const auto& v : s)
        if (v != A->binder && !boundS.count(v)) out.freeStateRefs.insert(v);
      return;
    }
    case HK::Member: {
      if (!A->sref.ref.empty() && !boundS.count(A->sref.ref))
        out.freeStateRefs.insert(A->sref.ref);
      for (const auto& [x, e] : A->sref.progUpdates) {
        out.fvProg.insert(x);
        expr(e);
      }
      for (const auto& [x, e] : A->sref.logUpdates) {
        out.fvLog.insert(x);
        expr(e);
      }
      return;
    }
    case HK::BigOtimes:
    case HK::AtMost:
    case HK::AtLeast:
      collectNames(A->a, boundQ, boundS, out);
      return;
    case HK::CardCmp: {
      out.allBinders.insert(A->binder);
      auto s = boundS;
      s.insert(A->binder);
      std::set<std::string> q, ss;
      hexprNames(A->e1, &q, &ss, &out.fvProg, &out.fvLog);
      for (const auto& v : q)
        if (!boundQ.count(v)) out.freeQVars.insert(v);
      for (const auto& v : ss)
        if (!s.count(v)) out.freeStateRefs.insert(v);
      if (A->a) collectNames(A->a, boundQ, s, out);
      expr(A->e2);
      return;
    }
  }
}

inline NameInfo names(const HPtr& A) {
  NameInfo out;
  collectNames(A, {}, {}, out);
  return out;
}

// ---------------------------------------------------------------------------
// Negation, defined recursively; extended set atoms have no syntactic dual
// and are rejected.

inline HPtr negate(const HPtr& A) {
  switch (A->kind) {
    case HK::Bool: return HAssertion::mkBool(!A->bval);
    case HK::Cmp:
      return HAssertion::mkCmp(cmpComplement(A->cop), A->e1, A->e2);
    case HK::And: return HAssertion::mkOr(negate(A->a), negate(A->b));
    case HK::Or: return HAssertion::mkAnd(negate(A->a), negate(A->b));
    case HK::Implies: return HAssertion::mkAnd(A->a, negate(A->b));
    case HK::ForallVal:
      return HAssertion::mkQuantVal(HK::ExistsVal, A->binder, A->dom,
                                    negate(A->a));
    case HK::ExistsVal:
      return HAssertion::mkQuantVal(HK::ForallVal, A->binder, A->dom,
                                    negate(A->a));
    case HK::ForallState:
      return HAssertion::mkQuantState(HK::ExistsState, A->binder, negate(A->a));
    case HK::ExistsState:
      return HAssertion::mkQuantState(HK::ForallState, A->binder, negate(A->a));
    case HK::ForallStateU:
      return HAssertion::mkQuantState(HK::ExistsStateU, A->binder,
                                      negate(A->a));
    case HK::ExistsStateU:
      return HAssertion::mkQuantState(HK::ForallStateU, A->binder,
                                      negate(A->a));
    case HK::Emp:
      return HAssertion::mkQuantState(HK::ExistsState, "_s",
                                      HAssertion::mkTrue());
    case HK::Box:
      return HAssertion::mkQuantState(HK::ExistsState, A->binder,
                                      negate(A->a));
    case HK::Low: {
      std::string b2 = A->binder + "'";
      HExprPtr left = A->e1;
      // rename the binder in the second copy
      struct Ren {
        static HExprPtr go(const HExprPtr& e, const std::string& from,
                           const std::string& to) {
          if (!e) return e;
          auto c = std::make_shared<HExpr>(*e);
          if ((e->kind == HExpr::Kind::PLook ||
               e->kind == HExpr::Kind::LLook) &&
              e->stateRef == from)
            c->stateRef = to;
          c->a = go(e->a, from, to);
          c->b = go(e->b, from, to);
          return c;
        }
      };
      HExprPtr right = Ren::go(A->e1, A->binder, b2);
      return HAssertion::mkQuantState(
          HK::ExistsState, A->binder,
          HAssertion::mkQuantState(HK::ExistsState, b2,
                                   HAssertion::mkCmp(CmpOp::Ne, left, right)));
    }
    case HK::Member:
    case HK::Otimes:
    case HK::BigOtimes:
    case HK::BigOtimesFamily:
    case HK::AtMost:
    case HK::AtLeast:
    case HK::CardCmp:
      throw UnsupportedFragment("negation is not defined for this atom");
  }
  throw UnsupportedFragment("negation: unknown node");
}

// ---------------------------------------------------------------------------
// Syntactic shape report, used by loop- and frame-rule side conditions.

struct ShapeReport {
  bool containsExistsState = false;      // any in-set existential
  bool forallStateAfterAnyExists = false;
  std::set<std::string> fvProg;
  std::set<std::string> fvLog;
};

inline void shapeWalk(const HPtr& A, bool underExists, ShapeReport& r) {
  if (!A) return;
  auto universalHere = [&]() {
    if (underExists) r.forallStateAfterAnyExists = true;
  };
  switch (A->kind) {
    case HK::Bool:
    case HK::Cmp:
      return;
    case HK::And:
    case HK::Or:
    case HK::Implies:
      shapeWalk(A->a, underExists, r);
      shapeWalk(A->b, underExists, r);
      return;
    case HK::ForallVal:
      shapeWalk(A->a, underExists, r);
      return;
    case HK::ExistsVal:
      shapeWalk(A->a, true, r);
      return;
    case HK::ForallState:
    case HK::ForallStateU:
      universalHere();
      shapeWalk(A->a, underExists, r);
      return;
    case HK::ExistsState:
    case HK::ExistsStateU:
      if (A->kind == HK::ExistsState) r.containsExistsState = true;
      shapeWalk(A->a, true, r);
      return;
    case HK::Emp:
    case HK::Box:
    case HK::Low:
      // derived universal state quantifiers
      universalHere();
      if (A->kind == HK::Box) shapeWalk(A->a, underExists, r);
      return;
    case HK::Member:
      // presence of a specific state is existential in nature
      r.containsExistsState = true;
      return;
    case HK::Otimes:
    case HK::BigOtimes:
    case HK::BigOtimesFamily:
    case HK::AtMost:
    case HK::AtLeast:
    case HK::CardCmp:
      // set-level atoms quantify over subsets in both polarities; report
      // conservatively for the side conditions that consult this
      r.containsExistsState = true;
      universalHere();
      if (A->a) shapeWalk(A->a, true, r);
      if (A->b) shapeWalk(A->b, true, r);
      return;
  }
}

inline ShapeReport syntacticShape(const HPtr& A) {
  ShapeReport r;
  shapeWalk(A, false, r);
  NameInfo n = names(A);
  r.fvProg = n.fvProg;
  r.fvLog = n.fvLog;
  return r;
}

// ---------------------------------------------------------------------------
// Alpha-equality: structural equality modulo bound names (positional
// matching of binders, like nameless indices).

inline bool hexprAlphaEq(const HExprPtr& x, const HExprPtr& y,
                         const std::map<std::string, std::string>& qmap,
                         const std::map<std::string, std::string>& smap) {
  if (!x || !y) return x == y;
  if (x->kind != y->kind) return false;
  auto mapped = [](const std::map<std::string, std::string>& m,
                   const std::string& n) {
    auto it = m.find(n);
    return it == m.end() ? n : it->second;
  };
  switch (x->kind) {
    case HExpr::Kind::Lit: return x->lit == y->lit;
    case HExpr::Kind::QVar: return mapped(qmap, x->var) == y->var;
    case HExpr::Kind::PLook:
    case HExpr::Kind::LLook:
      return mapped(smap, x->stateRef) == y->stateRef && x->field == y->field;
    case HExpr::Kind::Bin:
      if (x->bop != y->bop) return false;
      break;
    case HExpr::Kind::Cmp:
      if (x->cop != y->cop) return false;
      break;
    case HExpr::Kind::Bool:
      if (x->lop != y->lop) return false;
      break;
    case HExpr::Kind::Len:
      break;
  }
  return hexprAlphaEq(x->a, y->a, qmap, smap) &&
         hexprAlphaEq(x->b, y->b, qmap, smap);
}

inline bool alphaEqImpl(const HPtr& x, const HPtr& y,
                        std::map<std::string, std::string> qmap,
                        std::map<std::string, std::string> smap) {
  if (!x || !y) return x == y;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case HK::Bool: return x->bval == y->bval;
    case HK::Cmp:
      return x->cop == y->cop && hexprAlphaEq(x->e1, y->e1, qmap, smap) &&
             hexprAlphaEq(x->e2, y->e2, qmap, smap);
    case HK::And:
    case HK::Or:
    case HK::Implies:
    case HK::Otimes:
      return alphaEqImpl(x->a, y->a, qmap, smap) &&
             alphaEqImpl(x->b, y->b, qmap, smap);
    case HK::ForallVal:
    case HK::ExistsVal:
    case HK::BigOtimesFamily: {
      if (!(x->dom == y->dom)) return false;
      qmap[x->binder] = y->binder;
      return alphaEqImpl(x->a, y->a, qmap, smap);
    }
    case HK::ForallState:
    case HK::ExistsState:
    case HK::ForallStateU:
    case HK::ExistsStateU:
    case HK::Box: {
      smap[x->binder] = y->binder;
      return alphaEqImpl(x->a, y->a, qmap, smap);
    }
    case HK::Low: {
      smap[x->binder] = y->binder;
      return hexprAlphaEq(x->e1, y->e1, qmap, smap);
    }
    case HK::Emp:
      return true;
    case HK::Member: {
      auto mapped = [&](const std::string& n) {
        auto it = smap.find(n);
        return it == smap.end() ? n : it->second;
      };
      if (x->sref.literal.has_value() != y->sref.literal.has_value())
        return false;
      if (x->sref.literal && !(*x->sref.literal == *y->sref.literal))
        return false;
      if (mapped(x->sref.ref) != y->sref.ref) return false;
      if (x->sref.progUpdates.size() != y->sref.progUpdates.size() ||
          x->sref.logUpdates.size() != y->sref.logUpdates.size())
        return false;
      for (size_t i = 0; i < x->sref.progUpdates.size(); i++) {
        if (x->sref.progUpdates[i].first != y->sref.progUpdates[i].first)
          return false;
        if (!hexprAlphaEq(x->sref.progUpdates[i].second,
                          y->sref.progUpdates[i].second, qmap, smap))
          return false;
      }
      for (size_t i = 0; i < x->sref.logUpdates.size(); i++) {
        if (x->sref.logUpdates[i].first != y->sref.logUpdates[i].first)
          return false;
        if (!hexprAlphaEq(x->sref.logUpdates[i].second,
                          y->sref.logUpdates[i].second, qmap, smap))
          return false;
      }
      return true;
    }
    case HK::BigOtimes:
    case HK::AtMost:
    case HK::AtLeast:
      return alphaEqImpl(x->a, y->a, qmap, smap);
    case HK::CardCmp: {
      if (x->cop != y->cop) return false;
      if (!hexprAlphaEq(x->e2, y->e2, qmap, smap)) return false;
      smap[x->binder] = y->binder;
      if (!hexprAlphaEq(x->e1, y->e1, qmap, smap)) return false;
      if ((x->a == nullptr) != (y->a == nullptr)) return false;
      return !x->a || alphaEqImpl(x->a, y->a, qmap, smap);
    }
  }
  return false;
}

inline bool alphaEqual(const HPtr& x, const HPtr& y) {
  return alphaEqImpl(x, y, {}, {});
}

// Flattens top-level conjunctions; helper for structural subsumption.
inline void conjuncts(const HPtr& A, std::vector<HPtr>& out) {
  if (A->kind == HK::And) {
    conjuncts(A->a, out);
    conjuncts(A->b, out);
  } else {
    out.push_back(A);
  }
}

// P subsumes Q when every top-level conjunct of Q appears among P's
// (alpha-equal): entailment by dropping conjuncts.
inline bool subsumesByConjuncts(const HPtr& P, const HPtr& Q) {
  std::vector<HPtr> ps, qs;
  conjuncts(P, ps);
  conjuncts(Q, qs);
  for (const auto& q : qs) {
    bool found = false;
    for (const auto& p : ps)
      if (alphaEqual(p, q)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace hhl
