// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "hhl/hyper_ast.hpp"
#include "hhl/hyper_parser.hpp"
#include "hhl/transform.hpp"
#include "hhl/universe.hpp"

namespace hhl {

struct EncodingError : std::runtime_error {
  explicit EncodingError(const std::string& m) : std::runtime_error(m) {}
};

// An assertion of a source logic: a boolean condition over k distinguished
// extended states. The body may use value quantifiers but no state
// quantifiers or set-level atoms.
struct TupleAssertion {
  std::vector<std::string> refs;
  HPtr body;

  int arity() const { return static_cast<int>(refs.size()); }
};

inline void validateTupleAssertion(const TupleAssertion& t) {
  struct Walk {
    static void go(const HPtr& A) {
      if (!A) return;
      switch (A->kind) {
        case HK::ForallState:
        case HK::ExistsState:
        case HK::ForallStateU:
        case HK::ExistsStateU:
        case HK::Emp:
        case HK::Box:
        case HK::Low:
        case HK::Member:
        case HK::Otimes:
        case HK::BigOtimes:
        case HK::BigOtimesFamily:
        case HK::AtMost:
        case HK::AtLeast:
        case HK::CardCmp:
          throw EncodingError(
              "source-logic assertions must be conditions over their "
              "distinguished states only");
        default:
          go(A->a);
          go(A->b);
      }
    }
  };
  Walk::go(t.body);
  NameInfo n = names(t.body);
  for (const auto& r : n.freeStateRefs) {
    bool ok = false;
    for (const auto& d : t.refs) ok = ok || d == r;
    if (!ok)
      throw EncodingError("assertion mentions undeclared state '" + r + "'");
  }
}

inline TupleAssertion parseTupleAssertion(const std::string& text,
                                          const Program& prog,
                                          std::vector<std::string> refs) {
  Lexer lx(text);
  std::set<std::string> scope(refs.begin(), refs.end());
  AssertionParser p(lx, prog, scope);
  TupleAssertion t;
  t.refs = std::move(refs);
  t.body = p.parseAssertion();
  if (!lx.atEnd()) lx.fail("trailing input after assertion");
  validateTupleAssertion(t);
  return t;
}

struct HyperTriplePair {
  HPtr pre, post;
};

namespace detail {

inline void checkFresh(const TupleAssertion& t, const std::string& var,
                       const char* which) {
  if (names(t.body).fvLog.count(var))
    throw EncodingError("the tag variable '" + var + "' occurs free in the " +
                        which + " assertion");
}

inline HPtr renameRefs(const TupleAssertion& t,
                       const std::vector<std::string>& actual) {
  HPtr b = t.body;
  // two-phase rename avoids collisions between old and new names
  std::vector<std::string> tmp;
  for (size_t i = 0; i < t.refs.size(); i++) {
    tmp.push_back("_tmp" + std::to_string(i));
    b = renameStateRef(b, t.refs[i], tmp.back());
  }
  for (size_t i = 0; i < t.refs.size(); i++)
    b = renameStateRef(b, tmp[i], actual[i]);
  return b;
}

inline HPtr conj(std::vector<HPtr> xs) {
  HPtr out = nullptr;
  for (auto& x : xs) out = out ? HAssertion::mkAnd(out, x) : x;
  return out ? out : HAssertion::mkTrue();
}

inline HPtr tagEq(const std::string& ref, const std::string& t, int i) {
  return HAssertion::mkCmp(CmpOp::Eq, HExpr::mkLLook(ref, t),
                           HExpr::mkLit(Value(i)));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Overapproximate logics.

// Classical single-execution triples: assertions bound the set from above.
inline HyperTriplePair fromHL(const Program&, const TupleAssertion& P,
                              const TupleAssertion& Q) {
  if (P.arity() != 1 || Q.arity() != 1)
    throw EncodingError("unary assertions required");
  auto lift = [&](const TupleAssertion& t) {
    return HAssertion::mkQuantState(HK::ForallState, "_h",
                                    detail::renameRefs(t, {"_h"}));
  };
  return {lift(P), lift(Q)};
}

// k-execution overapproximation with distinguishable executions: states are
// tagged with the execution number in the logical variable t.
inline HyperTriplePair fromCHL(const Program& prog, int k,
                               const TupleAssertion& P,
                               const TupleAssertion& Q,
                               const std::string& t = "t") {
  if (k < 1) throw EncodingError("arity must be positive");
  if (P.arity() != k || Q.arity() != k)
    throw EncodingError("assertion arity mismatch");
  detail::checkFresh(P, t, "pre");
  detail::checkFresh(Q, t, "post");
  auto lift = [&](const TupleAssertion& a) {
    std::vector<std::string> refs;
    std::vector<HPtr> tags;
    for (int i = 1; i <= k; i++) {
      refs.push_back("_c" + std::to_string(i));
      tags.push_back(detail::tagEq(refs.back(), t, i));
    }
    HPtr body = HAssertion::mkImplies(detail::conj(tags),
                                      detail::renameRefs(a, refs));
    for (int i = k - 1; i >= 0; i--)
      body = HAssertion::mkQuantState(HK::ForallState, refs[i], body);
    return body;
  };
  return {lift(P), lift(Q)};
}

// ---------------------------------------------------------------------------
// Underapproximate logics.

// Backward underapproximation: explicit state sets bound the set from below.
inline HyperTriplePair fromIL(const Program&, const std::vector<ExtState>& P,
                              const std::vector<ExtState>& Q) {
  auto lift = [&](const std::vector<ExtState>& states) {
    std::vector<HPtr> ms;
    for (const auto& st : states) {
      StateRefExpr r;
      r.literal = st;
      ms.push_back(HAssertion::mkMember(std::move(r)));
    }
    return detail::conj(std::move(ms));
  };
  return {lift(P), lift(Q)};
}

// Forward underapproximation for single executions.
inline HyperTriplePair fromFU(const Program&, const TupleAssertion& P,
                              const TupleAssertion& Q) {
  if (P.arity() != 1 || Q.arity() != 1)
    throw EncodingError("unary assertions required");
  auto lift = [&](const TupleAssertion& a) {
    return HAssertion::mkQuantState(HK::ExistsState, "_f",
                                    detail::renameRefs(a, {"_f"}));
  };
  return {lift(P), lift(Q)};
}

// Forward underapproximation over k executions, tag-based.
inline HyperTriplePair fromKFU(const Program& prog, int k,
                               const TupleAssertion& P,
                               const TupleAssertion& Q,
                               const std::string& t = "t") {
  if (k < 1) throw EncodingError("arity must be positive");
  if (P.arity() != k || Q.arity() != k)
    throw EncodingError("assertion arity mismatch");
  detail::checkFresh(P, t, "pre");
  detail::checkFresh(Q, t, "post");
  auto lift = [&](const TupleAssertion& a) {
    std::vector<std::string> refs;
    std::vector<HPtr> tags;
    for (int i = 1; i <= k; i++) {
      refs.push_back("_f" + std::to_string(i));
      tags.push_back(detail::tagEq(refs.back(), t, i));
    }
    HPtr body =
        HAssertion::mkAnd(detail::conj(tags), detail::renameRefs(a, refs));
    for (int i = k - 1; i >= 0; i--)
      body = HAssertion::mkQuantState(HK::ExistsState, refs[i], body);
    return body;
  };
  return {lift(P), lift(Q)};
}

// Backward underapproximation over k executions. Tags alone cannot relate
// final tuples to their source tuples, so each source tuple is additionally
// stamped with an identity in the logical variable u; the u-domain must be
// able to distinguish all program-state tuples.
inline HyperTriplePair fromKIL(const Program& prog, const Universe& u, int k,
                               const TupleAssertion& P,
                               const TupleAssertion& Q,
                               const std::string& t = "t",
                               const std::string& uvar = "u") {
  if (k < 1) throw EncodingError("arity must be positive");
  if (P.arity() != k || Q.arity() != k)
    throw EncodingError("assertion arity mismatch");
  if (t == uvar) throw EncodingError("tag variables must be distinct");
  detail::checkFresh(P, t, "pre");
  detail::checkFresh(P, uvar, "pre");
  detail::checkFresh(Q, t, "post");
  detail::checkFresh(Q, uvar, "post");
  if (!names(P.body).fvLog.empty())
    throw EncodingError(
        "the precondition may depend on program variables only");

  // |dom(u)| >= |PStates|^k over the universe
  long double pstates = 1;
  for (const auto& v : u.layout->pvars)
    pstates *= static_cast<long double>(u.varDomain(v).size());
  long double need = 1;
  for (int i = 0; i < k; i++) need *= pstates;
  long double have = static_cast<long double>(u.varDomain(uvar).size());
  if (have < need)
    throw EncodingError(
        "identity domain too small: |dom(" + uvar + ")| must be at least " +
        std::to_string(static_cast<long long>(need)) + " here");

  auto lift = [&](const TupleAssertion& a) {
    std::vector<std::string> refs;
    std::vector<HPtr> tags;
    for (int i = 1; i <= k; i++) {
      refs.push_back("_i" + std::to_string(i));
      tags.push_back(detail::tagEq(refs.back(), t, i));
    }
    std::vector<HPtr> members;
    for (int i = 0; i < k; i++) {
      StateRefExpr r;
      r.ref = refs[i];
      r.logUpdates.emplace_back(uvar, HExpr::mkQVar("_v"));
      members.push_back(HAssertion::mkMember(std::move(r)));
    }
    HPtr witness = HAssertion::mkQuantVal(HK::ExistsVal, "_v",
                                          DomainRef::ofVar(uvar),
                                          detail::conj(std::move(members)));
    HPtr body = HAssertion::mkImplies(
        HAssertion::mkAnd(detail::renameRefs(a, refs), detail::conj(tags)),
        witness);
    for (int i = k - 1; i >= 0; i--)
      body = HAssertion::mkQuantState(HK::ForallStateU, refs[i], body);
    return body;
  };
  return {lift(P), lift(Q)};
}

// ---------------------------------------------------------------------------
// Universal-existential judgments: for all executions of the first group
// there exist executions of the second group. The logical variable t tags
// the execution index, u the group.
inline HyperTriplePair fromKUE(const Program& prog, int k1, int k2,
                               const TupleAssertion& P,
                               const TupleAssertion& Q,
                               const std::string& t = "t",
                               const std::string& uvar = "u") {
  if (k1 < 1 || k2 < 1) throw EncodingError("arities must be positive");
  if (P.arity() != k1 + k2 || Q.arity() != k1 + k2)
    throw EncodingError("assertion arity mismatch");
  if (t == uvar) throw EncodingError("tag variables must be distinct");
  detail::checkFresh(P, t, "pre");
  detail::checkFresh(P, uvar, "pre");
  detail::checkFresh(Q, t, "post");
  detail::checkFresh(Q, uvar, "post");

  auto groupTags = [&](const std::vector<std::string>& refs, int group) {
    std::vector<HPtr> tags;
    for (size_t i = 0; i < refs.size(); i++) {
      tags.push_back(detail::tagEq(refs[i], t, static_cast<int>(i) + 1));
      tags.push_back(detail::tagEq(refs[i], uvar, group));
    }
    return detail::conj(std::move(tags));
  };

  std::vector<std::string> uni, exi;
  for (int i = 1; i <= k1; i++) uni.push_back("_a" + std::to_string(i));
  for (int i = 1; i <= k2; i++) exi.push_back("_b" + std::to_string(i));
  std::vector<std::string> all = uni;
  all.insert(all.end(), exi.begin(), exi.end());

  // precondition: witnesses of the existential group are present, and every
  // properly tagged pair of groups satisfies P
  std::vector<HPtr> witnessConj;
  for (int i = 1; i <= k2; i++) {
    HPtr w = HAssertion::mkQuantState(
        HK::ExistsState, "_w",
        HAssertion::mkAnd(detail::tagEq("_w", t, i),
                          detail::tagEq("_w", uvar, 2)));
    witnessConj.push_back(w);
  }
  HPtr preAll = HAssertion::mkImplies(
      HAssertion::mkAnd(groupTags(uni, 1), groupTags(exi, 2)),
      detail::renameRefs(P, all));
  for (int i = static_cast<int>(all.size()) - 1; i >= 0; i--)
    preAll = HAssertion::mkQuantState(HK::ForallState, all[i], preAll);
  HPtr pre = HAssertion::mkAnd(detail::conj(std::move(witnessConj)), preAll);

  // postcondition: every tagged universal tuple has a tagged existential
  // completion satisfying Q
  HPtr inner = HAssertion::mkAnd(groupTags(exi, 2), detail::renameRefs(Q, all));
  for (int i = k2 - 1; i >= 0; i--)
    inner = HAssertion::mkQuantState(HK::ExistsState, exi[i], inner);
  HPtr post = HAssertion::mkImplies(groupTags(uni, 1), inner);
  for (int i = k1 - 1; i >= 0; i--)
    post = HAssertion::mkQuantState(HK::ForallState, uni[i], post);

  return {pre, post};
}

// ---------------------------------------------------------------------------
// Refinement as a product program: run either command after tagging the
// choice in the program variable t; the final states of the second command
// must all reappear (modulo the tag) among those of the first.
struct RefinementEncoding {
  CommandPtr product;
  HPtr pre;
  HPtr post;
};

inline RefinementEncoding refinementProduct(const Program& prog,
                                            const CommandPtr& c1,
                                            const CommandPtr& c2,
                                            const std::string& t = "t") {
  if (!prog.isPVar(t))
    throw EncodingError("the tag variable '" + t +
                        "' must be a declared program variable");
  auto usesT = [&](const CommandPtr& c) {
    std::set<std::string> vars = wrVars(c);
    if (vars.count(t)) return true;
    // also reject reads
    struct Scan {
      static void go(const CommandPtr& c, const std::string& t, bool& found) {
        if (!c || found) return;
        if (c->expr) {
          std::set<std::string> used;
          pexprVars(c->expr, used);
          if (used.count(t)) found = true;
        }
        go(c->c1, t, found);
        go(c->c2, t, found);
      }
    };
    bool found = false;
    Scan::go(c, t, found);
    return found;
  };
  if (usesT(c1) || usesT(c2))
    throw EncodingError("the tag variable '" + t +
                        "' occurs in one of the commands");

  CommandPtr tagged1 = Command::mkSeq(
      Command::mkAssign(t, PExpr::mkLit(Value(1))), c1);
  CommandPtr tagged2 = Command::mkSeq(
      Command::mkAssign(t, PExpr::mkLit(Value(2))), c2);
  RefinementEncoding r;
  r.product = Command::mkChoice(tagged1, tagged2);
  r.pre = HAssertion::mkTrue();
  StateRefExpr sr;
  sr.ref = "_p";
  sr.progUpdates.emplace_back(t, HExpr::mkLit(Value(1)));
  r.post = HAssertion::mkQuantState(
      HK::ForallState, "_p",
      HAssertion::mkImplies(
          HAssertion::mkCmp(CmpOp::Eq, HExpr::mkPLook("_p", t),
                            HExpr::mkLit(Value(2))),
          HAssertion::mkMember(std::move(sr))));
  return r;
}

}  // namespace hhl
