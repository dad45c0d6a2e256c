// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <vector>

#include "hhl/ast.hpp"
#include "hhl/state.hpp"

namespace hhl {

// ---------------------------------------------------------------------------
// Program expression evaluation over a single program state.

inline Value evalPExpr(const PExprPtr& e, const PState& s, const Layout& ly) {
  switch (e->kind) {
    case PExpr::Kind::Lit: return e->lit;
    case PExpr::Kind::Var: return s.vals[ly.pvar(e->var)];
    case PExpr::Kind::Len: return valueLen(evalPExpr(e->a, s, ly));
    case PExpr::Kind::Bin: {
      Value a = evalPExpr(e->a, s, ly);
      Value b = evalPExpr(e->b, s, ly);
      switch (e->bop) {
        case BinOp::Add: return valueAdd(a, b);
        case BinOp::Sub: return valueSub(a, b);
        case BinOp::Mul: return valueMul(a, b);
        case BinOp::Xor: return valueXor(a, b);
        case BinOp::Concat: return valueConcat(a, b);
        case BinOp::Index: return valueIndex(a, b);
      }
      break;
    }
    case PExpr::Kind::Cmp: {
      Value a = evalPExpr(e->a, s, ly);
      Value b = evalPExpr(e->b, s, ly);
      switch (e->cop) {
        case CmpOp::Eq: return Value(a == b);
        case CmpOp::Ne: return Value(!(a == b));
        case CmpOp::Lt: return Value(valueLess(a, b));
        case CmpOp::Le: return Value(valueLeq(a, b));
        case CmpOp::Gt: return Value(valueLess(b, a));
        case CmpOp::Ge: return Value(valueLeq(b, a));
      }
      break;
    }
    case PExpr::Kind::Bool: {
      switch (e->lop) {
        case BoolOp::Not: return Value(!evalPExpr(e->a, s, ly).asBool());
        case BoolOp::And:
          return Value(evalPExpr(e->a, s, ly).asBool() &&
                       evalPExpr(e->b, s, ly).asBool());
        case BoolOp::Or:
          return Value(evalPExpr(e->a, s, ly).asBool() ||
                       evalPExpr(e->b, s, ly).asBool());
        case BoolOp::Implies:
          return Value(!evalPExpr(e->a, s, ly).asBool() ||
                       evalPExpr(e->b, s, ly).asBool());
      }
      break;
    }
  }
  throw EvalError("malformed expression");
}

inline bool evalGuard(const PExprPtr& e, const PState& s, const Layout& ly) {
  Value v = evalPExpr(e, s, ly);
  if (!v.isBool()) throw EvalError("guard is not boolean: " + v.show());
  return v.asBool();
}

// ---------------------------------------------------------------------------
// Executable big-step semantics, finitized: havoc draws from a declared
// per-variable domain and iteration unrolls at most maxIter times. Every
// verdict that touched the iteration bound is reported as bounded.

struct Fuel {
  int maxIter = 3;
  std::map<std::string, std::vector<Value>> havocDomain;
};

class Semantics {
 public:
  Semantics(LayoutPtr layout, Fuel fuel)
      : ly_(std::move(layout)), fuel_(std::move(fuel)) {}

  // All final program states of a desugared command, within fuel. The
  // iteration of a loop stops early on a fixpoint, in which case the result
  // is exact; otherwise the shared bounded flag is set.
  std::set<PState> finals(const CommandPtr& c, const PState& s) {
    // the key holds the node alive so addresses cannot be recycled
    auto key = std::make_pair(c, s);
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      if (it->second.bounded) bounded_ = true;
      return it->second.states;
    }
    Entry e = compute(c, s);
    if (e.bounded) bounded_ = true;
    memo_.emplace(std::move(key), e);
    return e.states;
  }

  // Extended semantics: execute from every state in S, logical components
  // pass through unchanged.
  StateSet sem(const CommandPtr& c, const StateSet& S) {
    CommandPtr d = desugar(c);
    StateSet out;
    for (const auto& phi : S)
      for (const auto& fin : finals(d, phi.prog))
        out.insert(ExtState{phi.log, fin});
    return out;
  }

  // True iff every state in S has at least one final state within fuel.
  // A false answer is definitive only up to the iteration bound.
  bool terminatesAll(const CommandPtr& c, const StateSet& S) {
    CommandPtr d = desugar(c);
    for (const auto& phi : S)
      if (finals(d, phi.prog).empty()) return false;
    return true;
  }

  bool bounded() const { return bounded_; }
  const Layout& layout() const { return *ly_; }

 private:
  struct Entry {
    std::set<PState> states;
    bool bounded = false;
  };

  Entry compute(const CommandPtr& c, const PState& s) {
    Entry out;
    switch (c->kind) {
      case Command::Kind::Skip:
        out.states.insert(s);
        break;
      case Command::Kind::Assign: {
        PState t = s;
        t.vals[ly_->pvar(c->var)] = evalPExpr(c->expr, s, *ly_);
        out.states.insert(std::move(t));
        break;
      }
      case Command::Kind::Havoc: {
        auto it = fuel_.havocDomain.find(c->var);
        if (it == fuel_.havocDomain.end() || it->second.empty())
          throw EvalError("havoc on '" + c->var +
                          "' requires a finite domain declaration");
        for (const auto& v : it->second) {
          PState t = s;
          t.vals[ly_->pvar(c->var)] = v;
          out.states.insert(std::move(t));
        }
        break;
      }
      case Command::Kind::Assume:
        if (evalGuard(c->expr, s, *ly_)) out.states.insert(s);
        break;
      case Command::Kind::Seq: {
        bool sub = false;
        for (const auto& mid : finalsTracked(c->c1, s, sub))
          for (const auto& fin : finalsTracked(c->c2, mid, sub))
            out.states.insert(fin);
        out.bounded = sub;
        break;
      }
      case Command::Kind::Choice: {
        bool sub = false;
        for (const auto& fin : finalsTracked(c->c1, s, sub))
          out.states.insert(fin);
        for (const auto& fin : finalsTracked(c->c2, s, sub))
          out.states.insert(fin);
        out.bounded = sub;
        break;
      }
      case Command::Kind::Iter: {
        // Frontier iteration of the body; the union of all layers is the
        // set of states reachable with at most maxIter unrollings.
        bool sub = false;
        std::set<PState> visited = {s};
        std::set<PState> frontier = {s};
        for (int n = 0; n < fuel_.maxIter && !frontier.empty(); n++) {
          std::set<PState> next;
          for (const auto& t : frontier)
            for (const auto& fin : finalsTracked(c->c1, t, sub))
              if (!visited.count(fin)) next.insert(fin);
          for (const auto& t : next) visited.insert(t);
          frontier = std::move(next);
        }
        if (!frontier.empty()) {
          // One more layer would be explored with more fuel; check whether
          // it only revisits known states (then the result is exact).
          std::set<PState> probe;
          for (const auto& t : frontier)
            for (const auto& fin : finalsTracked(c->c1, t, sub))
              probe.insert(fin);
          for (const auto& t : probe)
            if (!visited.count(t)) {
              out.bounded = true;
              break;
            }
        }
        out.bounded = out.bounded || sub;
        out.states = std::move(visited);
        break;
      }
      case Command::Kind::If:
      case Command::Kind::While:
        throw EvalError("internal: semantics requires desugared commands");
    }
    return out;
  }

  std::set<PState> finalsTracked(const CommandPtr& c, const PState& s,
                                 bool& sub) {
    bool before = bounded_;
    bounded_ = false;
    std::set<PState> r = finals(c, s);
    sub = sub || bounded_;
    bounded_ = before || bounded_;
    return r;
  }

  struct KeyLess {
    bool operator()(const std::pair<CommandPtr, PState>& a,
                    const std::pair<CommandPtr, PState>& b) const {
      if (a.first.get() != b.first.get()) return a.first.get() < b.first.get();
      return a.second < b.second;
    }
  };

  LayoutPtr ly_;
  Fuel fuel_;
  std::map<std::pair<CommandPtr, PState>, Entry, KeyLess> memo_;
  bool bounded_ = false;
};

}  // namespace hhl
