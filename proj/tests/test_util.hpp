// SPDX-License-Identifier: Apache-2.0
// Shared generators for randomized tests: commands, assertions, and state
// sets over small declared domains.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "hhl/ast.hpp"
#include "hhl/hyper_ast.hpp"
#include "hhl/state.hpp"
#include "hhl/universe.hpp"

namespace hhltest {

using namespace hhl;

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  int upto(int n) {  // uniform in [0, n)
    return static_cast<int>(gen_() % static_cast<uint64_t>(n));
  }
  bool flip() { return upto(2) == 0; }
  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[upto(static_cast<int>(xs.size()))];
  }
  std::mt19937_64& gen() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Random integer-valued expression over the given variables.
inline PExprPtr randomIntExpr(Rng& rng, const std::vector<std::string>& vars,
                              int depth) {
  if (depth <= 0 || rng.upto(3) == 0) {
    if (!vars.empty() && rng.flip()) return PExpr::mkVar(rng.pick(vars));
    return PExpr::mkLit(Value(rng.upto(3)));
  }
  BinOp op = rng.flip() ? BinOp::Add : (rng.flip() ? BinOp::Sub : BinOp::Mul);
  return PExpr::mkBin(op, randomIntExpr(rng, vars, depth - 1),
                      randomIntExpr(rng, vars, depth - 1));
}

inline PExprPtr randomGuard(Rng& rng, const std::vector<std::string>& vars,
                            int depth) {
  CmpOp op = static_cast<CmpOp>(rng.upto(6));
  PExprPtr c = PExpr::mkCmp(op, randomIntExpr(rng, vars, depth),
                            randomIntExpr(rng, vars, depth));
  if (depth > 0 && rng.upto(4) == 0)
    return PExpr::mkBool(rng.flip() ? BoolOp::And : BoolOp::Or, c,
                         randomGuard(rng, vars, depth - 1));
  return c;
}

// Random desugared command over integer variables.
inline CommandPtr randomCommand(Rng& rng, const std::vector<std::string>& vars,
                                int depth) {
  int choice = depth <= 0 ? rng.upto(4) : rng.upto(7);
  switch (choice) {
    case 0: return Command::mkSkip();
    case 1:
      return Command::mkAssign(rng.pick(vars), randomIntExpr(rng, vars, 1));
    case 2: return Command::mkHavoc(rng.pick(vars));
    case 3: return Command::mkAssume(randomGuard(rng, vars, 1));
    case 4:
      return Command::mkSeq(randomCommand(rng, vars, depth - 1),
                            randomCommand(rng, vars, depth - 1));
    case 5:
      return Command::mkChoice(randomCommand(rng, vars, depth - 1),
                               randomCommand(rng, vars, depth - 1));
    default:
      return Command::mkIter(randomCommand(rng, vars, depth - 1));
  }
}

// Random command that may also use the sugared forms (for parser and
// rule-fit tests).
inline CommandPtr randomSugaredCommand(Rng& rng,
                                       const std::vector<std::string>& vars,
                                       int depth) {
  if (depth > 0 && rng.upto(5) == 0)
    return Command::mkIf(randomGuard(rng, vars, 1),
                         randomSugaredCommand(rng, vars, depth - 1),
                         randomSugaredCommand(rng, vars, depth - 1));
  if (depth > 0 && rng.upto(6) == 0)
    return Command::mkWhile(randomGuard(rng, vars, 1),
                            randomSugaredCommand(rng, vars, depth - 1));
  return randomCommand(rng, vars, depth);
}

inline Program smallProgram(const std::vector<std::string>& pvars,
                            const std::vector<std::string>& lvars, Int lo,
                            Int hi) {
  Program p;
  for (const auto& v : pvars)
    p.pvars.push_back({v, DomainHint::intRange(lo, hi)});
  for (const auto& v : lvars)
    p.lvars.push_back({v, DomainHint::intRange(lo, hi)});
  p.body = Command::mkSkip();
  return p;
}

inline ExtState randomState(Rng& rng, const Universe& u) {
  ExtState st;
  for (const auto& v : u.layout->lvars)
    st.log.push_back(rng.pick(u.varDomain(v)));
  for (const auto& v : u.layout->pvars)
    st.prog.vals.push_back(rng.pick(u.varDomain(v)));
  return st;
}

inline StateSet randomStateSet(Rng& rng, const Universe& u, int maxCard) {
  StateSet s;
  int n = rng.upto(maxCard + 1);
  for (int i = 0; i < n; i++) s.insert(randomState(rng, u));
  return s;
}

// Random hyper-assertion in the quantifier fragment. State binders are
// drawn from s0..s3; value binders from y0..y3.
inline HExprPtr randomHExpr(Rng& rng, const std::vector<std::string>& srefs,
                            const std::vector<std::string>& qvars,
                            const std::vector<std::string>& pvars,
                            const std::vector<std::string>& lvars, int depth) {
  if (depth <= 0 || rng.upto(3) == 0) {
    int k = rng.upto(srefs.empty() ? 2 : 4);
    switch (k) {
      case 0: return HExpr::mkLit(Value(rng.upto(3)));
      case 1:
        if (!qvars.empty()) return HExpr::mkQVar(rng.pick(qvars));
        return HExpr::mkLit(Value(rng.upto(3)));
      case 2:
        if (!pvars.empty())
          return HExpr::mkPLook(rng.pick(srefs), rng.pick(pvars));
        return HExpr::mkLit(Value(rng.upto(3)));
      default:
        if (!lvars.empty())
          return HExpr::mkLLook(rng.pick(srefs), rng.pick(lvars));
        return HExpr::mkLit(Value(rng.upto(3)));
    }
  }
  BinOp op = rng.flip() ? BinOp::Add : (rng.flip() ? BinOp::Sub : BinOp::Mul);
  return HExpr::mkBin(op, randomHExpr(rng, srefs, qvars, pvars, lvars, depth - 1),
                      randomHExpr(rng, srefs, qvars, pvars, lvars, depth - 1));
}

struct HGenCtx {
  std::vector<std::string> srefs;
  std::vector<std::string> qvars;
  std::vector<std::string> pvars;
  std::vector<std::string> lvars;
  int nextS = 0;
  int nextQ = 0;
};

inline HPtr randomAssertion(Rng& rng, HGenCtx& ctx, int depth) {
  if (depth <= 0 || rng.upto(4) == 0) {
    if (ctx.srefs.empty() || rng.upto(3) == 0) return HAssertion::mkBool(true);
    CmpOp op = static_cast<CmpOp>(rng.upto(6));
    return HAssertion::mkCmp(
        op, randomHExpr(rng, ctx.srefs, ctx.qvars, ctx.pvars, ctx.lvars, 1),
        randomHExpr(rng, ctx.srefs, ctx.qvars, ctx.pvars, ctx.lvars, 1));
  }
  switch (rng.upto(6)) {
    case 0:
    case 1: {
      HPtr a = randomAssertion(rng, ctx, depth - 1);
      HPtr b = randomAssertion(rng, ctx, depth - 1);
      return rng.flip() ? HAssertion::mkAnd(a, b) : HAssertion::mkOr(a, b);
    }
    case 2:
    case 3: {
      std::string s = "s" + std::to_string(ctx.nextS++);
      ctx.srefs.push_back(s);
      HPtr body = randomAssertion(rng, ctx, depth - 1);
      ctx.srefs.pop_back();
      ctx.nextS--;
      return HAssertion::mkQuantState(
          rng.flip() ? HK::ForallState : HK::ExistsState, s, body);
    }
    default: {
      std::string y = "y" + std::to_string(ctx.nextQ++);
      ctx.qvars.push_back(y);
      HPtr body = randomAssertion(rng, ctx, depth - 1);
      ctx.qvars.pop_back();
      ctx.nextQ--;
      return HAssertion::mkQuantVal(
          rng.flip() ? HK::ForallVal : HK::ExistsVal, y, DomainRef::dflt(),
          body);
    }
  }
}

}  // namespace hhltest
