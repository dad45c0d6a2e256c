// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hhl/hyper_ast.hpp"
#include "hhl/universe.hpp"

namespace hhl {

// Thrown when a set operator cannot be decided at the configured bound.
// Distinct from an ordinary false answer.
struct SatUndecidable : std::runtime_error {
  explicit SatUndecidable(const std::string& m) : std::runtime_error(m) {}
};

// Rigid bindings in scope while judging an assertion: state variables fixed
// by an enclosing rule (Sigma) and value variables (Delta). Closed
// assertions are judged under empty environments.
struct RigidEnv {
  // states are referenced, not copied; quantifier binding must stay cheap.
  // Bound states live in the judged set, the universe grid, or a caller's
  // instantiation store, all of which outlive the judgement.
  std::map<std::string, const ExtState*> states;
  std::map<std::string, Value> values;
};

// Decides satisfaction of hyper-assertions over finite state sets. Value
// quantifiers range over universe domains. Split-union operators are decided
// exactly by dynamic programming over subset masks (sets capped at
// `coverCap` states). The `bounded` flag records that a truncated construct
// (indexed family over a prefix of the naturals, superset search) took part
// in the decision.
class SatChecker {
 public:
  explicit SatChecker(const Universe& u) : u_(u) {}

  bool sat(const StateSet& S, RigidEnv& env, const HPtr& A) {
    if (S.size() > 31) throw SatUndecidable("state set too large");
    switch (A->kind) {
      case HK::Bool: return A->bval;
      case HK::Cmp: return cmp(A->cop, eval(A->e1, env), eval(A->e2, env));
      case HK::And: return sat(S, env, A->a) && sat(S, env, A->b);
      case HK::Or: return sat(S, env, A->a) || sat(S, env, A->b);
      case HK::Implies: return !sat(S, env, A->a) || sat(S, env, A->b);
      case HK::ForallVal:
      case HK::ExistsVal: {
        bool isAll = A->kind == HK::ForallVal;
        const std::vector<Value>& dom = resolveDomain(A->dom);
        auto saved = bind(env.values, A->binder);
        for (const auto& v : dom) {
          env.values[A->binder] = v;
          bool r = sat(S, env, A->a);
          if (isAll && !r) return unbind(env.values, A->binder, saved), false;
          if (!isAll && r) return unbind(env.values, A->binder, saved), true;
        }
        unbind(env.values, A->binder, saved);
        return isAll;
      }
      case HK::ForallState:
      case HK::ExistsState: {
        bool isAll = A->kind == HK::ForallState;
        auto saved = bind(env.states, A->binder);
        for (size_t i = 0; i < S.size(); i++) {
          env.states[A->binder] = &S[i];
          bool r = sat(S, env, A->a);
          if (isAll && !r) return unbind(env.states, A->binder, saved), false;
          if (!isAll && r) return unbind(env.states, A->binder, saved), true;
        }
        unbind(env.states, A->binder, saved);
        return isAll;
      }
      case HK::ForallStateU:
      case HK::ExistsStateU: {
        bool isAll = A->kind == HK::ForallStateU;
        const auto& g = grid();
        auto saved = bind(env.states, A->binder);
        for (const auto& st : g) {
          env.states[A->binder] = &st;
          bool r = sat(S, env, A->a);
          if (isAll && !r) return unbind(env.states, A->binder, saved), false;
          if (!isAll && r) return unbind(env.states, A->binder, saved), true;
        }
        unbind(env.states, A->binder, saved);
        return isAll;
      }
      case HK::Emp: return S.empty();
      case HK::Box: {
        auto saved = bind(env.states, A->binder);
        for (size_t i = 0; i < S.size(); i++) {
          env.states[A->binder] = &S[i];
          if (!sat(S, env, A->a))
            return unbind(env.states, A->binder, saved), false;
        }
        unbind(env.states, A->binder, saved);
        return true;
      }
      case HK::Low: {
        std::optional<Value> first;
        auto saved = bind(env.states, A->binder);
        for (size_t i = 0; i < S.size(); i++) {
          env.states[A->binder] = &S[i];
          Value v = eval(A->e1, env);
          if (!first)
            first = v;
          else if (!(*first == v))
            return unbind(env.states, A->binder, saved), false;
        }
        unbind(env.states, A->binder, saved);
        return true;
      }
      case HK::Member: return S.contains(resolveState(A->sref, env));
      case HK::Otimes: {
        uint32_t n = checkCoverSize(S);
        std::vector<char> satA = satOnSubsets(S, env, A->a);
        std::vector<char> satB = satOnSubsets(S, env, A->b);
        uint32_t full = n == 32 ? 0xffffffffu : (1u << n) - 1;
        for (uint32_t t1 = 0; t1 <= full; t1++) {
          if (!satA[t1]) continue;
          // t2 must cover full \ t1; enumerate supersets of the complement
          uint32_t need = full & ~t1;
          for (uint32_t extra = t1;; extra = (extra - 1) & t1) {
            if (satB[need | extra]) return true;
            if (extra == 0) break;
          }
        }
        return false;
      }
      case HK::BigOtimes: {
        uint32_t n = checkCoverSize(S);
        std::vector<char> satP = satOnSubsets(S, env, A->a);
        uint32_t full = n == 32 ? 0xffffffffu : (1u << n) - 1;
        // reachable unions of satisfying parts (the empty family gives 0)
        std::vector<char> reach(full + 1, 0);
        reach[0] = 1;
        std::vector<uint32_t> work = {0};
        while (!work.empty()) {
          uint32_t u = work.back();
          work.pop_back();
          if (u == full) return true;
          for (uint32_t t = 0; t <= full; t++) {
            if (!satP[t]) continue;
            uint32_t nu = u | t;
            if (!reach[nu]) {
              reach[nu] = 1;
              work.push_back(nu);
            }
          }
        }
        return reach[full];
      }
      case HK::BigOtimesFamily: {
        uint32_t n = checkCoverSize(S);
        uint32_t full = n == 32 ? 0xffffffffu : (1u << n) - 1;
        std::vector<Value> indices;
        if (A->dom.kind == DomainRef::Kind::Default) {
          // an index family over the naturals, truncated at the iteration
          // bound
          for (int i = 0; i <= u_.maxIter; i++) indices.emplace_back(i);
          bounded_ = true;
        } else {
          indices = resolveDomain(A->dom);
        }
        std::vector<char> reach(full + 1, 0);
        reach[0] = 1;
        auto saved = bind(env.values, A->binder);
        for (const auto& idx : indices) {
          env.values[A->binder] = idx;
          std::vector<char> satI = satOnSubsets(S, env, A->a);
          std::vector<char> next(full + 1, 0);
          bool any = false;
          for (uint32_t u = 0; u <= full; u++) {
            if (!reach[u]) continue;
            for (uint32_t t = 0; t <= full; t++)
              if (satI[t]) {
                next[u | t] = 1;
                any = true;
              }
          }
          reach = std::move(next);
          if (!any) break;
        }
        unbind(env.values, A->binder, saved);
        return reach[full];
      }
      case HK::AtMost: {
        // some superset (drawn from the universe grid) satisfies the body;
        // necessarily a bounded search
        bounded_ = true;
        if (sat(S, env, A->a)) return true;
        const auto& g = grid();
        std::vector<ExtState> extras;
        for (const auto& st : g)
          if (!S.contains(st)) extras.push_back(st);
        int room = u_.maxCard - static_cast<int>(S.size());
        return extendSearch(S, env, A->a, extras, 0, room);
      }
      case HK::AtLeast: {
        uint32_t n = checkCoverSize(S);
        uint32_t full = n == 32 ? 0xffffffffu : (1u << n) - 1;
        for (uint32_t t = 0;; t++) {
          if (sat(S.subsetByMask(t), env, A->a)) return true;
          if (t == full) break;
        }
        return false;
      }
      case HK::CardCmp: {
        std::vector<Value> vals;
        auto saved = bind(env.states, A->binder);
        for (size_t i = 0; i < S.size(); i++) {
          env.states[A->binder] = &S[i];
          if (A->a && !sat(S, env, A->a)) continue;
          Value v = eval(A->e1, env);
          bool seen = false;
          for (const auto& w : vals)
            if (w == v) {
              seen = true;
              break;
            }
          if (!seen) vals.push_back(v);
        }
        unbind(env.states, A->binder, saved);
        Value bound = eval(A->e2, env);
        return cmp(A->cop, Value(Int(vals.size())), bound);
      }
    }
    throw UnsupportedFragment("sat: unknown node");
  }

  Value eval(const HExprPtr& e, const RigidEnv& env) {
    switch (e->kind) {
      case HExpr::Kind::Lit: return e->lit;
      case HExpr::Kind::QVar: {
        auto it = env.values.find(e->var);
        if (it == env.values.end())
          throw EvalError("unbound value variable '" + e->var + "'");
        return it->second;
      }
      case HExpr::Kind::PLook: {
        const ExtState& st = lookupState(e->stateRef, env);
        return st.prog.vals[u_.layout->pvar(e->field)];
      }
      case HExpr::Kind::LLook: {
        const ExtState& st = lookupState(e->stateRef, env);
        return st.log[u_.layout->lvar(e->field)];
      }
      case HExpr::Kind::Bin: {
        Value a = eval(e->a, env);
        Value b = eval(e->b, env);
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
      case HExpr::Kind::Len: return valueLen(eval(e->a, env));
      case HExpr::Kind::Cmp:
        return Value(cmp(e->cop, eval(e->a, env), eval(e->b, env)));
      case HExpr::Kind::Bool: {
        switch (e->lop) {
          case BoolOp::Not: return Value(!eval(e->a, env).asBool());
          case BoolOp::And:
            return Value(eval(e->a, env).asBool() && eval(e->b, env).asBool());
          case BoolOp::Or:
            return Value(eval(e->a, env).asBool() || eval(e->b, env).asBool());
          case BoolOp::Implies:
            return Value(!eval(e->a, env).asBool() ||
                         eval(e->b, env).asBool());
        }
        break;
      }
    }
    throw EvalError("malformed hyper-expression");
  }

  ExtState resolveState(const StateRefExpr& s, const RigidEnv& env) {
    ExtState st = s.literal ? *s.literal : lookupState(s.ref, env);
    for (const auto& [x, e] : s.progUpdates)
      st.prog.vals[u_.layout->pvar(x)] = eval(e, env);
    for (const auto& [x, e] : s.logUpdates)
      st.log[u_.layout->lvar(x)] = eval(e, env);
    return st;
  }

  const std::vector<Value>& resolveDomain(const DomainRef& d) {
    switch (d.kind) {
      case DomainRef::Kind::Default:
        if (defaultDom_.empty()) defaultDom_ = u_.defaultValueDomain();
        return defaultDom_;
      case DomainRef::Kind::OfVar: return u_.varDomain(d.var);
      case DomainRef::Kind::Explicit: return d.values;
    }
    return defaultDom_;
  }

  const std::vector<ExtState>& grid() {
    if (!grid_) grid_ = u_.grid();
    return *grid_;
  }

  bool bounded() const { return bounded_; }
  void noteBounded() { bounded_ = true; }
  const Universe& universe() const { return u_; }

  static bool cmp(CmpOp op, const Value& a, const Value& b) {
    switch (op) {
      case CmpOp::Eq: return a == b;
      case CmpOp::Ne: return !(a == b);
      case CmpOp::Lt: return valueLess(a, b);
      case CmpOp::Le: return valueLeq(a, b);
      case CmpOp::Gt: return valueLess(b, a);
      case CmpOp::Ge: return valueLeq(b, a);
    }
    return false;
  }

 private:
  const ExtState& lookupState(const std::string& ref, const RigidEnv& env) {
    auto it = env.states.find(ref);
    if (it == env.states.end() || it->second == nullptr)
      throw EvalError("unbound state variable '" + ref + "'");
    return *it->second;
  }

  uint32_t checkCoverSize(const StateSet& S) {
    if (static_cast<int>(S.size()) > coverCap_)
      throw SatUndecidable("set of " + std::to_string(S.size()) +
                           " states exceeds the split-analysis cap of " +
                           std::to_string(coverCap_));
    return static_cast<uint32_t>(S.size());
  }

  std::vector<char> satOnSubsets(const StateSet& S, RigidEnv& env,
                                 const HPtr& A) {
    uint32_t n = static_cast<uint32_t>(S.size());
    uint32_t full = (n >= 31) ? 0x7fffffffu : (1u << n) - 1;
    std::vector<char> out(full + 1, 0);
    for (uint32_t t = 0; t <= full; t++)
      out[t] = sat(S.subsetByMask(t), env, A) ? 1 : 0;
    return out;
  }

  bool extendSearch(const StateSet& S, RigidEnv& env, const HPtr& A,
                    const std::vector<ExtState>& extras, size_t from,
                    int room) {
    if (room <= 0) return false;
    for (size_t i = from; i < extras.size(); i++) {
      StateSet bigger = S;
      bigger.insert(extras[i]);
      if (sat(bigger, env, A)) return true;
      if (extendSearch(bigger, env, A, extras, i + 1, room - 1)) return true;
    }
    return false;
  }

  template <typename M>
  std::optional<typename M::mapped_type> bind(M& m, const std::string& k) {
    auto it = m.find(k);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }
  template <typename M, typename Saved>
  void unbind(M& m, const std::string& k, const Saved& saved) {
    if (saved)
      m[k] = *saved;
    else
      m.erase(k);
  }

  const Universe& u_;
  std::vector<Value> defaultDom_;
  std::optional<std::vector<ExtState>> grid_;
  bool bounded_ = false;
  int coverCap_ = 12;
};

}  // namespace hhl
