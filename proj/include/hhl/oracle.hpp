// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "hhl/hyper_sat.hpp"
#include "hhl/semantics.hpp"
#include "hhl/transform.hpp"
#include "hhl/universe.hpp"

namespace hhl {

// Outcome of a bounded semantic check. Refuted carries a concrete witness
// set (and the reachable set it produces, for triple checks); both are
// re-checkable. HoldsAtBound is relative to the universe it cites.
struct Verdict {
  enum class Status { HoldsAtBound, Refuted, Unknown } status;
  std::string reason;                 // for Unknown
  std::optional<StateSet> witness;    // refuting initial set
  std::optional<StateSet> semResult;  // its reachable set (triples)
  bool bounded = false;               // a truncated construct took part
  long long examined = 0;             // candidate sets inspected

  bool holds() const { return status == Status::HoldsAtBound; }
  bool refuted() const { return status == Status::Refuted; }

  static Verdict holdsAtBound(bool bounded, long long n) {
    return Verdict{Status::HoldsAtBound, "", std::nullopt, std::nullopt,
                   bounded, n};
  }
  static Verdict refute(StateSet w, std::optional<StateSet> semR, bool bounded,
                        long long n) {
    return Verdict{Status::Refuted, "", std::move(w), std::move(semR), bounded,
                   n};
  }
  static Verdict unknown(std::string why, long long n = 0) {
    return Verdict{Status::Unknown, std::move(why), std::nullopt, std::nullopt,
                   false, n};
  }
};

// Bounded semantic decision procedures: verify or refute triples by
// enumerating candidate initial sets over the universe grid, discharge
// entailments, and check logical-update side conditions. Enumeration order
// is canonical (cardinality, then state rank), so the first counterexample
// is stable; parallel scans keep the same winner by minimum index.
class Oracle {
 public:
  explicit Oracle(const Universe& u) : u_(u) {}

  Verdict checkTriple(const HPtr& P, const CommandPtr& C, const HPtr& Q,
                      const RigidEnv& env = {}) {
    return scan([&](SatChecker& sat, const StateSet& S, RigidEnv& e,
                    bool& bounded) -> std::optional<StateSet> {
      if (!sat.sat(S, e, P)) return std::nullopt;
      Semantics sema(u_.layout, u_.fuel());
      StateSet after = sema.sem(C, S);
      if (sema.bounded()) bounded = true;
      if (!sat.sat(after, e, Q)) return after;
      return std::nullopt;
    }, env);
  }

  Verdict checkTotalTriple(const HPtr& P, const CommandPtr& C, const HPtr& Q,
                           const RigidEnv& env = {}) {
    return scan([&](SatChecker& sat, const StateSet& S, RigidEnv& e,
                    bool& bounded) -> std::optional<StateSet> {
      if (!sat.sat(S, e, P)) return std::nullopt;
      Semantics sema(u_.layout, u_.fuel());
      StateSet after = sema.sem(C, S);
      if (sema.bounded()) bounded = true;
      if (!sat.sat(after, e, Q)) return after;
      Semantics term(u_.layout, u_.fuel());
      if (!term.terminatesAll(C, S)) {
        if (term.bounded()) bounded = true;
        return after;
      }
      return std::nullopt;
    }, env);
  }

  Verdict checkEntailment(const HPtr& P, const HPtr& Q,
                          const RigidEnv& env = {}) {
    return scan([&](SatChecker& sat, const StateSet& S, RigidEnv& e,
                    bool&) -> std::optional<StateSet> {
      if (sat.sat(S, e, P) && !sat.sat(S, e, Q)) return StateSet{};
      return std::nullopt;
    }, env, /*wantSem=*/false);
  }

  // P entails P' modulo updates of the logical variables in V: every set
  // satisfying P can be relabeled on V (per state, possibly fanning out)
  // into a set satisfying P'.
  Verdict checkLogicalEntailment(const HPtr& P, const HPtr& Pprime,
                                 const std::vector<std::string>& V,
                                 const RigidEnv& env = {}) {
    std::vector<std::vector<Value>> vdoms = lvarDomains(V);
    return scan([&](SatChecker& sat, const StateSet& S, RigidEnv& e,
                    bool&) -> std::optional<StateSet> {
      if (!sat.sat(S, e, P)) return std::nullopt;
      std::vector<ExtState> pool = variantPool(S, V, vdoms);
      if (pool.size() > 20)
        throw SatUndecidable("logical-update variant pool too large");
      uint64_t full = (1ull << pool.size()) - 1;
      for (uint64_t m = 1; m <= full; m++) {
        StateSet Sp;
        for (size_t i = 0; i < pool.size(); i++)
          if (m & (1ull << i)) Sp.insert(pool[i]);
        if (S.empty() != Sp.empty()) continue;
        if (!equalUpTo(S, Sp, V)) continue;
        if (sat.sat(Sp, e, Pprime)) return std::nullopt;
      }
      if (S.empty() && sat.sat(StateSet{}, e, Pprime)) return std::nullopt;
      return StateSet{};  // stuck: no relabeling works
    }, env, /*wantSem=*/false);
  }

  // Q is invariant under logical updates in V: related sets agree on Q.
  Verdict checkInvariantOnV(const HPtr& Q, const std::vector<std::string>& V,
                            const RigidEnv& env = {}) {
    std::vector<std::vector<Value>> vdoms = lvarDomains(V);
    return scan([&](SatChecker& sat, const StateSet& S1, RigidEnv& e,
                    bool&) -> std::optional<StateSet> {
      bool q1 = sat.sat(S1, e, Q);
      std::vector<ExtState> pool = variantPool(S1, V, vdoms);
      if (pool.size() > 20)
        throw SatUndecidable("logical-update variant pool too large");
      uint64_t full = pool.empty() ? 0 : (1ull << pool.size()) - 1;
      for (uint64_t m = 1; m <= full; m++) {
        StateSet S2;
        for (size_t i = 0; i < pool.size(); i++)
          if (m & (1ull << i)) S2.insert(pool[i]);
        if (!equalUpTo(S1, S2, V)) continue;
        if (sat.sat(S2, e, Q) != q1) return S2;
      }
      return std::nullopt;
    }, env, /*wantSem=*/false);
  }

  // Every state of every set satisfying P has at least one terminating
  // execution of C (the semantic premise of totality-aware rules).
  Verdict checkTerminationPremise(const HPtr& P, const CommandPtr& C,
                                  const RigidEnv& env = {}) {
    return scan([&](SatChecker& sat, const StateSet& S, RigidEnv& e,
                    bool& bounded) -> std::optional<StateSet> {
      if (!sat.sat(S, e, P)) return std::nullopt;
      Semantics term(u_.layout, u_.fuel());
      if (!term.terminatesAll(C, S)) {
        if (term.bounded()) bounded = true;
        return StateSet{};
      }
      return std::nullopt;
    }, env, /*wantSem=*/false);
  }

  // On a refuted triple, the strengthened precondition that pins the witness
  // set exactly: membership of every witness state plus a disjunctive
  // description of all states.
  HPtr describeExactly(const StateSet& S) const {
    HPtr conj = nullptr;
    auto add = [&](HPtr c) { conj = conj ? HAssertion::mkAnd(conj, c) : c; };
    for (size_t i = 0; i < S.size(); i++) {
      StateRefExpr r;
      r.literal = S[i];
      add(HAssertion::mkMember(std::move(r)));
    }
    HPtr disj = nullptr;
    for (size_t i = 0; i < S.size(); i++) {
      HPtr eq = stateEqLiteral("_w", S[i]);
      disj = disj ? HAssertion::mkOr(disj, eq) : eq;
    }
    add(HAssertion::mkQuantState(HK::ForallState, "_w",
                                 disj ? disj : HAssertion::mkFalse()));
    return conj;
  }

  struct Disproof {
    StateSet witness;
    HPtr strengthenedPre;
    Verdict reverified;  // {P'} C {not Q}
  };

  // Searches a witness refuting {P} C {Q}; on success returns the exact-set
  // precondition P' and re-verifies {P'} C {¬Q} before returning.
  std::optional<Disproof> disprove(const HPtr& P, const CommandPtr& C,
                                   const HPtr& Q, Verdict* attempt = nullptr) {
    HPtr notQ = negate(Q);
    Verdict v = checkTriple(P, C, Q);
    if (attempt) *attempt = v;
    if (!v.refuted()) return std::nullopt;
    Disproof d;
    d.witness = *v.witness;
    d.strengthenedPre = describeExactly(d.witness);
    d.reverified = checkTriple(d.strengthenedPre, C, notQ);
    return d;
  }

  const Universe& universe() const { return u_; }

 private:
  HPtr stateEqLiteral(const std::string& ref, const ExtState& st) const {
    HPtr conj = nullptr;
    auto add = [&](HPtr c) { conj = conj ? HAssertion::mkAnd(conj, c) : c; };
    for (size_t i = 0; i < u_.layout->pvars.size(); i++)
      add(HAssertion::mkCmp(CmpOp::Eq,
                            HExpr::mkPLook(ref, u_.layout->pvars[i]),
                            HExpr::mkLit(st.prog.vals[i])));
    for (size_t i = 0; i < u_.layout->lvars.size(); i++)
      add(HAssertion::mkCmp(CmpOp::Eq,
                            HExpr::mkLLook(ref, u_.layout->lvars[i]),
                            HExpr::mkLit(st.log[i])));
    return conj ? conj : HAssertion::mkTrue();
  }

  std::vector<std::vector<Value>> lvarDomains(
      const std::vector<std::string>& V) {
    std::vector<std::vector<Value>> out;
    for (const auto& v : V) {
      u_.layout->lvar(v);  // must be a logical variable
      out.push_back(u_.varDomain(v));
    }
    return out;
  }

  // All V-relabelings of states in S.
  std::vector<ExtState> variantPool(
      const StateSet& S, const std::vector<std::string>& V,
      const std::vector<std::vector<Value>>& vdoms) {
    std::vector<ExtState> pool;
    auto push = [&](ExtState st) {
      for (const auto& p : pool)
        if (p == st) return;
      pool.push_back(std::move(st));
    };
    if (V.empty()) {
      for (size_t i = 0; i < S.size(); i++) push(S[i]);
      return pool;
    }
    std::vector<size_t> idx;
    for (size_t i = 0; i < S.size(); i++) {
      idx.assign(V.size(), 0);
      for (;;) {
        ExtState st = S[i];
        for (size_t k = 0; k < V.size(); k++)
          st.log[u_.layout->lvar(V[k])] = vdoms[k][idx[k]];
        push(std::move(st));
        size_t k = 0;
        while (k < V.size() && ++idx[k] == vdoms[k].size()) idx[k++] = 0;
        if (k == V.size()) break;
      }
    }
    return pool;
  }

  bool stateEqUpTo(const ExtState& a, const ExtState& b,
                   const std::vector<int>& vIdx) {
    if (!(a.prog == b.prog)) return false;
    for (size_t i = 0; i < a.log.size(); i++) {
      bool skip = false;
      for (int k : vIdx)
        if (static_cast<size_t>(k) == i) skip = true;
      if (!skip && !(a.log[i] == b.log[i])) return false;
    }
    return true;
  }

  bool equalUpTo(const StateSet& S1, const StateSet& S2,
                 const std::vector<std::string>& V) {
    std::vector<int> vIdx;
    for (const auto& v : V) vIdx.push_back(u_.layout->lvar(v));
    for (size_t i = 0; i < S1.size(); i++) {
      bool found = false;
      for (size_t j = 0; j < S2.size() && !found; j++)
        found = stateEqUpTo(S1[i], S2[j], vIdx);
      if (!found) return false;
    }
    for (size_t j = 0; j < S2.size(); j++) {
      bool found = false;
      for (size_t i = 0; i < S1.size() && !found; i++)
        found = stateEqUpTo(S1[i], S2[j], vIdx);
      if (!found) return false;
    }
    return true;
  }

  // Core enumeration. The check callback returns a reachable set to refute
  // with, or nullopt to continue. Parallel runs agree with serial runs: the
  // minimum candidate index wins.
  using CheckFn = std::function<std::optional<StateSet>(
      SatChecker&, const StateSet&, RigidEnv&, bool&)>;

  Verdict scan(const CheckFn& check, const RigidEnv& env, bool wantSem = true) {
    std::vector<ExtState> grid;
    try {
      grid = u_.grid();
    } catch (const UniverseError& e) {
      return Verdict::unknown(e.what());
    }

    if (u_.mode == Universe::Mode::Sampled) return scanSampled(check, env, grid);

    if (u_.candidateCount(grid.size()) > u_.budget)
      return Verdict::unknown(
          "candidate-set count exceeds the exhaustive budget; shrink domains "
          "or use sampled mode");

    int jobs = std::max(1, u_.jobs);
    if (jobs == 1) {
      long long index = 0;
      bool bounded = false;
      std::optional<StateSet> witness, semR;
      std::string undecidable;
      SatChecker sat(u_);
      RigidEnv e = env;
      CandidateSets cands(grid, u_.maxCard);
      try {
        cands.forEach([&](const StateSet& S) {
          index++;
          std::optional<StateSet> bad = check(sat, S, e, bounded);
          if (bad) {
            witness = S;
            semR = std::move(bad);
            return false;
          }
          return true;
        });
      } catch (const SatUndecidable& ex) {
        return Verdict::unknown(ex.what(), index);
      }
      bounded = bounded || sat.bounded();
      if (witness)
        return Verdict::refute(*witness, wantSem ? semR : std::nullopt,
                               bounded, index);
      return Verdict::holdsAtBound(bounded, index);
    }
    return scanParallel(check, env, grid, jobs, wantSem);
  }

  Verdict scanParallel(const CheckFn& check, const RigidEnv& env,
                       const std::vector<ExtState>& grid, int jobs,
                       bool wantSem) {
    std::atomic<long long> best(-1);
    std::vector<std::optional<StateSet>> wits(jobs), sems(jobs);
    std::vector<long long> bests(jobs, -1);
    std::atomic<bool> boundedAny(false);
    std::mutex errMu;
    std::string err;
    auto worker = [&](int tid) {
      SatChecker sat(u_);
      RigidEnv e = env;
      long long index = -1;
      bool bounded = false;
      CandidateSets cands(grid, u_.maxCard);
      try {
        cands.forEach([&](const StateSet& S) {
          index++;
          if (index % jobs != tid) return true;
          long long b = best.load();
          if (b >= 0 && index > b) return false;
          std::optional<StateSet> bad = check(sat, S, e, bounded);
          if (bad) {
            bests[tid] = index;
            wits[tid] = S;
            sems[tid] = std::move(bad);
            long long cur = best.load();
            while ((cur < 0 || index < cur) &&
                   !best.compare_exchange_weak(cur, index)) {
            }
            return false;
          }
          return true;
        });
      } catch (const SatUndecidable& ex) {
        std::lock_guard<std::mutex> g(errMu);
        if (err.empty()) err = ex.what();
      }
      if (bounded || sat.bounded()) boundedAny = true;
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; t++) threads.emplace_back(worker, t);
    for (auto& t : threads) t.join();
    if (!err.empty()) return Verdict::unknown(err);
    long long b = best.load();
    if (b >= 0) {
      for (int t = 0; t < jobs; t++)
        if (bests[t] == b)
          return Verdict::refute(*wits[t], wantSem ? sems[t] : std::nullopt,
                                 boundedAny.load(), b + 1);
    }
    return Verdict::holdsAtBound(boundedAny.load(), 0);
  }

  Verdict scanSampled(const CheckFn& check, const RigidEnv& env,
                      const std::vector<ExtState>& grid) {
    std::mt19937_64 rng(u_.seed);
    SatChecker sat(u_);
    RigidEnv e = env;
    bool bounded = false;
    try {
      for (long long i = 0; i < u_.samples; i++) {
        int card = static_cast<int>(rng() % (u_.maxCard + 1));
        StateSet S;
        for (int k = 0; k < card && !grid.empty(); k++)
          S.insert(grid[rng() % grid.size()]);
        std::optional<StateSet> bad = check(sat, S, e, bounded);
        if (bad)
          return Verdict::refute(S, std::move(bad), bounded || sat.bounded(),
                                 i + 1);
      }
    } catch (const SatUndecidable& ex) {
      return Verdict::unknown(ex.what());
    }
    return Verdict::holdsAtBound(bounded || sat.bounded(), u_.samples);
  }

  const Universe& u_;
};

}  // namespace hhl
