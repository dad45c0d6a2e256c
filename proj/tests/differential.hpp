// SPDX-License-Identifier: Apache-2.0
// Differential harness: random instances per source logic, judged twice --
// once by the from-definition checker, once by the bounded oracle on the
// encoded hyper-triple -- and compared for exact agreement.
#pragma once

#include <string>

#include "logic_defs.hpp"
#include "test_util.hpp"

namespace hhltest {

using namespace hhl;

struct DiffWorld {
  Program prog;
  Universe u;

  DiffWorld() {
    prog = parseProgram(
        "vars x: int(0..1);\nlvars t: int(1..2), u: int(0..3);\nskip");
    u = Universe::fromProgram(prog);
    u.maxCard = 4;
    u.maxIter = 2;
  }
};

// Random boolean condition over program lookups of the given refs.
inline HPtr randomRefCond(Rng& rng, const std::vector<std::string>& refs,
                          int depth) {
  auto atom = [&]() -> HPtr {
    HExprPtr l = HExpr::mkPLook(rng.pick(refs), "x");
    HExprPtr r = rng.flip() ? HExpr::mkPLook(rng.pick(refs), "x")
                            : HExpr::mkLit(Value(rng.upto(2)));
    return HAssertion::mkCmp(static_cast<CmpOp>(rng.upto(6)), l, r);
  };
  if (depth <= 0 || rng.upto(3) == 0) return atom();
  HPtr a = randomRefCond(rng, refs, depth - 1);
  HPtr b = randomRefCond(rng, refs, depth - 1);
  return rng.flip() ? HAssertion::mkAnd(a, b) : HAssertion::mkOr(a, b);
}

inline TupleAssertion randomTuple(Rng& rng, int k, const std::string& stem) {
  TupleAssertion t;
  for (int i = 1; i <= k; i++) t.refs.push_back(stem + std::to_string(i));
  t.body = randomRefCond(rng, t.refs, 2);
  return t;
}

// Explicitly enumerated program-tuple condition (for the backward k-logic,
// whose refuting sets grow with the condition's extension).
inline TupleAssertion explicitTuples(Rng& rng, int k, int count) {
  TupleAssertion t;
  for (int i = 1; i <= k; i++) t.refs.push_back("e" + std::to_string(i));
  HPtr disj = nullptr;
  for (int c = 0; c < count; c++) {
    HPtr conj = nullptr;
    for (int i = 0; i < k; i++) {
      HPtr eq = HAssertion::mkCmp(CmpOp::Eq, HExpr::mkPLook(t.refs[i], "x"),
                                  HExpr::mkLit(Value(rng.upto(2))));
      conj = conj ? HAssertion::mkAnd(conj, eq) : eq;
    }
    disj = disj ? HAssertion::mkOr(disj, conj) : conj;
  }
  t.body = disj ? disj : HAssertion::mkFalse();
  return t;
}

inline CommandPtr randomDiffCommand(Rng& rng) {
  return randomCommand(rng, {"x"}, 2);
}

inline std::vector<ExtState> randomStateList(Rng& rng, const Universe& u,
                                             int maxN) {
  std::vector<ExtState> grid = u.grid();
  std::vector<ExtState> out;
  int n = rng.upto(maxN + 1);
  for (int i = 0; i < n; i++) out.push_back(grid[rng.upto((int)grid.size())]);
  return out;
}

struct DiffResult {
  int total = 0;
  int agreed = 0;
  std::string firstMismatch;
};

inline void record(DiffResult& r, bool defSays, const Verdict& v,
                   const std::string& desc) {
  r.total++;
  if (v.status == Verdict::Status::Unknown) {
    if (r.firstMismatch.empty()) r.firstMismatch = "unknown verdict: " + desc;
    return;
  }
  if (defSays == v.holds()) {
    r.agreed++;
  } else if (r.firstMismatch.empty()) {
    r.firstMismatch = desc + " (definition says " +
                      (defSays ? "valid" : "invalid") + ")";
  }
}

inline DiffResult diffHL(int rounds, uint64_t seed) {
  DiffWorld w;
  Rng rng(seed);
  DiffResult r;
  for (int i = 0; i < rounds; i++) {
    TupleAssertion P = randomTuple(rng, 1, "a");
    TupleAssertion Q = randomTuple(rng, 1, "b");
    CommandPtr C = randomDiffCommand(rng);
    HyperTriplePair enc = fromHL(w.prog, P, Q);
    Oracle o(w.u);
    record(r, validHL(P, Q, C, w.u), o.checkTriple(enc.pre, C, enc.post),
           "hl #" + std::to_string(i));
  }
  return r;
}

inline DiffResult diffFU(int rounds, uint64_t seed) {
  DiffWorld w;
  Rng rng(seed);
  DiffResult r;
  for (int i = 0; i < rounds; i++) {
    TupleAssertion P = randomTuple(rng, 1, "a");
    TupleAssertion Q = randomTuple(rng, 1, "b");
    CommandPtr C = randomDiffCommand(rng);
    HyperTriplePair enc = fromFU(w.prog, P, Q);
    Oracle o(w.u);
    record(r, validFU(P, Q, C, w.u), o.checkTriple(enc.pre, C, enc.post),
           "fu #" + std::to_string(i));
  }
  return r;
}

inline DiffResult diffIL(int rounds, uint64_t seed) {
  DiffWorld w;
  Rng rng(seed);
  DiffResult r;
  for (int i = 0; i < rounds; i++) {
    std::vector<ExtState> P = randomStateList(rng, w.u, 2);
    std::vector<ExtState> Q = randomStateList(rng, w.u, 2);
    CommandPtr C = randomDiffCommand(rng);
    HyperTriplePair enc = fromIL(w.prog, P, Q);
    Oracle o(w.u);
    record(r, validIL(P, Q, C, w.u), o.checkTriple(enc.pre, C, enc.post),
           "il #" + std::to_string(i));
  }
  return r;
}

inline DiffResult diffKFU(int rounds, uint64_t seed) {
  DiffWorld w;
  Rng rng(seed);
  DiffResult r;
  for (int i = 0; i < rounds; i++) {
    TupleAssertion P = randomTuple(rng, 2, "a");
    TupleAssertion Q = randomTuple(rng, 2, "b");
    CommandPtr C = randomDiffCommand(rng);
    HyperTriplePair enc = fromKFU(w.prog, 2, P, Q);
    Oracle o(w.u);
    record(r, validKFU(2, P, Q, C, w.u), o.checkTriple(enc.pre, C, enc.post),
           "kfu #" + std::to_string(i));
  }
  return r;
}

inline DiffResult diffCHL(int rounds, uint64_t seed) {
  DiffWorld w;
  Rng rng(seed);
  DiffResult r;
  for (int i = 0; i < rounds; i++) {
    TupleAssertion P = randomTuple(rng, 2, "a");
    TupleAssertion Q = randomTuple(rng, 2, "b");
    CommandPtr C = randomDiffCommand(rng);
    HyperTriplePair enc = fromCHL(w.prog, 2, P, Q);
    Oracle o(w.u);
    record(r, validCHL(2, P, Q, C, w.u), o.checkTriple(enc.pre, C, enc.post),
           "chl #" + std::to_string(i));
  }
  return r;
}

inline DiffResult diffKIL(int rounds, uint64_t seed) {
  DiffWorld w;
  Rng rng(seed);
  DiffResult r;
  for (int i = 0; i < rounds; i++) {
    TupleAssertion P = explicitTuples(rng, 2, rng.upto(3));
    TupleAssertion Q = randomTuple(rng, 2, "b");
    CommandPtr C = randomDiffCommand(rng);
    HyperTriplePair enc = fromKIL(w.prog, w.u, 2, P, Q);
    Oracle o(w.u);
    record(r, validKIL(2, P, Q, C, w.u), o.checkTriple(enc.pre, C, enc.post),
           "kil #" + std::to_string(i));
  }
  return r;
}

inline DiffResult diffKUE(int rounds, uint64_t seed) {
  DiffWorld w;
  Rng rng(seed);
  DiffResult r;
  for (int i = 0; i < rounds; i++) {
    TupleAssertion P = randomTuple(rng, 2, "a");
    TupleAssertion Q = randomTuple(rng, 2, "b");
    CommandPtr C = randomDiffCommand(rng);
    HyperTriplePair enc = fromKUE(w.prog, 1, 1, P, Q);
    Oracle o(w.u);
    record(r, validKUE(1, 1, P, Q, C, w.u), o.checkTriple(enc.pre, C, enc.post),
           "kue #" + std::to_string(i));
  }
  return r;
}

}  // namespace hhltest
