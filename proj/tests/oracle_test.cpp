// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hhl/hyper_print.hpp"
#include "hhl/oracle.hpp"
#include "hhl/parser.hpp"
#include "test_util.hpp"

using namespace hhl;
using hhltest::Rng;

namespace {

struct World {
  Program prog;
  Universe u;
  explicit World(const std::string& src, int maxCard = 2)
      : prog(parseProgram(src)) {
    u = Universe::fromProgram(prog);
    u.maxCard = maxCard;
  }
  HPtr A(const std::string& text) const { return parseAssertion(text, prog); }
};

}  // namespace

TEST_CASE("bounded random-assignment postcondition holds") {
  World w("vars x: int(-2..11);\nhavoc x;\nassume 0 <= x && x <= 9");
  Oracle o(w.u);
  Verdict v = o.checkTriple(w.A("true"), w.prog.body,
                            w.A("forall p' in S. 0 <= p'[x] && p'[x] <= 9"));
  CHECK(v.holds());

  // the existential version: every value in range is reachable
  Verdict v2 = o.checkTriple(
      w.A("!emp"), w.prog.body,
      w.A("forall n: 0..9. exists p' in S. p'[x] = n"));
  CHECK(v2.holds());
}

TEST_CASE("invalid universal postcondition is refuted with a witness") {
  World w("vars x: int(0..9);\nhavoc x", 1);
  Oracle o(w.u);
  Verdict v = o.checkTriple(w.A("true"), w.prog.body,
                            w.A("forall p in S. p[x] >= 5"));
  REQUIRE(v.refuted());
  REQUIRE(v.witness->size() == 1);
  // canonical order: the first singleton is x = 0
  CHECK((*v.witness)[0].prog.vals[0] == Value(0));
  // the witness re-validates
  SatChecker sc(w.u);
  RigidEnv env;
  CHECK(sc.sat(*v.witness, env, w.A("true")));
  CHECK(!sc.sat(*v.semResult, env, w.A("forall p in S. p[x] >= 5")));
}

TEST_CASE("branching on a secret is caught as an interference witness") {
  World w(
      "vars h: int(-1..1), l: int(0..1);\n"
      "if (h > 0) { l := 1 } else { l := 0 }",
      2);
  Oracle o(w.u);
  HPtr pre = w.A(
      "low(l) && (exists p1 in S, p2 in S. p1[h] > 0 && p2[h] <= 0)");
  HPtr post = w.A("exists q1 in S, q2 in S. q1[l] != q2[l]");
  CHECK(o.checkTriple(pre, w.prog.body, post).holds());
}

TEST_CASE("disprove returns a strengthened precondition that re-verifies") {
  World w("vars x: int(0..9);\nhavoc x", 1);
  Oracle o(w.u);
  auto d = o.disprove(w.A("true"), w.prog.body,
                      w.A("forall p in S. p[x] >= 5"));
  REQUIRE(d.has_value());
  CHECK(d->reverified.holds());
  // the strengthened precondition pins the witness set exactly
  SatChecker sc(w.u);
  RigidEnv env;
  CHECK(sc.sat(d->witness, env, d->strengthenedPre));
  StateSet other;
  ExtState st;
  st.prog.vals = {Value(7)};
  other.insert(st);
  CHECK(!sc.sat(other, env, d->strengthenedPre));

  // a valid triple yields no witness
  auto none = o.disprove(w.A("true"), w.prog.body,
                         w.A("forall p in S. p[x] >= 0"));
  CHECK(!none.has_value());
}

TEST_CASE("entailment: reflexive, and refuted with a witness set") {
  World w("vars x: int(0..2); skip");
  Oracle o(w.u);
  HPtr P = w.A("forall p in S. p[x] >= 1");
  CHECK(o.checkEntailment(P, P).holds());
  Verdict v = o.checkEntailment(w.A("box(x = 1)"), w.A("emp"));
  REQUIRE(v.refuted());
  CHECK(v.witness->size() == 1);
  CHECK((*v.witness)[0].prog.vals[0] == Value(1));
}

TEST_CASE("minimum-tagging: logical entailment and invariance") {
  World w("vars x: int(0..2), y: int(0..2); lvars i: int(1..2); skip", 3);
  Oracle o(w.u);
  HPtr hasMinX = w.A("exists p in S. forall q in S. p[x] <= q[x]");
  HPtr hasMinY = w.A("exists p in S. forall q in S. p[y] <= q[y]");
  HPtr monoX = w.A(
      "forall p1 in S, p2 in S. p1.L[i] = 1 && p2.L[i] = 2 => p1[x] <= p2[x]");
  HPtr selected = w.A(
      "exists p in S. p.L[i] = 1 && (forall q in S. q.L[i] = 1 => "
      "p[x] = q[x] && p[y] = q[y] && p.L[i] = q.L[i])");
  HPtr tags = w.A("box(i = 1 || i = 2)");
  HPtr rhs = HAssertion::mkAnd(monoX, HAssertion::mkAnd(selected, tags));

  CHECK(o.checkLogicalEntailment(hasMinX, rhs, {"i"}).holds());
  CHECK(o.checkLogicalEntailment(w.A("box(x = 1)"), w.A("box(x = 1)"), {})
            .holds());
  CHECK(o.checkLogicalEntailment(w.A("box(i = 1)"), w.A("box(i = 2)"), {})
            .refuted());

  CHECK(o.checkInvariantOnV(hasMinY, {"i"}).holds());
  CHECK(o.checkInvariantOnV(w.A("box(i = 1)"), {"i"}).refuted());

  // the downstream entailment: tagged monotonicity restores the minimum
  HPtr monoY = w.A(
      "forall p1 in S, p2 in S. p1.L[i] = 1 && p2.L[i] = 2 => p1[y] <= p2[y]");
  HPtr selectedY = w.A(
      "exists p in S. p.L[i] = 1 && (forall q in S. q.L[i] = 1 => "
      "p[x] = q[x] && p[y] = q[y] && p.L[i] = q.L[i])");
  HPtr lhs2 = HAssertion::mkAnd(monoY, HAssertion::mkAnd(selectedY, tags));
  CHECK(o.checkEntailment(lhs2, hasMinY).holds());
}

TEST_CASE("low is invariant under updates of unrelated logical variables") {
  World w("vars l: int(0..1); lvars t: int(0..1); skip");
  Oracle o(w.u);
  CHECK(o.checkInvariantOnV(w.A("low(l)"), {"t"}).holds());
}

TEST_CASE("total triples: assume kills executions") {
  World w("vars x: int(0..1);\nassume false");
  Oracle o(w.u);
  CHECK(o.checkTriple(w.A("true"), w.prog.body, w.A("emp")).holds());
  CHECK(o.checkTotalTriple(w.A("true"), w.prog.body, w.A("emp")).refuted());
}

TEST_CASE("total equals partial for assume-free commands") {
  Rng rng(77);
  Program p = hhltest::smallProgram({"x", "y"}, {}, 0, 1);
  Universe u = Universe::fromProgram(p);
  u.maxCard = 2;
  for (int it = 0; it < 30; it++) {
    // commands without assume: strip by regenerating until none
    CommandPtr c;
    for (;;) {
      c = hhltest::randomCommand(rng, {"x", "y"}, 2);
      std::string s = printCommand(c);
      if (s.find("assume") == std::string::npos) break;
    }
    hhltest::HGenCtx ctx;
    ctx.pvars = {"x", "y"};
    HPtr P = hhltest::randomAssertion(rng, ctx, 2);
    HPtr Q = hhltest::randomAssertion(rng, ctx, 2);
    Oracle o(u);
    Verdict ordinary = o.checkTriple(P, c, Q);
    Verdict total = o.checkTotalTriple(P, c, Q);
    CHECK(ordinary.status == total.status);
  }
}

TEST_CASE("a recurrent set certifies non-termination") {
  World w("vars x: int(0..2);\nassume x = 1;\nx := x");
  Oracle o(w.u);
  HPtr inR = w.A("exists p in S. p[x] = 1");
  CHECK(o.checkTriple(inR, w.prog.body, inR).holds());
}

TEST_CASE("refuted verdicts re-validate independently") {
  Rng rng(123);
  Program p = hhltest::smallProgram({"x", "y"}, {}, 0, 1);
  Universe u = Universe::fromProgram(p);
  u.maxCard = 2;
  int refutations = 0;
  for (int it = 0; it < 200 && refutations < 40; it++) {
    CommandPtr c = hhltest::randomCommand(rng, {"x", "y"}, 2);
    hhltest::HGenCtx ctx;
    ctx.pvars = {"x", "y"};
    HPtr P = hhltest::randomAssertion(rng, ctx, 2);
    HPtr Q = hhltest::randomAssertion(rng, ctx, 2);
    Oracle o(u);
    Verdict v = o.checkTriple(P, c, Q);
    if (!v.refuted()) continue;
    refutations++;
    SatChecker sc(u);
    RigidEnv env;
    CHECK(sc.sat(*v.witness, env, P));
    Semantics sema(u.layout, u.fuel());
    StateSet after = sema.sem(c, *v.witness);
    CHECK(after == *v.semResult);
    CHECK(!sc.sat(after, env, Q));
  }
  CHECK(refutations >= 20);
}

TEST_CASE("parallel scans report the same witness as serial scans") {
  World w("vars x: int(0..9);\nhavoc x;\nassume x > 3", 2);
  HPtr P = w.A("!emp");
  HPtr Q = w.A("forall p in S. p[x] > 5");
  Oracle serial(w.u);
  Verdict v1 = serial.checkTriple(P, w.prog.body, Q);
  Universe up = w.u;
  up.jobs = 3;
  Oracle par(up);
  Verdict v2 = par.checkTriple(P, w.prog.body, Q);
  REQUIRE(v1.refuted());
  REQUIRE(v2.refuted());
  CHECK(*v1.witness == *v2.witness);
}

TEST_CASE("shrinking the cardinality bound preserves bounded validity") {
  Rng rng(321);
  Program p = hhltest::smallProgram({"x"}, {}, 0, 2);
  Universe big = Universe::fromProgram(p);
  big.maxCard = 3;
  Universe small = big;
  small.maxCard = 1;
  for (int it = 0; it < 60; it++) {
    CommandPtr c = hhltest::randomCommand(rng, {"x"}, 2);
    hhltest::HGenCtx ctx;
    ctx.pvars = {"x"};
    HPtr P = hhltest::randomAssertion(rng, ctx, 2);
    HPtr Q = hhltest::randomAssertion(rng, ctx, 2);
    Oracle ob(big), os(small);
    if (ob.checkTriple(P, c, Q).holds()) CHECK(os.checkTriple(P, c, Q).holds());
  }
}

TEST_CASE("budget exhaustion reports unknown, not a verdict") {
  World w("vars x: int(0..9), y: int(0..9), z: int(0..9); skip", 4);
  w.u.budget = 100;
  Oracle o(w.u);
  Verdict v = o.checkTriple(w.A("true"), w.prog.body, w.A("true"));
  CHECK(v.status == Verdict::Status::Unknown);
}

TEST_CASE("sampled mode is reproducible for a fixed seed") {
  World w("vars x: int(0..9);\nhavoc x", 2);
  w.u.mode = Universe::Mode::Sampled;
  w.u.samples = 50;
  w.u.seed = 42;
  Oracle o(w.u);
  Verdict v1 = o.checkTriple(w.A("true"), w.prog.body,
                             w.A("forall p in S. p[x] >= 5"));
  Verdict v2 = o.checkTriple(w.A("true"), w.prog.body,
                             w.A("forall p in S. p[x] >= 5"));
  REQUIRE(v1.refuted());
  REQUIRE(v2.refuted());
  CHECK(*v1.witness == *v2.witness);
}
