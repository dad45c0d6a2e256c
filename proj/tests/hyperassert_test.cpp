// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hhl/hyper_parser.hpp"
#include "hhl/hyper_print.hpp"
#include "hhl/hyper_sat.hpp"
#include "hhl/parser.hpp"
#include "test_util.hpp"

using namespace hhl;
using hhltest::Rng;

namespace {

struct World {
  Program prog;
  Universe u;
  explicit World(const std::string& src) : prog(parseProgram(src)) {
    u = Universe::fromProgram(prog);
  }
  HPtr A(const std::string& text) const { return parseAssertion(text, prog); }
  bool sat(const StateSet& S, const HPtr& a) const {
    SatChecker sc(u);
    RigidEnv env;
    return sc.sat(S, env, a);
  }
  ExtState st(std::vector<int> prog_, std::vector<int> log_ = {}) const {
    ExtState s;
    for (int v : prog_) s.prog.vals.emplace_back(v);
    for (int v : log_) s.log.emplace_back(v);
    return s;
  }
};

}  // namespace

TEST_CASE("hyper-expression evaluation") {
  World w("vars x: int(0..9); skip");
  SatChecker sc(w.u);
  RigidEnv env;
  ExtState phi = w.st({3});
  env.states["phi"] = &phi;
  CHECK(sc.eval(HExpr::mkPLook("phi", "x"), env) == Value(3));
  CHECK(sc.eval(HExpr::mkBin(BinOp::Add, HExpr::mkLit(Value(2)),
                             HExpr::mkLit(Value(2))),
                env) == Value(4));
  // len([1,2] ++ [3]) = 3
  HExprPtr e = HExpr::mkLen(HExpr::mkBin(
      BinOp::Concat, HExpr::mkLit(Value(ValueList{Value(1), Value(2)})),
      HExpr::mkLit(Value(ValueList{Value(3)}))));
  CHECK(sc.eval(e, env) == Value(3));
  CHECK_THROWS_AS(sc.eval(HExpr::mkQVar("nope"), env), EvalError);
}

TEST_CASE("low holds iff the expression agrees across the set") {
  World w("vars l: int(0..9), h: int(0..9); skip");
  HPtr low = w.A("low(l)");
  StateSet S;
  S.insert(w.st({5, 0}));
  S.insert(w.st({5, 7}));
  CHECK(w.sat(S, low));
  S.insert(w.st({6, 0}));
  CHECK(!w.sat(S, low));
  CHECK(w.sat(StateSet{}, low));
}

TEST_CASE("emp and its negation") {
  World w("vars x: int(0..3); skip");
  CHECK(w.sat(StateSet{}, w.A("emp")));
  StateSet S;
  S.insert(w.st({1}));
  CHECK(!w.sat(S, w.A("emp")));
  CHECK(w.sat(S, w.A("!emp")));
  CHECK(!w.sat(StateSet{}, w.A("!emp")));
}

TEST_CASE("split-union: the two-state example") {
  World w("vars x: int(1..3); skip");
  HPtr split = w.A("box(x = 1) (+) box(x = 2)");
  StateSet S;
  S.insert(w.st({1}));
  S.insert(w.st({2}));
  CHECK(w.sat(S, split));
  StateSet T;
  T.insert(w.st({3}));
  CHECK(!w.sat(T, split));
  // the empty set splits into two empties, and box holds vacuously
  CHECK(w.sat(StateSet{}, split));
}

TEST_CASE("split-union agrees with brute force over subset pairs") {
  World w("vars x: int(0..2), y: int(0..2); skip");
  Rng rng(5);
  for (int it = 0; it < 300; it++) {
    hhltest::HGenCtx ctx;
    ctx.pvars = {"x", "y"};
    HPtr A = hhltest::randomAssertion(rng, ctx, 2);
    HPtr B = hhltest::randomAssertion(rng, ctx, 2);
    StateSet S = hhltest::randomStateSet(rng, w.u, 4);
    bool fast = w.sat(S, HAssertion::mkOtimes(A, B));
    // brute force over ordered pairs of subsets whose union is S
    bool slow = false;
    uint32_t full = (1u << S.size()) - 1;
    for (uint32_t m1 = 0; m1 <= full && !slow; m1++)
      for (uint32_t m2 = 0; m2 <= full && !slow; m2++) {
        if ((m1 | m2) != full) continue;
        if (w.sat(S.subsetByMask(m1), A) && w.sat(S.subsetByMask(m2), B))
          slow = true;
      }
    CHECK(fast == slow);
  }
}

TEST_CASE("state quantifiers fold over the judged set") {
  World w("vars x: int(0..2); skip");
  Rng rng(9);
  for (int it = 0; it < 300; it++) {
    hhltest::HGenCtx ctx;
    ctx.pvars = {"x"};
    ctx.srefs = {"s"};
    HPtr body = hhltest::randomAssertion(rng, ctx, 2);
    HPtr all = HAssertion::mkQuantState(HK::ForallState, "s", body);
    StateSet S = hhltest::randomStateSet(rng, w.u, 4);
    bool direct = true;
    for (size_t i = 0; i < S.size(); i++) {
      SatChecker sc(w.u);
      RigidEnv env;
      env.states["s"] = &S[i];
      direct = direct && sc.sat(S, env, body);
    }
    CHECK(w.sat(S, all) == direct);
  }
}

TEST_CASE("negation is a semantic complement and an involution") {
  World w("vars x: int(0..2), y: int(0..2); skip");
  Rng rng(13);
  for (int it = 0; it < 400; it++) {
    hhltest::HGenCtx ctx;
    ctx.pvars = {"x", "y"};
    HPtr A = hhltest::randomAssertion(rng, ctx, 3);
    StateSet S = hhltest::randomStateSet(rng, w.u, 3);
    CHECK(w.sat(S, negate(A)) != w.sat(S, A));
    CHECK(alphaEqual(negate(negate(A)), A));
  }
}

TEST_CASE("negation swaps quantifiers") {
  World w("vars x: int(0..9); skip");
  HPtr A = w.A("forall p in S. p[x] >= 5");
  HPtr expected = w.A("exists p in S. p[x] < 5");
  CHECK(alphaEqual(negate(A), expected));

  // prefix flip, checked semantically on small sets
  HPtr B = w.A("exists p1 in S, p2 in S. forall p in S. p1[x] = p[x]");
  HPtr nB = negate(B);
  HPtr expectedShape =
      w.A("forall p1 in S, p2 in S. exists p in S. p1[x] != p[x]");
  CHECK(alphaEqual(nB, expectedShape));
  Rng rng(21);
  for (int it = 0; it < 100; it++) {
    StateSet S = hhltest::randomStateSet(rng, w.u, 3);
    CHECK(w.sat(S, nB) != w.sat(S, B));
  }
}

TEST_CASE("negation of set-level atoms is rejected") {
  World w("vars x: int(0..1); skip");
  CHECK_THROWS_AS(negate(w.A("box(x = 1) (+) box(x = 0)")),
                  UnsupportedFragment);
  CHECK_THROWS_AS(negate(w.A("atmost(emp)")), UnsupportedFragment);
  CHECK_THROWS_AS(negate(w.A("card{ p[x] | p in S } <= 2")),
                  UnsupportedFragment);
}

TEST_CASE("syntactic shape report") {
  World w("vars x: int(0..1), a: int(0..1), b: int(0..1); skip");
  ShapeReport r1 =
      syntacticShape(w.A("forall p in S. exists p' in S. p[x] <= p'[x]"));
  CHECK(r1.containsExistsState);
  CHECK(!r1.forallStateAfterAnyExists);
  CHECK(r1.fvProg == std::set<std::string>{"x"});

  ShapeReport r2 =
      syntacticShape(w.A("exists p in S. forall q in S. p[x] = q[x]"));
  CHECK(r2.forallStateAfterAnyExists);

  ShapeReport r3 = syntacticShape(w.A("box(b >= a && a >= 0)"));
  CHECK(!r3.containsExistsState);
  CHECK((r3.fvProg == std::set<std::string>{"a", "b"}));

  // a universal under a value existential also counts
  ShapeReport r4 = syntacticShape(w.A("exists v. forall p in S. p[x] = v"));
  CHECK(r4.forallStateAfterAnyExists);
}

TEST_CASE("cardinality atom") {
  World w("vars o: int(0..5), l: int(0..2); skip");
  HPtr A = w.A("exists v. box(l = v) && card{ p[o] | p in S } <= v + 1");
  StateSet S;
  S.insert(w.st({0, 1}));
  S.insert(w.st({1, 1}));
  CHECK(w.sat(S, A));
  S.insert(w.st({2, 1}));
  CHECK(!w.sat(S, A));  // three outputs, l = 1 allows two
  // guarded comprehension
  HPtr B = w.A("card{ p[o] | p in S, p[l] = 1 } = 2");
  CHECK(w.sat(S, B) == false);
  StateSet T;
  T.insert(w.st({0, 1}));
  T.insert(w.st({3, 1}));
  T.insert(w.st({4, 0}));
  CHECK(w.sat(T, B));
}

TEST_CASE("membership with updates") {
  World w("vars t: int(1..2), x: int(0..1); lvars u: int(0..3); skip");
  StateSet S;
  S.insert(w.st({1, 0}, {2}));
  HPtr A = w.A("forall p in S. member(p with t := 1)");
  CHECK(w.sat(S, A));  // t is already 1 in the only state
  StateSet T;
  T.insert(w.st({2, 0}, {2}));
  CHECK(!w.sat(T, A));
  HPtr B = w.A("forall p in S. member(p with L[u] := 2)");
  CHECK(w.sat(S, B));
}

TEST_CASE("quantifiers over the universe grid") {
  World w("vars x: int(0..1); skip");
  StateSet S;
  S.insert(w.st({0}));
  CHECK(w.sat(S, w.A("exists p in U. member(p)")));
  CHECK(!w.sat(S, w.A("forall p in U. member(p)")));
  StateSet Full;
  Full.insert(w.st({0}));
  Full.insert(w.st({1}));
  CHECK(w.sat(Full, w.A("forall p in U. member(p)")));
}

TEST_CASE("atleast and atmost") {
  World w("vars x: int(0..2); skip");
  StateSet S;
  S.insert(w.st({0}));
  S.insert(w.st({1}));
  // some subset satisfies box(x = 1)
  CHECK(w.sat(S, w.A("atleast(box(x = 1) && !emp)")));
  CHECK(!w.sat(S, w.A("atleast(box(x = 2) && !emp)")));
  // S extends to a set containing x = 2
  World w2("vars x: int(0..2); skip");
  w2.u.maxCard = 3;
  SatChecker sc(w2.u);
  RigidEnv env;
  CHECK(sc.sat(S, env, w2.A("atmost(exists p in S. p[x] = 2)")));
  CHECK(sc.bounded());
}

TEST_CASE("assertion print/parse round trip") {
  World w("vars x: int(0..3), l: list(int(0..1), maxlen 2); lvars t: int(1..2); skip");
  std::vector<std::string> samples = {
      "forall p in S. 0 <= p[x] && p[x] <= 9",
      "exists p1 in S, p2 in S. p1.L[t] != p2.L[t]",
      "forall n. 0 <= n => (exists p in S. p[x] = n)",
      "low(x)",
      "box(x = 1 => len(l) = 0)",
      "(box(x = 1)) (+) (box(x = 2))",
      "bigotimes(low(x))",
      "bigotimes n: 0..3. box(x = n)",
      "atmost(emp)",
      "atleast(!emp)",
      "card{ p[x] | p in S, p.L[t] = 1 } <= 2",
      "forall v: dom(x). exists p in S. p[x] = v",
      "member(state(x := 1, l := [0, 1], L[t] := 2) with x := 2)",
  };
  for (const auto& s : samples) {
    HPtr a = w.A(s);
    std::string printed = printHAssertion(a, w.u.layout.get());
    HPtr b = w.A(printed);
    CHECK_MESSAGE(alphaEqual(a, b), "round trip failed for: ", s,
                  " printed as: ", printed);
  }
}

TEST_CASE("alpha equality is positional") {
  World w("vars x: int(0..1); skip");
  CHECK(alphaEqual(w.A("forall p in S. p[x] = 0"),
                   w.A("forall q in S. q[x] = 0")));
  CHECK(!alphaEqual(w.A("forall p in S. p[x] = 0"),
                    w.A("exists q in S. q[x] = 0")));
  CHECK(!alphaEqual(w.A("forall v: dom(x). v = 0"), w.A("forall v. v = 0")));
  CHECK(alphaEqual(w.A("forall a in S, b in S. a[x] = b[x]"),
                   w.A("forall b in S, a in S. b[x] = a[x]")));
}

TEST_CASE("state equality expands over declared variables") {
  World w("vars x: int(0..1); lvars t: int(0..1); skip");
  HPtr A = w.A("exists p in S. forall q in S. p == q");
  HPtr B = w.A("exists p in S. forall q in S. p[x] = q[x] && p.L[t] = q.L[t]");
  CHECK(alphaEqual(A, B));
}
