// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hhl/parser.hpp"
#include "hhl/semantics.hpp"
#include "hhl/universe.hpp"
#include "test_util.hpp"

using namespace hhl;
using hhltest::Rng;

namespace {

struct World {
  Program prog;
  Universe u;
  World(const std::vector<std::string>& pv, const std::vector<std::string>& lv,
        int lo, int hi, int maxIter = 3) {
    prog = hhltest::smallProgram(pv, lv, lo, hi);
    u = Universe::fromProgram(prog);
    u.maxIter = maxIter;
  }
  Semantics sema() const { return Semantics(u.layout, u.fuel()); }
};

PState mk(const std::vector<int>& vals) {
  PState s;
  for (int v : vals) s.vals.emplace_back(v);
  return s;
}

}  // namespace

TEST_CASE("skip yields the same state; assume filters") {
  World w({"x"}, {}, 0, 9);
  auto sem = w.sema();
  PState s = mk({0});
  CHECK(sem.finals(Command::mkSkip(), s) == std::set<PState>{s});

  Program p = parseProgram("vars x: int(0..9); assume x > 0");
  auto fin = sem.finals(desugar(p.body), s);
  CHECK(fin.empty());
}

TEST_CASE("havoc then assume keeps exactly the in-range values") {
  Program p = parseProgram(
      "vars x: int(-2..11);\nhavoc x;\nassume 0 <= x && x <= 9");
  Universe u = Universe::fromProgram(p);
  Semantics sem(u.layout, u.fuel());
  auto fin = sem.finals(desugar(p.body), mk({5}));
  CHECK(fin.size() == 10);
  for (const auto& s : fin) {
    CHECK(valueLeq(Value(0), s.vals[0]));
    CHECK(valueLeq(s.vals[0], Value(9)));
  }
}

TEST_CASE("sem maps over the set and preserves logical parts") {
  World w({"x"}, {"t"}, 0, 3);
  auto sem = w.sema();
  Program p = parseProgram("vars x: int(0..3); lvars t: int(0..3); x := x + 1");
  StateSet S;
  S.insert(ExtState{{Value(2)}, mk({2})});
  StateSet out = sem.sem(p.body, S);
  REQUIRE(out.size() == 1);
  CHECK(out[0].log[0] == Value(2));
  CHECK(out[0].prog.vals[0] == Value(3));
}

TEST_CASE("sem of skip is identity; seq composes") {
  World w({"x"}, {}, 0, 2);
  Rng rng(3);
  for (int i = 0; i < 50; i++) {
    StateSet S = hhltest::randomStateSet(rng, w.u, 3);
    auto sem = w.sema();
    CHECK(sem.sem(Command::mkSkip(), S) == S);
    CommandPtr c1 = hhltest::randomCommand(rng, {"x"}, 2);
    CommandPtr c2 = hhltest::randomCommand(rng, {"x"}, 2);
    auto semA = w.sema();
    StateSet lhs = semA.sem(Command::mkSeq(c1, c2), S);
    auto semB = w.sema();
    StateSet rhs = semB.sem(c2, semB.sem(c1, S));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("semantics laws: union, monotonicity, choice, indexed union") {
  World w({"x", "y"}, {}, 0, 2);
  Rng rng(17);
  for (int i = 0; i < 200; i++) {
    CommandPtr c = hhltest::randomCommand(rng, {"x", "y"}, 1 + rng.upto(4));
    StateSet S1 = hhltest::randomStateSet(rng, w.u, 3);
    StateSet S2 = hhltest::randomStateSet(rng, w.u, 3);
    auto sem = w.sema();

    // union distribution
    CHECK(sem.sem(c, S1.unionWith(S2)) ==
          sem.sem(c, S1).unionWith(sem.sem(c, S2)));
    // monotonicity
    StateSet sub;
    for (size_t k = 0; k < S1.size(); k += 2) sub.insert(S1[k]);
    CHECK(sem.sem(c, sub).subsetOf(sem.sem(c, S1)));
    // choice = union of branches
    CommandPtr c2 = hhltest::randomCommand(rng, {"x", "y"}, 2);
    CHECK(sem.sem(Command::mkChoice(c, c2), S1) ==
          sem.sem(c, S1).unionWith(sem.sem(c2, S1)));
  }
}

TEST_CASE("iteration equals the union of bounded unrollings") {
  World w({"x"}, {}, 0, 3, 3);
  Rng rng(23);
  for (int i = 0; i < 100; i++) {
    CommandPtr body = hhltest::randomCommand(rng, {"x"}, 2);
    StateSet S = hhltest::randomStateSet(rng, w.u, 3);
    auto semA = w.sema();
    StateSet lhs = semA.sem(Command::mkIter(body), S);

    // independent route: sem(C^0,S) ∪ sem(C^1,S) ∪ ... ∪ sem(C^N,S)
    auto semB = w.sema();
    StateSet rhs = S;
    CommandPtr chain = nullptr;
    for (int n = 1; n <= w.u.maxIter; n++) {
      chain = chain ? Command::mkSeq(chain, body) : body;
      rhs = rhs.unionWith(semB.sem(chain, S));
    }
    CHECK(lhs == rhs);
  }
}

TEST_CASE("logical components pass through unchanged") {
  World w({"x"}, {"t"}, 0, 2);
  Rng rng(31);
  for (int i = 0; i < 100; i++) {
    CommandPtr c = hhltest::randomCommand(rng, {"x"}, 3);
    StateSet S = hhltest::randomStateSet(rng, w.u, 3);
    auto sem = w.sema();
    StateSet out = sem.sem(c, S);
    for (size_t k = 0; k < out.size(); k++) {
      bool matched = false;
      for (size_t j = 0; j < S.size(); j++)
        if (S[j].log == out[k].log) matched = true;
      CHECK(matched);
    }
  }
}

TEST_CASE("terminatesAll within the bound") {
  Program p = parseProgram("vars x: int(0..3); while (x > 0) { x := x - 1 }");
  StateSet S;
  S.insert(ExtState{{}, mk({3})});

  Universe u = Universe::fromProgram(p);
  u.maxIter = 5;
  Semantics s5(u.layout, u.fuel());
  CHECK(s5.terminatesAll(p.body, S));

  u.maxIter = 2;
  Semantics s2(u.layout, u.fuel());
  CHECK(!s2.terminatesAll(p.body, S));
  CHECK(s2.bounded());

  Program q = parseProgram("vars x: int(0..3); assume false");
  Semantics s3(u.layout, u.fuel());
  CHECK(!s3.terminatesAll(q.body, S));
  Semantics s4(u.layout, u.fuel());
  CHECK(s4.terminatesAll(Command::mkSkip(), S));
}

TEST_CASE("loop fixpoint detection keeps results exact") {
  // x := x; the loop reaches a fixpoint immediately, so nothing is bounded
  Program p = parseProgram("vars x: int(0..1); iter { x := x }");
  Universe u = Universe::fromProgram(p);
  u.maxIter = 2;
  Semantics sem(u.layout, u.fuel());
  StateSet S;
  S.insert(ExtState{{}, mk({1})});
  StateSet out = sem.sem(p.body, S);
  CHECK(out.size() == 1);
  CHECK(!sem.bounded());

  // an unbounded counter does hit the bound
  Program q = parseProgram("vars x: int(0..1); iter { x := x + 1 }");
  Semantics semQ(u.layout, u.fuel());
  StateSet outQ = semQ.sem(q.body, S);
  CHECK(outQ.size() == 3);  // x, x+1, x+2
  CHECK(semQ.bounded());
}

TEST_CASE("dynamic errors abort with the offending operation") {
  Program p = parseProgram("vars x: int(0..1); x := x + true");
  Universe u = Universe::fromProgram(p);
  Semantics sem(u.layout, u.fuel());
  StateSet S;
  S.insert(ExtState{{}, mk({0})});
  CHECK_THROWS_AS(sem.sem(p.body, S), EvalError);

  Program q = parseProgram("vars x: int(0..1); havoc x");
  Program q2 = parseProgram("vars x: int; havoc x");
  Universe u2 = Universe::fromProgram(q2);
  Semantics sem2(u2.layout, u2.fuel());
  CHECK_THROWS_AS(sem2.sem(q2.body, S), EvalError);
}
