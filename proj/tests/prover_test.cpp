// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hhl/prover.hpp"
#include "test_util.hpp"

using namespace hhl;

namespace {

struct World {
  Program prog;
  Universe u;
  explicit World(const std::string& src, int maxCard = 2)
      : prog(parseProgram(src)) {
    u = Universe::fromProgram(prog);
    u.maxCard = maxCard;
  }
  Report run(const std::string& script) {
    return checkProof(prog, parseProofScript(script), u);
  }
};

int countStatus(const Report& r, Obligation::Status s) {
  int n = 0;
  for (const auto& o : r.obligations)
    if (o.status == s) n++;
  return n;
}

}  // namespace

TEST_CASE("skip with matching pre and post, no obligations") {
  World w("vars x: int(0..1);\nskip");
  Report r = w.run("(skip :pre {forall p in S. p[x] = 0} "
                   ":post {forall p in S. p[x] = 0})");
  CHECK(r.accepted);
  CHECK(r.grade == Report::Grade::Syntactic);
  CHECK(r.obligations.empty());
}

TEST_CASE("rule misfits are reported with locations") {
  World w("vars x: int(0..1);\nskip");
  Report r = w.run("(seq (skip :pre {emp}) (skip :pre {emp}))");
  CHECK(!r.accepted);
  CHECK(r.grade == Report::Grade::Failed);
  Report r2 = w.run("(frobnicate :pre {emp} :post {emp})");
  CHECK(!r2.accepted);
  Report r3 = w.run("(skip :pre {emp} :post {!emp})");
  CHECK(!r3.accepted);
}

TEST_CASE("syntactic assignment rule computes its precondition") {
  World w("vars x: int(0..2), y: int(0..2);\nx := y + 1");
  Report r = w.run("(assigns :post {forall p in S. p[x] >= 1})");
  CHECK(r.accepted);
  CHECK(r.grade == Report::Grade::Syntactic);
  CHECK(printHAssertion(r.pre, w.u.layout.get()) ==
        "forall p in S. p[y] + 1 >= 1");
  // an explicitly supplied precondition must match the computed one
  Report r2 = w.run(
      "(assigns :pre {forall p in S. p[y] + 1 >= 1} "
      ":post {forall p in S. p[x] >= 1})");
  CHECK(r2.accepted);
  Report r3 = w.run(
      "(assigns :pre {forall p in S. p[y] >= 1} "
      ":post {forall p in S. p[x] >= 1})");
  CHECK(!r3.accepted);
}

TEST_CASE("syntactic rules never emit entailment obligations") {
  World w("vars x: int(0..3);\nhavoc x;\nassume x > 0");
  Report r = w.run(
      "(seq (havocs :post {forall p in S. forall v: dom(x). v >= 0})\n"
      "     (assumes :post {forall p in S. p[x] >= 0}))");
  // havoc pre: forall p, v'. v >= 0 ... mismatch: build the right chain
  // assume's computed pre: forall p. p[x] > 0 => p[x] >= 0
  Report r2 = w.run(
      "(seq (havocs :post {forall p in S. p[x] > 0 => p[x] >= 0})\n"
      "     (assumes :post {forall p in S. p[x] >= 0}))");
  CHECK(r2.accepted);
  CHECK(r2.grade == Report::Grade::Syntactic);
  CHECK(r2.obligations.empty());
}

TEST_CASE("consequence emits two entailment obligations") {
  World w("vars x: int(0..3);\nskip");
  Report r = w.run(
      "(cons :pre {box(x = 1)} :post {exists p in S. p[x] >= 0}\n"
      "  (skip :pre {box(x = 1)} :post {box(x = 1)}))");
  // box(x=1) |= box(x=1) is syntactic; box(x=1) |= exists p... is bounded
  // and fails on the empty set!
  CHECK(!r.accepted);
  Report r2 = w.run(
      "(cons :pre {box(x = 1) && !emp} :post {exists p in S. p[x] >= 0}\n"
      "  (skip :pre {box(x = 1) && !emp} :post {box(x = 1) && !emp}))");
  CHECK(r2.accepted);
  CHECK(r2.grade == Report::Grade::Bounded);
  CHECK(countStatus(r2, Obligation::Status::CheckedSyntactic) == 1);
  CHECK(countStatus(r2, Obligation::Status::CheckedBounded) == 1);
}

TEST_CASE("admitted consequences downgrade the grade") {
  World w("vars x: int(0..3);\nskip");
  Report r = w.run(
      "(cons :admit :pre {emp} :post {!emp}\n"
      "  (skip :pre {emp} :post {emp}))");
  CHECK(r.accepted);
  CHECK(r.grade == Report::Grade::Admitted);
  CHECK(countStatus(r, Obligation::Status::Admitted) == 1);
}

TEST_CASE("failed entailments carry a witness") {
  World w("vars x: int(0..3);\nskip");
  Report r = w.run(
      "(cons :pre {box(x = 1)} :post {box(x = 2)}\n"
      "  (skip :pre {box(x = 1)} :post {box(x = 1)}))");
  CHECK(!r.accepted);
  bool sawWitness = false;
  for (const auto& o : r.obligations)
    if (o.status == Obligation::Status::Failed &&
        o.detail.find("x: 1") != std::string::npos)
      sawWitness = true;
  CHECK(sawWitness);
}

TEST_CASE("choice combines with a split-union postcondition") {
  World w("vars x: int(0..2);\n{ x := 1 } [] { x := 2 }");
  Report r = w.run(
      "(choice\n"
      "  (cons :pre {true} :post {box(x = 1)} (assigns :post {box(x = 1)}))\n"
      "  (cons :pre {true} :post {box(x = 2)} (assigns :post {box(x = 2)})))");
  REQUIRE(r.accepted);
  CHECK(printHAssertion(r.post, w.u.layout.get()) ==
        "box(x = 1) (+) box(x = 2)");
}

TEST_CASE("the same report is produced on re-checking") {
  World w("vars x: int(0..2);\n{ x := 1 } [] { x := 2 }");
  std::string script =
      "(cons :pre {true} :post {(box(x = 1)) (+) (box(x = 2))}\n"
      " (choice (cons :pre {true} :post {box(x = 1)}\n"
      "            (assigns :post {box(x = 1)}))\n"
      "          (cons :pre {true} :post {box(x = 2)}\n"
      "            (assigns :post {box(x = 2)}))))";
  Report r1 = w.run(script);
  Report r2 = w.run(script);
  REQUIRE(r1.accepted);
  REQUIRE(r1.obligations.size() == r2.obligations.size());
  for (size_t i = 0; i < r1.obligations.size(); i++) {
    CHECK(r1.obligations[i].description == r2.obligations[i].description);
    CHECK(r1.obligations[i].status == r2.obligations[i].status);
    CHECK(r1.obligations[i].detail == r2.obligations[i].detail);
  }
}

TEST_CASE("iteration rule with an indexed invariant") {
  World w("vars x: int(0..5);\niter { x := x + 1 }", 1);
  w.u.maxIter = 3;
  // I_n: all states have x = initial + n is not expressible without logical
  // variables; use a monotone invariant family instead: box(x >= n)
  Report r = w.run(
      "(cons :pre {box(x >= 0)} :post {bigotimes n. box(x >= n)}\n"
      "  (iter :bind n :inv {box(x >= n)}\n"
      "    (assigns :post {box(x >= n + 1)})))");
  // assigns computes pre = box(x + 1 >= n + 1); inv fit wants box(x >= n):
  // alpha-inequality makes this fail; wrap with cons
  CHECK(!r.accepted);
  Report r2 = w.run(
      "(cons :pre {box(x >= 0)} :post {bigotimes n. box(x >= n)}\n"
      "  (iter :bind n :inv {box(x >= n)}\n"
      "    (cons :pre {box(x >= n)} :post {box(x >= n + 1)}\n"
      "      (assigns :post {box(x >= n + 1)}))))");
  CHECK(r2.accepted);
  CHECK(r2.grade == Report::Grade::Bounded);
}

TEST_CASE("frame rules: safe fragment and totality-aware version") {
  World w("vars x: int(0..2), y: int(0..2);\nx := 1");
  Report r = w.run(
      "(framesafe :frame {box(y = 1)}\n"
      "  (assigns :post {box(x = 1)}))");
  CHECK(r.accepted);
  // frames over written variables are rejected
  Report r2 = w.run(
      "(framesafe :frame {box(x = 1)}\n"
      "  (assigns :post {box(x = 1)}))");
  CHECK(!r2.accepted);
  // existential frames are rejected by the safe rule
  Report r3 = w.run(
      "(framesafe :frame {exists p in S. p[y] = 1}\n"
      "  (assigns :post {box(x = 1)}))");
  CHECK(!r3.accepted);
  // ... but allowed by the totality-aware rule, which emits a semantic
  // termination premise
  Report r4 = w.run(
      "(frame :frame {exists p in S. p[y] = 1}\n"
      "  (assigns :post {box(x = 1)}))");
  CHECK(r4.accepted);
  CHECK(countStatus(r4, Obligation::Status::CheckedBounded) >= 1);
  // and the totality premise really fails on a stuck command
  World w2("vars x: int(0..2), y: int(0..2);\nassume false");
  Report r5 = checkProof(
      w2.prog,
      parseProofScript("(frame :frame {exists p in S. p[y] = 1}\n"
                       "  (assumes :post {box(x = 1)}))"),
      w2.u);
  CHECK(!r5.accepted);
}

TEST_CASE("specialize restricts a triple through a guard") {
  World w("vars x: int(0..2);\nx := x + 1;\nskip");
  // specialization guard on a logical variable is fine; on a written
  // program variable it is rejected
  World w2("vars x: int(0..2); lvars i: int(1..2);\nx := x + 1");
  Report r = checkProof(
      w2.prog,
      parseProofScript(
          "(specialize :guard {i = 1}\n"
          "  (assigns :post {forall p in S. p[x] >= 1}))"),
      w2.u);
  CHECK(r.accepted);
  CHECK(printHAssertion(r.post, w2.u.layout.get()) ==
        "forall p in S. p.L[i] = 1 => p[x] >= 1");
  Report r2 = checkProof(
      w2.prog,
      parseProofScript(
          "(specialize :guard {x = 1}\n"
          "  (assigns :post {forall p in S. p[x] >= 1}))"),
      w2.u);
  CHECK(!r2.accepted);
}

TEST_CASE("logical update rules") {
  World w("vars x: int(0..1); lvars t: int(0..1);\nx := x", 2);
  // semantic version: relabel t freely
  Report r = w.run(
      "(lupdate :vars (t) :pre {low(x)}\n"
      "  (cons :pre {low(x) && box(t = 0)} :post {low(x)}\n"
      "    (assigns :post {low(x)})))");
  CHECK(r.accepted);
  CHECK(r.grade == Report::Grade::Bounded);
  // syntactic version pins t to an expression
  Report r2 = w.run(
      "(lupdates :updates ((t {x})) :pre {low(x)}\n"
      "  (cons :pre {low(x) && (forall p in S. p.L[t] = p[x])} :post {low(x)}\n"
      "    (assigns :post {low(x)})))");
  CHECK(r2.accepted);
  // the updated variable must be absent from pre/post/expression
  Report r3 = w.run(
      "(lupdates :updates ((t {x})) :pre {box(t = 0)}\n"
      "  (cons :pre {box(t = 0) && (forall p in S. p.L[t] = p[x])}\n"
      "        :post {box(t = 0)}\n"
      "    (assigns :post {box(t = 0)})))");
  CHECK(!r3.accepted);
}

TEST_CASE("linking proves universal pre-post correspondences") {
  World w("vars x: int(0..1); lvars h: int(0..1);\nx := x", 2);
  // {forall p. P_p} C {forall p. Q_p} where Q refers to the linked final
  // state: here, the logical variable is preserved, so h-based claims carry
  Report r = w.run(
      "(linking :bindstates (p1 p2)\n"
      "  :pre {forall p in S. p.L[h] = 0 || p.L[h] = 1}\n"
      "  :post {forall p in S. p.L[h] = 0 || p.L[h] = 1}\n"
      "  (cons :pre {p1.L[h] = 0 || p1.L[h] = 1}\n"
      "        :post {p2.L[h] = 0 || p2.L[h] = 1}\n"
      "    (assigns :post {p2.L[h] = 0 || p2.L[h] = 1})))");
  CHECK(r.accepted);
  CHECK(r.grade == Report::Grade::Bounded);
}

TEST_CASE("exists rule with a value binder") {
  World w("vars x: int(0..3);\nx := x", 1);
  Report r = w.run(
      "(exist :bind n :dom {0..3}\n"
      "  (assigns :post {box(x = n)}))");
  REQUIRE(r.accepted);
  CHECK(printHAssertion(r.pre, w.u.layout.get()) ==
        "exists n: 0..3. box(x = n)");
}

TEST_CASE("accepted non-admitted proofs survive soundness fuzzing") {
  World w("vars x: int(0..2);\n{ x := 1 } [] { x := 2 }");
  std::string script =
      "(cons :pre {!emp} :post {exists p in S. p[x] >= 1}\n"
      " (choice (cons :pre {!emp} :post {box(x = 1) && !emp}\n"
      "            (assigns :post {box(x = 1) && !emp}))\n"
      "          (cons :pre {!emp} :post {box(x = 2) && !emp}\n"
      "            (assigns :post {box(x = 2) && !emp}))))";
  Report r = w.run(script);
  REQUIRE(r.accepted);
  REQUIRE(r.grade == Report::Grade::Bounded);
  hhltest::Rng rng(55);
  SatChecker sc(w.u);
  int tried = 0;
  for (int it = 0; it < 500 && tried < 100; it++) {
    StateSet S = hhltest::randomStateSet(rng, w.u, 3);
    RigidEnv env;
    if (!sc.sat(S, env, r.pre)) continue;
    tried++;
    Semantics sema(w.u.layout, w.u.fuel());
    StateSet after = sema.sem(w.prog.body, S);
    CHECK(sc.sat(after, env, r.post));
  }
  CHECK(tried >= 50);
}
