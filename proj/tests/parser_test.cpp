// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hhl/parser.hpp"
#include "test_util.hpp"

using namespace hhl;

static const char* kFibSource = R"(
vars a: int(0..0), b: int(0..0), i: int(0..0), tmp: int(0..0), n: int(0..4);
lvars t: int(1..2);
a := 0;
b := 1;
i := 0;
while (i < n) {
  tmp := b;
  b := a + b;
  a := tmp;
  i := i + 1
}
)";

TEST_CASE("random number generation parses to havoc-assume") {
  Program p = parseProgram(
      "vars x: int(0..9);\nhavoc x;\nassume 0 <= x && x <= 9");
  REQUIRE(p.body->kind == Command::Kind::Seq);
  CHECK(p.body->c1->kind == Command::Kind::Havoc);
  CHECK(p.body->c2->kind == Command::Kind::Assume);
}

TEST_CASE("minimal program") {
  Program p = parseProgram("vars x: int(0..0);\nskip");
  CHECK(p.body->kind == Command::Kind::Skip);
}

TEST_CASE("fibonacci program: while sugar and writes") {
  Program p = parseProgram(kFibSource);
  // body is a;b;i;while, with a four-statement loop body
  std::set<std::string> w = wrVars(p.body);
  CHECK(w == std::set<std::string>{"a", "b", "i", "tmp"});
  const Command* c = p.body.get();
  while (c->kind == Command::Kind::Seq) c = c->c2.get();
  REQUIRE(c->kind == Command::Kind::While);
  int stmts = 1;
  for (const Command* b = c->c1.get(); b->kind == Command::Kind::Seq;
       b = b->c2.get())
    stmts++;
  CHECK(stmts == 4);
}

TEST_CASE("choice and iter syntax") {
  Program p = parseProgram(
      "vars x: int(0..1);\n{ x := 0 } [] { x := 1 };\niter { x := x + 1 }");
  REQUIRE(p.body->kind == Command::Kind::Seq);
  CHECK(p.body->c1->kind == Command::Kind::Choice);
  CHECK(p.body->c2->kind == Command::Kind::Iter);
}

TEST_CASE("errors: undeclared variable and duplicates") {
  CHECK_THROWS_AS(parseProgram("vars x: int(0..1); y := 2"), ParseError);
  CHECK_THROWS_AS(parseProgram("vars x: int(0..1), x: int(0..1); skip"),
                  ParseError);
  CHECK_THROWS_AS(parseProgram("vars x: int(0..1); lvars x: int(0..1); skip"),
                  ParseError);
  CHECK_THROWS_AS(parseProgram("vars x: int(0..1); x := "), ParseError);
}

TEST_CASE("desugar removes if and while, and is idempotent") {
  Program p = parseProgram(
      "vars h: int(-1..1), l: int(0..1);\n"
      "if (h > 0) { l := 1 } else { l := 0 }");
  CommandPtr d = desugar(p.body);
  REQUIRE(d->kind == Command::Kind::Choice);
  CHECK(d->c1->kind == Command::Kind::Seq);
  CHECK(d->c1->c1->kind == Command::Kind::Assume);
  // negated guard is in comparison normal form
  CHECK(printPExpr(d->c2->c1->expr) == "h <= 0");
  CHECK(commandEqual(desugar(d), d));

  Program w = parseProgram("vars x: int(0..3);\nwhile (x > 0) { x := x - 1 }");
  CommandPtr dw = desugar(w.body);
  REQUIRE(dw->kind == Command::Kind::Seq);
  CHECK(dw->c1->kind == Command::Kind::Iter);
  CHECK(dw->c2->kind == Command::Kind::Assume);
}

TEST_CASE("wrVars basics") {
  Program p = parseProgram("vars x: int(0..1), y: int(0..1);\nx := y + 1");
  CHECK(wrVars(p.body) == std::set<std::string>{"x"});
  Program q = parseProgram("vars b: bool;\nassume b");
  CHECK(wrVars(q.body).empty());
}

TEST_CASE("round trip: parse after print is identity (random ASTs)") {
  hhltest::Rng rng(7);
  std::vector<std::string> vars = {"x", "y", "z"};
  for (int i = 0; i < 300; i++) {
    CommandPtr c = hhltest::randomSugaredCommand(rng, vars, 1 + rng.upto(5));
    Program p;
    for (const auto& v : vars) p.pvars.push_back({v, DomainHint::intRange(0, 2)});
    p.body = c;
    std::string printed = printProgram(p);
    Program re = parseProgram(printed);
    CHECK(commandEqual(re.body, c));
  }
}

TEST_CASE("desugar preserves wrVars and is a structural homomorphism") {
  hhltest::Rng rng(11);
  std::vector<std::string> vars = {"x", "y"};
  for (int i = 0; i < 200; i++) {
    CommandPtr c = hhltest::randomSugaredCommand(rng, vars, 1 + rng.upto(4));
    CHECK(wrVars(desugar(c)) == wrVars(c));
    CommandPtr a = hhltest::randomCommand(rng, vars, 2);
    CommandPtr b = hhltest::randomCommand(rng, vars, 2);
    auto u = wrVars(Command::mkSeq(a, b));
    auto ua = wrVars(a);
    for (const auto& v : wrVars(b)) ua.insert(v);
    CHECK(u == ua);
  }
}

TEST_CASE("list and bool domains parse and print") {
  Program p = parseProgram(
      "vars h: list(int(0..1), maxlen 2), f: bool, s: int;\nskip");
  CHECK(p.pvars[0].hint.kind == DomainHint::Kind::List);
  CHECK(p.pvars[0].hint.enumerate().size() == 7);  // [], 2 singletons, 4 pairs
  CHECK(p.pvars[1].hint.enumerate().size() == 2);
  CHECK(!p.pvars[2].hint.finite());
  Program re = parseProgram(printProgram(p));
  CHECK(re.pvars[0].hint.kind == DomainHint::Kind::List);
}
