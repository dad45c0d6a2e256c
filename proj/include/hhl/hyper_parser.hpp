// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

#include "hhl/hyper_ast.hpp"
#include "hhl/parser.hpp"

namespace hhl {

// Parser for the hyper-assertion concrete syntax:
//
//   forall phi in S. A        exists phi in S. A      (states of the set)
//   forall phi in U. A                                (all universe states)
//   forall v. A   forall v: 0..9. A   forall v: dom(x). A   (values)
//   e <= e'   phi[x]   phi.L[x]   phi == phi'  (expands over declared vars)
//   emp   box(p)   low(e)   member(phi)   member(phi with x := e)
//   A (+) B   bigotimes(A)   bigotimes n. A   atmost(A)   atleast(A)
//   card{ e | phi in S, guard } <= e
//
// Inside box/low/guards there is an implicit state: bare program/logical
// variable names look up in it.
class AssertionParser {
 public:
  AssertionParser(Lexer& lx, const Program& prog,
                  std::set<std::string> stateScope = {},
                  std::set<std::string> valueScope = {})
      : lx_(lx),
        prog_(prog),
        stateScope_(std::move(stateScope)),
        valueScope_(std::move(valueScope)) {}

  HPtr parseAssertion() { return parseOtimes(); }

  // State-level assertion with an implicit state named `self`.
  HPtr parseStateLevel(const std::string& self) {
    implicit_.push_back(self);
    stateScope_.insert(self);
    HPtr r = parseOtimes();
    implicit_.pop_back();
    return r;
  }

  HExprPtr parseExpr() { return parseHImplies(); }

  HExprPtr parseExprWithSelf(const std::string& self) {
    implicit_.push_back(self);
    stateScope_.insert(self);
    HExprPtr r = parseHImplies();
    implicit_.pop_back();
    return r;
  }

 private:
  // ---- assertion levels ----
  HPtr parseOtimes() {
    HPtr l = parseImplies();
    while (lx_.eatPunct("(+)")) l = HAssertion::mkOtimes(l, parseImplies());
    return l;
  }
  HPtr parseImplies() {
    HPtr l = parseOr();
    if (lx_.eatPunct("=>")) return HAssertion::mkImplies(l, parseImplies());
    return l;
  }
  HPtr parseOr() {
    HPtr l = parseAnd();
    while (lx_.eatPunct("||")) l = HAssertion::mkOr(l, parseAnd());
    return l;
  }
  HPtr parseAnd() {
    HPtr l = parseUnary();
    while (lx_.eatPunct("&&")) l = HAssertion::mkAnd(l, parseUnary());
    return l;
  }

  HPtr parseUnary() {
    if (lx_.isIdent("forall") || lx_.isIdent("exists")) {
      bool isAll = lx_.next().text == "forall";
      return parseQuantified(isAll);
    }
    if (lx_.eatPunct("!")) return negate(parseUnary());
    return parseAtom();
  }

  HPtr parseQuantified(bool isAll) {
    struct Binder {
      enum class K { InSet, InUniv, Val } k;
      std::string name;
      DomainRef dom;
    };
    std::vector<Binder> bs;
    for (;;) {
      std::string name = lx_.expectIdent("a binder name");
      if (lx_.eatIdent("in")) {
        if (lx_.eatIdent("S"))
          bs.push_back({Binder::K::InSet, name, {}});
        else if (lx_.eatIdent("U"))
          bs.push_back({Binder::K::InUniv, name, {}});
        else
          lx_.fail("expected 'S' or 'U'");
      } else if (lx_.eatPunct(":")) {
        bs.push_back({Binder::K::Val, name, parseDomainRef()});
      } else {
        bs.push_back({Binder::K::Val, name, DomainRef::dflt()});
      }
      if (lx_.eatPunct(",")) continue;
      lx_.expectPunct(".");
      break;
    }
    for (const auto& b : bs) {
      if (b.k == Binder::K::Val)
        valueScope_.insert(b.name);
      else
        stateScope_.insert(b.name);
    }
    HPtr body = parseImplies();
    for (auto it = bs.rbegin(); it != bs.rend(); ++it) {
      switch (it->k) {
        case Binder::K::InSet:
          body = HAssertion::mkQuantState(
              isAll ? HK::ForallState : HK::ExistsState, it->name, body);
          break;
        case Binder::K::InUniv:
          body = HAssertion::mkQuantState(
              isAll ? HK::ForallStateU : HK::ExistsStateU, it->name, body);
          break;
        case Binder::K::Val:
          body = HAssertion::mkQuantVal(
              isAll ? HK::ForallVal : HK::ExistsVal, it->name, it->dom, body);
          break;
      }
    }
    return body;
  }

  DomainRef parseDomainRef() {
    if (lx_.eatIdent("dom")) {
      lx_.expectPunct("(");
      std::string v = lx_.expectIdent("a variable name");
      lx_.expectPunct(")");
      return DomainRef::ofVar(v);
    }
    if (lx_.eatPunct("{")) {
      std::vector<Value> vals;
      vals.push_back(parseValueLit());
      while (lx_.eatPunct(",")) vals.push_back(parseValueLit());
      lx_.expectPunct("}");
      return DomainRef::explicitSet(std::move(vals));
    }
    Int lo = lx_.expectInt();
    lx_.expectPunct("..");
    Int hi = lx_.expectInt();
    std::vector<Value> vals;
    for (Int v = lo; v <= hi; ++v) vals.emplace_back(v);
    return DomainRef::explicitSet(std::move(vals));
  }

  Value parseValueLit() {
    if (lx_.eatIdent("true")) return Value(true);
    if (lx_.eatIdent("false")) return Value(false);
    if (lx_.eatPunct("[]")) return Value(ValueList{});
    if (lx_.eatPunct("[")) {
      ValueList xs;
      if (!lx_.isPunct("]")) {
        xs.push_back(parseValueLit());
        while (lx_.eatPunct(",")) xs.push_back(parseValueLit());
      }
      lx_.expectPunct("]");
      return Value(std::move(xs));
    }
    return Value(lx_.expectInt());
  }

  HPtr parseAtom() {
    if (lx_.eatIdent("true")) return HAssertion::mkTrue();
    if (lx_.eatIdent("false")) return HAssertion::mkFalse();
    if (lx_.eatIdent("emp")) return HAssertion::mkEmp();
    if (lx_.eatIdent("box")) {
      lx_.expectPunct("(");
      std::string self = freshSelf();
      HPtr body = parseStateLevel(self);
      lx_.expectPunct(")");
      return HAssertion::mkBox(self, body);
    }
    if (lx_.eatIdent("low")) {
      lx_.expectPunct("(");
      std::string self = freshSelf();
      HExprPtr e = parseExprWithSelf(self);
      lx_.expectPunct(")");
      return HAssertion::mkLow(self, e);
    }
    if (lx_.eatIdent("member")) {
      lx_.expectPunct("(");
      StateRefExpr s = parseStateRefExpr();
      lx_.expectPunct(")");
      return HAssertion::mkMember(std::move(s));
    }
    if (lx_.eatIdent("bigotimes")) {
      if (lx_.eatPunct("(")) {
        HPtr a = parseAssertion();
        lx_.expectPunct(")");
        return HAssertion::mkBigOtimes(a);
      }
      std::string idx = lx_.expectIdent("an index binder");
      DomainRef dom = DomainRef::dflt();
      if (lx_.eatPunct(":")) dom = parseDomainRef();
      lx_.expectPunct(".");
      valueScope_.insert(idx);
      HPtr body = parseImplies();
      return HAssertion::mkBigOtimesFamily(idx, dom, body);
    }
    if (lx_.eatIdent("atmost")) {
      lx_.expectPunct("(");
      HPtr a = parseAssertion();
      lx_.expectPunct(")");
      return HAssertion::mkAtMost(a);
    }
    if (lx_.eatIdent("atleast")) {
      lx_.expectPunct("(");
      HPtr a = parseAssertion();
      lx_.expectPunct(")");
      return HAssertion::mkAtLeast(a);
    }
    if (lx_.eatIdent("card")) {
      lx_.expectPunct("{");
      size_t exprStart = lx_.save();
      // binder is introduced after the element expression; pre-scan for it
      std::string binder = scanCardBinder();
      stateScope_.insert(binder);
      lx_.restore(exprStart);
      HExprPtr elem = parseHAdd();
      lx_.expectPunct("|");
      std::string b2 = lx_.expectIdent("the comprehension binder");
      if (b2 != binder) lx_.fail("inconsistent comprehension binder");
      if (!lx_.eatIdent("in") || !lx_.eatIdent("S"))
        lx_.fail("expected 'in S'");
      HPtr guard = nullptr;
      if (lx_.eatPunct(",")) guard = parseAssertion();
      lx_.expectPunct("}");
      CmpOp op = parseCmpOp();
      HExprPtr bound = parseHAdd();
      return HAssertion::mkCardCmp(binder, elem, guard, op, bound);
    }
    if (lx_.isPunct("(")) {
      // Either a parenthesized assertion or a parenthesized expression that
      // begins a comparison; try the assertion reading first.
      size_t pos = lx_.save();
      lx_.next();
      bool ok = true;
      HPtr a = nullptr;
      try {
        a = parseAssertion();
        lx_.expectPunct(")");
      } catch (const ParseError&) {
        ok = false;
      }
      if (ok && !startsExprOp()) return a;
      lx_.restore(pos);
      return parseCmpAtom();
    }
    return parseCmpAtom();
  }

  bool startsExprOp() const {
    static const char* ops[] = {"=",  "==", "!=", "<",  "<=", ">",
                                ">=", "+",  "-",  "*",  "++", "["};
    for (const char* o : ops)
      if (lx_.isPunct(o)) return true;
    return lx_.isIdent("xor");
  }

  CmpOp parseCmpOp() {
    if (lx_.eatPunct("=") || lx_.eatPunct("==")) return CmpOp::Eq;
    if (lx_.eatPunct("!=")) return CmpOp::Ne;
    if (lx_.eatPunct("<=")) return CmpOp::Le;
    if (lx_.eatPunct("<")) return CmpOp::Lt;
    if (lx_.eatPunct(">=")) return CmpOp::Ge;
    if (lx_.eatPunct(">")) return CmpOp::Gt;
    lx_.fail("expected a comparison operator");
  }

  // Comparison or boolean-valued expression atom. State equality between
  // two in-scope state names expands to equality of all declared variables.
  HPtr parseCmpAtom() {
    if (lx_.peek().kind == Token::Kind::Ident &&
        stateScope_.count(lx_.peek().text)) {
      const Token& t1 = lx_.peekAhead(1);
      if (t1.kind == Token::Kind::Punct && (t1.text == "==" || t1.text == "=")) {
        const Token& t2 = lx_.peekAhead(2);
        if (t2.kind == Token::Kind::Ident && stateScope_.count(t2.text)) {
          std::string a = lx_.next().text;
          lx_.next();
          std::string b = lx_.next().text;
          return stateEquality(a, b);
        }
      }
    }
    HExprPtr e1 = parseHAdd();
    if (lx_.isPunct("=") || lx_.isPunct("==") || lx_.isPunct("!=") ||
        lx_.isPunct("<") || lx_.isPunct("<=") || lx_.isPunct(">") ||
        lx_.isPunct(">=")) {
      CmpOp op = parseCmpOp();
      HExprPtr e2 = parseHAdd();
      return HAssertion::mkCmp(op, e1, e2);
    }
    // boolean-valued expression as an assertion
    return HAssertion::mkCmp(CmpOp::Eq, e1, HExpr::mkLit(Value(true)));
  }

  HPtr stateEquality(const std::string& a, const std::string& b) {
    HPtr conj = nullptr;
    auto add = [&](HPtr c) {
      conj = conj ? HAssertion::mkAnd(conj, c) : c;
    };
    for (const auto& d : prog_.pvars)
      add(HAssertion::mkCmp(CmpOp::Eq, HExpr::mkPLook(a, d.name),
                            HExpr::mkPLook(b, d.name)));
    for (const auto& d : prog_.lvars)
      add(HAssertion::mkCmp(CmpOp::Eq, HExpr::mkLLook(a, d.name),
                            HExpr::mkLLook(b, d.name)));
    if (!conj) return HAssertion::mkTrue();
    return conj;
  }

  StateRefExpr parseStateRefExpr() {
    StateRefExpr s;
    if (lx_.eatIdent("state")) {
      lx_.expectPunct("(");
      ExtState st;
      st.prog.vals.assign(prog_.pvars.size(), Value(0));
      st.log.assign(prog_.lvars.size(), Value(0));
      std::set<std::string> given;
      if (!lx_.isPunct(")")) {
        for (;;) {
          bool logical = false;
          std::string name;
          if (lx_.isIdent("L") && lx_.peekAhead(1).kind == Token::Kind::Punct &&
              lx_.peekAhead(1).text == "[") {
            lx_.next();
            lx_.expectPunct("[");
            name = lx_.expectIdent("a logical variable");
            lx_.expectPunct("]");
            logical = true;
          } else {
            name = lx_.expectIdent("a variable name");
          }
          lx_.expectPunct(":=");
          Value v = parseValueLit();
          if (logical)
            st.log[indexOfLvar(name)] = v;
          else
            st.prog.vals[indexOfPvar(name)] = v;
          given.insert((logical ? "L " : "") + name);
          if (!lx_.eatPunct(",")) break;
        }
      }
      lx_.expectPunct(")");
      s.literal = std::move(st);
    } else {
      s.ref = lx_.expectIdent("a state reference");
      if (!stateScope_.count(s.ref))
        lx_.fail("unknown state variable '" + s.ref + "'");
    }
    if (lx_.eatIdent("with")) {
      for (;;) {
        if (lx_.isIdent("L") && lx_.peekAhead(1).kind == Token::Kind::Punct &&
            lx_.peekAhead(1).text == "[") {
          lx_.next();
          lx_.expectPunct("[");
          std::string name = lx_.expectIdent("a logical variable");
          lx_.expectPunct("]");
          indexOfLvar(name);
          lx_.expectPunct(":=");
          s.logUpdates.emplace_back(name, parseHImplies());
        } else {
          std::string name = lx_.expectIdent("a variable name");
          indexOfPvar(name);
          lx_.expectPunct(":=");
          s.progUpdates.emplace_back(name, parseHImplies());
        }
        if (!lx_.eatPunct(",")) break;
      }
    }
    return s;
  }

  int indexOfPvar(const std::string& n) {
    for (size_t i = 0; i < prog_.pvars.size(); i++)
      if (prog_.pvars[i].name == n) return static_cast<int>(i);
    lx_.fail("unknown program variable '" + n + "'");
  }
  int indexOfLvar(const std::string& n) {
    for (size_t i = 0; i < prog_.lvars.size(); i++)
      if (prog_.lvars[i].name == n) return static_cast<int>(i);
    lx_.fail("unknown logical variable '" + n + "'");
  }

  // Scans forward from inside card{ to find the binder name after '|'.
  std::string scanCardBinder() {
    int depth = 0;
    for (size_t i = 0;; i++) {
      const Token& t = lx_.peekAhead(i);
      if (t.kind == Token::Kind::End) lx_.fail("unterminated card{ }");
      if (t.kind != Token::Kind::Punct) continue;
      if (t.text == "{") depth++;
      if (t.text == "}") {
        if (depth == 0) lx_.fail("missing '|' in card{ }");
        depth--;
      }
      if (t.text == "|" && depth == 0) {
        const Token& b = lx_.peekAhead(i + 1);
        if (b.kind != Token::Kind::Ident)
          lx_.fail("expected comprehension binder after '|'");
        return b.text;
      }
    }
  }

  // ---- hyper-expression levels ----
  HExprPtr parseHImplies() {
    HExprPtr l = parseHOr();
    if (lx_.eatPunct("=>"))
      return HExpr::mkBool(BoolOp::Implies, l, parseHImplies());
    return l;
  }
  HExprPtr parseHOr() {
    HExprPtr l = parseHAnd();
    while (lx_.eatPunct("||")) l = HExpr::mkBool(BoolOp::Or, l, parseHAnd());
    return l;
  }
  HExprPtr parseHAnd() {
    HExprPtr l = parseHCmp();
    while (lx_.eatPunct("&&")) l = HExpr::mkBool(BoolOp::And, l, parseHCmp());
    return l;
  }
  HExprPtr parseHCmp() {
    HExprPtr l = parseHAdd();
    CmpOp op;
    if (lx_.isPunct("==")) {
      lx_.next();
      op = CmpOp::Eq;
    } else if (lx_.isPunct("!=")) {
      lx_.next();
      op = CmpOp::Ne;
    } else if (lx_.isPunct("<=")) {
      lx_.next();
      op = CmpOp::Le;
    } else if (lx_.isPunct("<")) {
      lx_.next();
      op = CmpOp::Lt;
    } else if (lx_.isPunct(">=")) {
      lx_.next();
      op = CmpOp::Ge;
    } else if (lx_.isPunct(">")) {
      lx_.next();
      op = CmpOp::Gt;
    } else {
      return l;
    }
    return HExpr::mkCmp(op, l, parseHAdd());
  }
  HExprPtr parseHAdd() {
    HExprPtr l = parseHMul();
    for (;;) {
      if (lx_.eatPunct("+"))
        l = HExpr::mkBin(BinOp::Add, l, parseHMul());
      else if (lx_.eatPunct("-"))
        l = HExpr::mkBin(BinOp::Sub, l, parseHMul());
      else if (lx_.eatPunct("++"))
        l = HExpr::mkBin(BinOp::Concat, l, parseHMul());
      else if (lx_.eatIdent("xor"))
        l = HExpr::mkBin(BinOp::Xor, l, parseHMul());
      else
        return l;
    }
  }
  HExprPtr parseHMul() {
    HExprPtr l = parseHPostfix();
    while (lx_.eatPunct("*")) l = HExpr::mkBin(BinOp::Mul, l, parseHPostfix());
    return l;
  }
  HExprPtr parseHPostfix() {
    HExprPtr l = parseHAtom();
    while (lx_.isPunct("[")) {
      lx_.next();
      HExprPtr idx = parseHImplies();
      lx_.expectPunct("]");
      l = HExpr::mkBin(BinOp::Index, l, idx);
    }
    return l;
  }
  HExprPtr parseHAtom() {
    if (lx_.peek().kind == Token::Kind::Int)
      return HExpr::mkLit(Value(lx_.next().intVal));
    if (lx_.eatPunct("-"))
      return HExpr::mkBin(BinOp::Sub, HExpr::mkLit(Value(0)), parseHPostfix());
    if (lx_.eatIdent("true")) return HExpr::mkLit(Value(true));
    if (lx_.eatIdent("false")) return HExpr::mkLit(Value(false));
    if (lx_.eatPunct("[]")) return HExpr::mkLit(Value(ValueList{}));
    if (lx_.isPunct("[")) {
      lx_.next();
      ValueList xs;
      if (!lx_.isPunct("]")) {
        xs.push_back(parseValueLit());
        while (lx_.eatPunct(",")) xs.push_back(parseValueLit());
      }
      lx_.expectPunct("]");
      return HExpr::mkLit(Value(std::move(xs)));
    }
    if (lx_.eatIdent("len")) {
      lx_.expectPunct("(");
      HExprPtr e = parseHImplies();
      lx_.expectPunct(")");
      return HExpr::mkLen(e);
    }
    if (lx_.eatPunct("(")) {
      HExprPtr e = parseHImplies();
      lx_.expectPunct(")");
      return e;
    }
    if (lx_.peek().kind != Token::Kind::Ident) lx_.fail("expected an expression");
    std::string name = lx_.next().text;
    // state lookups: phi[x] and phi.L[x]
    if (lx_.isPunct("[") && stateScope_.count(name)) {
      lx_.next();
      std::string field = lx_.expectIdent("a program variable");
      lx_.expectPunct("]");
      indexOfPvar(field);
      return HExpr::mkPLook(name, field);
    }
    if (lx_.isPunct(".") && stateScope_.count(name)) {
      lx_.next();
      if (!lx_.eatIdent("L")) lx_.fail("expected 'L' after '.'");
      lx_.expectPunct("[");
      std::string field = lx_.expectIdent("a logical variable");
      lx_.expectPunct("]");
      indexOfLvar(field);
      return HExpr::mkLLook(name, field);
    }
    // bare identifier: an implicit-state lookup or a value variable
    if (!implicit_.empty() && !valueScope_.count(name)) {
      if (prog_.isPVar(name)) return HExpr::mkPLook(implicit_.back(), name);
      if (prog_.isLVar(name)) return HExpr::mkLLook(implicit_.back(), name);
    }
    return HExpr::mkQVar(name);
  }

  std::string freshSelf() { return "_s" + std::to_string(selfCounter_++); }

  Lexer& lx_;
  const Program& prog_;
  std::set<std::string> stateScope_;
  std::set<std::string> valueScope_;
  std::vector<std::string> implicit_;
  int selfCounter_ = 0;
};

inline HPtr parseAssertion(const std::string& text, const Program& prog,
                           std::set<std::string> stateScope = {},
                           std::set<std::string> valueScope = {}) {
  Lexer lx(text);
  AssertionParser p(lx, prog, std::move(stateScope), std::move(valueScope));
  HPtr a = p.parseAssertion();
  if (!lx.atEnd()) lx.fail("trailing input after assertion");
  return a;
}

// A state predicate: an assertion over one distinguished state.
struct StatePred {
  std::string self;
  HPtr body;
};

inline StatePred parseStatePred(const std::string& text, const Program& prog,
                                std::set<std::string> stateScope = {},
                                std::set<std::string> valueScope = {}) {
  Lexer lx(text);
  AssertionParser p(lx, prog, std::move(stateScope), std::move(valueScope));
  StatePred sp;
  sp.self = "_g0";
  sp.body = p.parseStateLevel(sp.self);
  if (!lx.atEnd()) lx.fail("trailing input after state predicate");
  return sp;
}

// A state expression: a value expression over one distinguished state
// (loop variants, card elements).
struct StateExpr {
  std::string self;
  HExprPtr expr;
};

inline StateExpr parseStateExpr(const std::string& text, const Program& prog,
                                std::set<std::string> stateScope = {},
                                std::set<std::string> valueScope = {}) {
  Lexer lx(text);
  AssertionParser p(lx, prog, std::move(stateScope), std::move(valueScope));
  StateExpr se;
  se.self = "_e0";
  se.expr = p.parseExprWithSelf(se.self);
  if (!lx.atEnd()) lx.fail("trailing input after expression");
  return se;
}

}  // namespace hhl
