// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hhl/ast.hpp"

namespace hhl {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
};

// ---------------------------------------------------------------------------
// Shared lexer for the program and assertion grammars. Identifiers may
// contain primes (x', phi'') since relational specs conventionally use them.

struct Token {
  enum class Kind { Ident, Int, Punct, End } kind;
  std::string text;
  Int intVal;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string src) : src_(std::move(src)) {
    do {
      advance();
      toks_.push_back(tok_);
    } while (tok_.kind != Token::Kind::End);
    idx_ = 0;
    tok_ = toks_[0];
  }

  const Token& peek() const { return tok_; }
  const Token& peekAhead(size_t n) const {
    size_t i = idx_ + n;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  Token next() {
    Token t = tok_;
    if (idx_ + 1 < toks_.size()) idx_++;
    tok_ = toks_[idx_];
    return t;
  }
  size_t save() const { return idx_; }
  void restore(size_t s) {
    idx_ = s;
    tok_ = toks_[idx_];
  }
  bool atEnd() const { return tok_.kind == Token::Kind::End; }

  bool isPunct(const std::string& p) const {
    return tok_.kind == Token::Kind::Punct && tok_.text == p;
  }
  bool isIdent(const std::string& w) const {
    return tok_.kind == Token::Kind::Ident && tok_.text == w;
  }
  bool eatPunct(const std::string& p) {
    if (!isPunct(p)) return false;
    next();
    return true;
  }
  bool eatIdent(const std::string& w) {
    if (!isIdent(w)) return false;
    next();
    return true;
  }
  void expectPunct(const std::string& p) {
    if (!eatPunct(p)) fail("expected '" + p + "'");
  }
  std::string expectIdent(const std::string& what) {
    if (tok_.kind != Token::Kind::Ident) fail("expected " + what);
    return next().text;
  }
  Int expectInt() {
    bool neg = false;
    if (isPunct("-")) {
      next();
      neg = true;
    }
    if (tok_.kind != Token::Kind::Int) fail("expected an integer");
    Int v = next().intVal;
    return neg ? Int(-v) : v;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " (found '" +
                         (tok_.kind == Token::Kind::End ? "<end>" : tok_.text) +
                         "')",
                     tok_.line, tok_.col);
  }

 private:
  void advance() {
    skipWs();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Token::Kind::End, "", 0, line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_' || src_[pos_] == '\''))
        bump();
      tok_ = {Token::Kind::Ident, src_.substr(start, pos_ - start), 0,
              tok_.line, tok_.col};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        bump();
      Token t{Token::Kind::Int, src_.substr(start, pos_ - start), 0, tok_.line,
              tok_.col};
      t.intVal = Int(t.text);
      tok_ = t;
      return;
    }
    // Longest-match punctuation.
    static const char* puncts[] = {"(+)", ":=", "..", "++", "==", "!=", "<=",
                                   ">=", "&&", "||", "=>", "[]", "(", ")",
                                   "[",  "]",  "{",  "}",  ",",  ";",  ":",
                                   ".",  "+",  "-",  "*",  "=",  "<",  ">",
                                   "!",  "|"};
    for (const char* p : puncts) {
      size_t n = std::strlen(p);
      if (src_.compare(pos_, n, p) == 0) {
        // "[]" is only the choice operator between blocks; in expression
        // position an empty list must lex as two brackets. Emit "[" and let
        // the parser decide by peeking for "]".
        if (std::string(p) == "[]") {
          tok_ = {Token::Kind::Punct, "[]", 0, tok_.line, tok_.col};
          for (size_t i = 0; i < n; i++) bump();
          return;
        }
        tok_ = {Token::Kind::Punct, p, 0, tok_.line, tok_.col};
        for (size_t i = 0; i < n; i++) bump();
        return;
      }
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_,
                     col_);
  }

  void skipWs() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }
  void bump() {
    if (src_[pos_] == '\n') {
      line_++;
      col_ = 1;
    } else {
      col_++;
    }
    pos_++;
  }

  std::string src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
  std::vector<Token> toks_;
  size_t idx_ = 0;
};

// ---------------------------------------------------------------------------
// Expression parser (shared precedence climbing).
//   =>  ||  &&  !  cmp  (+ - ++ xor)  *  postfix[índex]  atom

class PExprParser {
 public:
  explicit PExprParser(Lexer& lx) : lx_(lx) {}

  PExprPtr parse() { return parseImplies(); }

 private:
  PExprPtr parseImplies() {
    PExprPtr l = parseOr();
    if (lx_.eatPunct("=>"))
      return PExpr::mkBool(BoolOp::Implies, l, parseImplies());
    return l;
  }
  PExprPtr parseOr() {
    PExprPtr l = parseAnd();
    while (lx_.eatPunct("||")) l = PExpr::mkBool(BoolOp::Or, l, parseAnd());
    return l;
  }
  PExprPtr parseAnd() {
    PExprPtr l = parseNot();
    while (lx_.eatPunct("&&")) l = PExpr::mkBool(BoolOp::And, l, parseNot());
    return l;
  }
  PExprPtr parseNot() {
    if (lx_.eatPunct("!")) return pNot(parseNot());
    return parseCmp();
  }
  PExprPtr parseCmp() {
    PExprPtr l = parseAdd();
    CmpOp op;
    if (lx_.isPunct("=") || lx_.isPunct("=="))
      op = CmpOp::Eq;
    else if (lx_.isPunct("!="))
      op = CmpOp::Ne;
    else if (lx_.isPunct("<"))
      op = CmpOp::Lt;
    else if (lx_.isPunct("<="))
      op = CmpOp::Le;
    else if (lx_.isPunct(">"))
      op = CmpOp::Gt;
    else if (lx_.isPunct(">="))
      op = CmpOp::Ge;
    else
      return l;
    lx_.next();
    return PExpr::mkCmp(op, l, parseAdd());
  }
  PExprPtr parseAdd() {
    PExprPtr l = parseMul();
    for (;;) {
      if (lx_.eatPunct("+"))
        l = PExpr::mkBin(BinOp::Add, l, parseMul());
      else if (lx_.eatPunct("-"))
        l = PExpr::mkBin(BinOp::Sub, l, parseMul());
      else if (lx_.eatPunct("++"))
        l = PExpr::mkBin(BinOp::Concat, l, parseMul());
      else if (lx_.eatIdent("xor"))
        l = PExpr::mkBin(BinOp::Xor, l, parseMul());
      else
        return l;
    }
  }
  PExprPtr parseMul() {
    PExprPtr l = parsePostfix();
    while (lx_.eatPunct("*")) l = PExpr::mkBin(BinOp::Mul, l, parsePostfix());
    return l;
  }
  PExprPtr parsePostfix() {
    PExprPtr l = parseAtom();
    while (lx_.isPunct("[") || lx_.isPunct("[]")) {
      if (lx_.eatPunct("[]")) {
        // a[][...] cannot occur; "[]" after an expression is ill-formed here.
        lx_.fail("unexpected '[]' after expression");
      }
      lx_.expectPunct("[");
      PExprPtr idx = parse();
      lx_.expectPunct("]");
      l = PExpr::mkBin(BinOp::Index, l, idx);
    }
    return l;
  }
  PExprPtr parseAtom() {
    if (lx_.peek().kind == Token::Kind::Int)
      return PExpr::mkLit(Value(lx_.next().intVal));
    if (lx_.eatPunct("-")) {
      // Negative literal or unary minus: 0 - e.
      return PExpr::mkBin(BinOp::Sub, PExpr::mkLit(Value(0)), parsePostfix());
    }
    if (lx_.eatIdent("true")) return PExpr::mkLit(Value(true));
    if (lx_.eatIdent("false")) return PExpr::mkLit(Value(false));
    if (lx_.eatPunct("[]")) return PExpr::mkLit(Value(ValueList{}));
    if (lx_.eatPunct("[")) {
      // List literal of constant values only (general expressions would not
      // denote a single value here).
      std::vector<PExprPtr> elems;
      if (!lx_.isPunct("]")) {
        elems.push_back(parse());
        while (lx_.eatPunct(",")) elems.push_back(parse());
      }
      lx_.expectPunct("]");
      ValueList vals;
      for (const auto& e : elems) {
        if (e->kind != PExpr::Kind::Lit)
          lx_.fail("list literals must contain literal values");
        vals.push_back(e->lit);
      }
      return PExpr::mkLit(Value(std::move(vals)));
    }
    if (lx_.eatIdent("len")) {
      lx_.expectPunct("(");
      PExprPtr e = parse();
      lx_.expectPunct(")");
      return PExpr::mkLen(e);
    }
    if (lx_.eatPunct("(")) {
      PExprPtr e = parse();
      lx_.expectPunct(")");
      return e;
    }
    if (lx_.peek().kind == Token::Kind::Ident)
      return PExpr::mkVar(lx_.next().text);
    lx_.fail("expected an expression");
  }

  Lexer& lx_;
};

// ---------------------------------------------------------------------------
// Program parser.
//
//   program ::= ['vars' decl,* ';'] ['lvars' decl,* ';'] command
//   stmt    ::= 'skip' | x ':=' e | 'havoc' x | 'assume' e
//             | 'if' '(' e ')' block ['else' block]
//             | 'while' '(' e ')' block
//             | 'iter' block
//             | block '[]' block
//   command ::= stmt (';' stmt)*

class ProgramParser {
 public:
  explicit ProgramParser(const std::string& src) : lx_(src) {}

  Program parse() {
    Program p;
    if (lx_.eatIdent("vars")) parseDecls(p.pvars);
    if (lx_.eatIdent("lvars")) parseDecls(p.lvars);
    p.body = parseCommand();
    if (!lx_.atEnd()) lx_.fail("trailing input after program body");
    validate(p);
    return p;
  }

 private:
  void parseDecls(std::vector<VarDecl>& out) {
    for (;;) {
      std::string name = lx_.expectIdent("a variable name");
      lx_.expectPunct(":");
      out.push_back({name, parseHint()});
      if (lx_.eatPunct(",")) continue;
      lx_.expectPunct(";");
      return;
    }
  }

  DomainHint parseHint() {
    if (lx_.eatIdent("int")) {
      if (lx_.eatPunct("(")) {
        Int lo = lx_.expectInt();
        lx_.expectPunct("..");
        Int hi = lx_.expectInt();
        lx_.expectPunct(")");
        return DomainHint::intRange(lo, hi);
      }
      return DomainHint::intAny();
    }
    if (lx_.eatIdent("bool")) return DomainHint::boolean();
    if (lx_.eatIdent("list")) {
      if (lx_.eatPunct("(")) {
        DomainHint elem = parseHint();
        lx_.expectPunct(",");
        if (!lx_.eatIdent("maxlen")) lx_.fail("expected 'maxlen'");
        Int n = lx_.expectInt();
        lx_.expectPunct(")");
        return DomainHint::list(std::move(elem), static_cast<long>(n));
      }
      return DomainHint::listAny();
    }
    lx_.fail("expected a domain hint (int, bool, or list)");
  }

  CommandPtr parseCommand() {
    CommandPtr c = parseStmt();
    while (lx_.eatPunct(";")) {
      if (stmtStart()) {
        c = Command::mkSeq(c, parseCommandTail());
        break;
      }
      // trailing semicolon
      break;
    }
    return c;
  }
  CommandPtr parseCommandTail() {
    CommandPtr c = parseStmt();
    if (lx_.eatPunct(";")) {
      if (stmtStart()) return Command::mkSeq(c, parseCommandTail());
    }
    return c;
  }
  bool stmtStart() const {
    const Token& t = lx_.peek();
    if (t.kind == Token::Kind::Ident) return true;
    return t.kind == Token::Kind::Punct && t.text == "{";
  }

  CommandPtr parseStmt() {
    if (lx_.eatIdent("skip")) return Command::mkSkip();
    if (lx_.eatIdent("havoc"))
      return Command::mkHavoc(lx_.expectIdent("a variable name"));
    if (lx_.eatIdent("assume")) {
      PExprParser ep(lx_);
      return Command::mkAssume(ep.parse());
    }
    if (lx_.eatIdent("if")) {
      lx_.expectPunct("(");
      PExprParser ep(lx_);
      PExprPtr guard = ep.parse();
      lx_.expectPunct(")");
      CommandPtr thenC = parseBlock();
      CommandPtr elseC = Command::mkSkip();
      if (lx_.eatIdent("else")) elseC = parseBlock();
      return Command::mkIf(guard, thenC, elseC);
    }
    if (lx_.eatIdent("while")) {
      lx_.expectPunct("(");
      PExprParser ep(lx_);
      PExprPtr guard = ep.parse();
      lx_.expectPunct(")");
      return Command::mkWhile(guard, parseBlock());
    }
    if (lx_.eatIdent("iter")) return Command::mkIter(parseBlock());
    if (lx_.isPunct("{")) {
      // either a choice { a } [] { b } or a grouping block { a; b }
      CommandPtr a = parseBlock();
      if (lx_.eatPunct("[]")) return Command::mkChoice(a, parseBlock());
      return a;
    }
    // assignment
    std::string name = lx_.expectIdent("a statement");
    lx_.expectPunct(":=");
    PExprParser ep(lx_);
    return Command::mkAssign(name, ep.parse());
  }

  CommandPtr parseBlock() {
    lx_.expectPunct("{");
    CommandPtr c = parseCommand();
    lx_.expectPunct("}");
    return c;
  }

  void validate(const Program& p) {
    std::set<std::string> names;
    for (const auto& d : p.pvars)
      if (!names.insert(d.name).second)
        throw ParseError("duplicate declaration of '" + d.name + "'", 1, 1);
    for (const auto& d : p.lvars)
      if (!names.insert(d.name).second)
        throw ParseError("duplicate declaration of '" + d.name + "'", 1, 1);
    checkCommand(p, p.body);
  }
  void checkCommand(const Program& p, const CommandPtr& c) {
    if (!c) return;
    if (c->kind == Command::Kind::Assign || c->kind == Command::Kind::Havoc) {
      if (!p.isPVar(c->var))
        throw ParseError("undeclared program variable '" + c->var + "'", 1, 1);
    }
    if (c->expr) {
      std::set<std::string> used;
      pexprVars(c->expr, used);
      for (const auto& v : used)
        if (!p.isPVar(v))
          throw ParseError("undeclared program variable '" + v + "'", 1, 1);
    }
    checkCommand(p, c->c1);
    checkCommand(p, c->c2);
  }

  Lexer lx_;
};

inline Program parseProgram(const std::string& src) {
  return ProgramParser(src).parse();
}

// ---------------------------------------------------------------------------
// Pretty printer; parse(print(ast)) == ast.

inline int pexprPrec(const PExprPtr& e) {
  switch (e->kind) {
    case PExpr::Kind::Lit:
    case PExpr::Kind::Var:
    case PExpr::Kind::Len: return 100;
    case PExpr::Kind::Bin:
      return e->bop == BinOp::Index ? 90 : e->bop == BinOp::Mul ? 60 : 50;
    case PExpr::Kind::Cmp: return 40;
    case PExpr::Kind::Bool:
      switch (e->lop) {
        case BoolOp::Not: return 45;
        case BoolOp::And: return 30;
        case BoolOp::Or: return 20;
        case BoolOp::Implies: return 10;
      }
  }
  return 0;
}

inline std::string printPExpr(const PExprPtr& e);

inline std::string printChild(const PExprPtr& parent, const PExprPtr& child,
                              bool tightened) {
  std::string s = printPExpr(child);
  int pp = pexprPrec(parent), cp = pexprPrec(child);
  if (cp < pp || (tightened && cp == pp)) return "(" + s + ")";
  return s;
}

inline std::string printPExpr(const PExprPtr& e) {
  switch (e->kind) {
    case PExpr::Kind::Lit: return e->lit.show();
    case PExpr::Kind::Var: return e->var;
    case PExpr::Kind::Len: return "len(" + printPExpr(e->a) + ")";
    case PExpr::Kind::Bin: {
      if (e->bop == BinOp::Index)
        return printChild(e, e->a, false) + "[" + printPExpr(e->b) + "]";
      const char* op = e->bop == BinOp::Add      ? " + "
                       : e->bop == BinOp::Sub    ? " - "
                       : e->bop == BinOp::Mul    ? " * "
                       : e->bop == BinOp::Concat ? " ++ "
                                                 : " xor ";
      return printChild(e, e->a, false) + op + printChild(e, e->b, true);
    }
    case PExpr::Kind::Cmp: {
      const char* op = e->cop == CmpOp::Eq   ? " = "
                       : e->cop == CmpOp::Ne ? " != "
                       : e->cop == CmpOp::Lt ? " < "
                       : e->cop == CmpOp::Le ? " <= "
                       : e->cop == CmpOp::Gt ? " > "
                                             : " >= ";
      return printChild(e, e->a, true) + op + printChild(e, e->b, true);
    }
    case PExpr::Kind::Bool: {
      if (e->lop == BoolOp::Not) return "!" + printChild(e, e->a, true);
      const char* op = e->lop == BoolOp::And  ? " && "
                       : e->lop == BoolOp::Or ? " || "
                                              : " => ";
      bool rightAssoc = e->lop == BoolOp::Implies;
      return printChild(e, e->a, rightAssoc) + op +
             printChild(e, e->b, !rightAssoc);
    }
  }
  return "?";
}

inline std::string printCommand(const CommandPtr& c, int indent = 0) {
  std::string pad(indent, ' ');
  switch (c->kind) {
    case Command::Kind::Skip: return pad + "skip";
    case Command::Kind::Assign:
      return pad + c->var + " := " + printPExpr(c->expr);
    case Command::Kind::Havoc: return pad + "havoc " + c->var;
    case Command::Kind::Assume: return pad + "assume " + printPExpr(c->expr);
    case Command::Kind::Seq: {
      // a left-nested sequence needs an explicit grouping block to round-trip
      std::string left =
          c->c1->kind == Command::Kind::Seq
              ? pad + "{\n" + printCommand(c->c1, indent + 2) + "\n" + pad + "}"
              : printCommand(c->c1, indent);
      return left + ";\n" + printCommand(c->c2, indent);
    }
    case Command::Kind::Choice:
      return pad + "{\n" + printCommand(c->c1, indent + 2) + "\n" + pad +
             "} [] {\n" + printCommand(c->c2, indent + 2) + "\n" + pad + "}";
    case Command::Kind::Iter:
      return pad + "iter {\n" + printCommand(c->c1, indent + 2) + "\n" + pad +
             "}";
    case Command::Kind::If:
      return pad + "if (" + printPExpr(c->expr) + ") {\n" +
             printCommand(c->c1, indent + 2) + "\n" + pad + "} else {\n" +
             printCommand(c->c2, indent + 2) + "\n" + pad + "}";
    case Command::Kind::While:
      return pad + "while (" + printPExpr(c->expr) + ") {\n" +
             printCommand(c->c1, indent + 2) + "\n" + pad + "}";
  }
  return "?";
}

inline std::string printHint(const DomainHint& h) {
  switch (h.kind) {
    case DomainHint::Kind::None:
    case DomainHint::Kind::IntAny: return "int";
    case DomainHint::Kind::ListAny: return "list";
    case DomainHint::Kind::IntRange:
      return "int(" + h.lo.str() + ".." + h.hi.str() + ")";
    case DomainHint::Kind::Bool: return "bool";
    case DomainHint::Kind::List:
      return "list(" + printHint(*h.elem) + ", maxlen " +
             std::to_string(h.maxLen) + ")";
  }
  return "?";
}

inline std::string printProgram(const Program& p) {
  std::string out;
  auto decls = [&](const char* kw, const std::vector<VarDecl>& ds) {
    if (ds.empty()) return;
    out += kw;
    out += " ";
    for (size_t i = 0; i < ds.size(); i++) {
      if (i) out += ", ";
      out += ds[i].name + ": " + printHint(ds[i].hint);
    }
    out += ";\n";
  };
  decls("vars", p.pvars);
  decls("lvars", p.lvars);
  out += printCommand(p.body);
  out += "\n";
  return out;
}

}  // namespace hhl
