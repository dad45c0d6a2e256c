// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hhl/parser.hpp"

namespace hhl {

// Proof scripts are s-expressions, one form per proof node:
//
//   (<rule> :pre {assertion} :post {assertion} [:<param> <value>]... [:admit]
//           <child>...)
//
// Values are brace-delimited raw text (assertions, expressions), bare atoms,
// or parenthesized lists of values. Comments run from // to end of line.
struct ScriptError : std::runtime_error {
  int line, col;
  ScriptError(const std::string& msg, int line, int col)
      : std::runtime_error("proof script error at " + std::to_string(line) +
                           ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
};

struct ScriptVal {
  bool isList = false;
  std::string atom;             // raw text for atoms and braced values
  std::vector<ScriptVal> items; // for lists
};

struct ScriptNode;
using ScriptPtr = std::shared_ptr<ScriptNode>;

struct ScriptNode {
  std::string rule;
  int line = 0, col = 0;
  std::map<std::string, ScriptVal> params;
  bool admit = false;
  std::vector<ScriptPtr> children;

  bool has(const std::string& key) const { return params.count(key) > 0; }
  const std::string& text(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end() || it->second.isList)
      throw ScriptError("missing parameter :" + key + " on rule '" + rule + "'",
                        line, col);
    return it->second.atom;
  }
};

class ProofScriptParser {
 public:
  explicit ProofScriptParser(const std::string& src) : src_(src) {}

  ScriptPtr parse() {
    skipWs();
    ScriptPtr root = parseNode();
    skipWs();
    if (pos_ < src_.size()) fail("trailing input after proof");
    return root;
  }

 private:
  ScriptPtr parseNode() {
    expect('(');
    auto node = std::make_shared<ScriptNode>();
    node->line = line_;
    node->col = col_;
    node->rule = parseAtomText();
    if (node->rule.empty()) fail("expected a rule name");
    for (;;) {
      skipWs();
      if (pos_ >= src_.size()) fail("unterminated proof node");
      char c = src_[pos_];
      if (c == ')') {
        bump();
        return node;
      }
      if (c == ':') {
        bump();
        std::string key = parseAtomText();
        if (key == "admit") {
          node->admit = true;
          continue;
        }
        skipWs();
        node->params[key] = parseValue();
        continue;
      }
      if (c == '(') {
        node->children.push_back(parseNode());
        continue;
      }
      fail("expected ':param', a child node, or ')'");
    }
  }

  ScriptVal parseValue() {
    skipWs();
    if (pos_ >= src_.size()) fail("expected a value");
    char c = src_[pos_];
    ScriptVal v;
    if (c == '{') {
      int depth = 0;
      bump();
      std::string out;
      for (;;) {
        if (pos_ >= src_.size()) fail("unterminated { value");
        char d = src_[pos_];
        if (d == '{') depth++;
        if (d == '}') {
          if (depth == 0) {
            bump();
            break;
          }
          depth--;
        }
        out += d;
        bump();
      }
      v.atom = trim(out);
      return v;
    }
    if (c == '(') {
      bump();
      v.isList = true;
      for (;;) {
        skipWs();
        if (pos_ >= src_.size()) fail("unterminated list value");
        if (src_[pos_] == ')') {
          bump();
          return v;
        }
        v.items.push_back(parseValue());
      }
    }
    v.atom = parseAtomText();
    if (v.atom.empty()) fail("expected a value");
    return v;
  }

  std::string parseAtomText() {
    skipWs();
    std::string out;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' ||
          c == ')' || c == '{' || c == '}' || c == ':')
        break;
      out += c;
      bump();
    }
    return out;
  }

  static std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
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
  void expect(char c) {
    skipWs();
    if (pos_ >= src_.size() || src_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    bump();
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
  [[noreturn]] void fail(const std::string& msg) {
    throw ScriptError(msg, line_, col_);
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

inline ScriptPtr parseProofScript(const std::string& src) {
  return ProofScriptParser(src).parse();
}

}  // namespace hhl
