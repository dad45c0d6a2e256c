// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hhl {

using Int = boost::multiprecision::cpp_int;

// Raised when expression evaluation hits an ill-typed operation, an index
// out of range, or xor on a negative operand. Evaluation never silently
// defaults: a program whose reachable states trigger this is rejected.
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

class Value;
using ValueList = std::vector<Value>;

// A runtime value: arbitrary-precision integer, boolean, or a finite list
// (lists may nest).
class Value {
 public:
  Value() : rep_(Int(0)) {}
  Value(Int v) : rep_(std::move(v)) {}
  Value(long v) : rep_(Int(v)) {}
  Value(int v) : rep_(Int(v)) {}
  Value(bool v) : rep_(v) {}
  Value(ValueList v) : rep_(std::move(v)) {}

  bool isInt() const { return std::holds_alternative<Int>(rep_); }
  bool isBool() const { return std::holds_alternative<bool>(rep_); }
  bool isList() const { return std::holds_alternative<ValueList>(rep_); }

  const Int& asInt() const {
    if (!isInt()) throw EvalError("expected an integer, got " + show());
    return std::get<Int>(rep_);
  }
  bool asBool() const {
    if (!isBool()) throw EvalError("expected a boolean, got " + show());
    return std::get<bool>(rep_);
  }
  const ValueList& asList() const {
    if (!isList()) throw EvalError("expected a list, got " + show());
    return std::get<ValueList>(rep_);
  }

  // Structural equality, defined across all kinds (values of different
  // kinds are unequal, never an error).
  friend bool operator==(const Value& a, const Value& b) {
    return a.rep_ == b.rep_;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

  std::string show() const {
    if (isInt()) return asInt().str();
    if (isBool()) return asBool() ? "true" : "false";
    std::string s = "[";
    const auto& xs = asList();
    for (size_t i = 0; i < xs.size(); i++) {
      if (i) s += ", ";
      s += xs[i].show();
    }
    return s + "]";
  }

  // Total order used only for canonical bookkeeping (state sets, report
  // determinism); not part of the object-language semantics.
  static int canonicalCmp(const Value& a, const Value& b) {
    int ka = a.kindRank(), kb = b.kindRank();
    if (ka != kb) return ka < kb ? -1 : 1;
    if (a.isInt()) {
      if (a.asInt() == b.asInt()) return 0;
      return a.asInt() < b.asInt() ? -1 : 1;
    }
    if (a.isBool()) {
      if (a.asBool() == b.asBool()) return 0;
      return !a.asBool() ? -1 : 1;
    }
    const auto& xs = a.asList();
    const auto& ys = b.asList();
    for (size_t i = 0; i < xs.size() && i < ys.size(); i++) {
      int c = canonicalCmp(xs[i], ys[i]);
      if (c != 0) return c;
    }
    if (xs.size() == ys.size()) return 0;
    return xs.size() < ys.size() ? -1 : 1;
  }
  friend bool operator<(const Value& a, const Value& b) {
    return canonicalCmp(a, b) < 0;
  }

 private:
  int kindRank() const { return isInt() ? 0 : isBool() ? 1 : 2; }
  std::variant<Int, bool, ValueList> rep_;
};

// Object-language comparison: <, <=, >, >= are defined only between two
// ints or two bools (false < true); anything else is a dynamic type error.
inline bool valueLess(const Value& a, const Value& b) {
  if (a.isInt() && b.isInt()) return a.asInt() < b.asInt();
  if (a.isBool() && b.isBool()) return !a.asBool() && b.asBool();
  throw EvalError("ordered comparison between " + a.show() + " and " +
                  b.show());
}
inline bool valueLeq(const Value& a, const Value& b) {
  if (a.isInt() && b.isInt()) return a.asInt() <= b.asInt();
  if (a.isBool() && b.isBool()) return !a.asBool() || b.asBool();
  throw EvalError("ordered comparison between " + a.show() + " and " +
                  b.show());
}

inline Value valueAdd(const Value& a, const Value& b) {
  return Value(a.asInt() + b.asInt());
}
inline Value valueSub(const Value& a, const Value& b) {
  return Value(a.asInt() - b.asInt());
}
inline Value valueMul(const Value& a, const Value& b) {
  return Value(a.asInt() * b.asInt());
}

// Bitwise xor on non-negative integers; a negative operand is a dynamic
// error (the binary representation of a negative cpp_int is unbounded).
inline Value valueXor(const Value& a, const Value& b) {
  const Int& x = a.asInt();
  const Int& y = b.asInt();
  if (x < 0 || y < 0)
    throw EvalError("xor on negative operand: " + a.show() + " xor " +
                    b.show());
  return Value(Int(x ^ y));
}

inline Value valueConcat(const Value& a, const Value& b) {
  ValueList out = a.asList();
  const auto& ys = b.asList();
  out.insert(out.end(), ys.begin(), ys.end());
  return Value(std::move(out));
}

inline Value valueIndex(const Value& a, const Value& i) {
  const auto& xs = a.asList();
  const Int& k = i.asInt();
  if (k < 0 || k >= Int(xs.size()))
    throw EvalError("index " + k.str() + " out of range for list of length " +
                    std::to_string(xs.size()));
  return xs[static_cast<size_t>(k)];
}

inline Value valueLen(const Value& a) {
  return Value(Int(a.asList().size()));
}

}  // namespace hhl
