// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hhl/ast.hpp"
#include "hhl/value.hpp"

namespace hhl {

// Fixed variable layout of a program: states are value vectors indexed by
// declaration order, which keeps state comparison cheap and iteration
// deterministic.
struct Layout {
  std::vector<std::string> pvars;
  std::vector<std::string> lvars;
  std::map<std::string, int> pidx;
  std::map<std::string, int> lidx;

  static std::shared_ptr<const Layout> of(const Program& p) {
    auto l = std::make_shared<Layout>();
    for (const auto& d : p.pvars) {
      l->pidx[d.name] = static_cast<int>(l->pvars.size());
      l->pvars.push_back(d.name);
    }
    for (const auto& d : p.lvars) {
      l->lidx[d.name] = static_cast<int>(l->lvars.size());
      l->lvars.push_back(d.name);
    }
    return l;
  }

  int pvar(const std::string& n) const {
    auto it = pidx.find(n);
    if (it == pidx.end()) throw EvalError("unknown program variable '" + n + "'");
    return it->second;
  }
  int lvar(const std::string& n) const {
    auto it = lidx.find(n);
    if (it == lidx.end()) throw EvalError("unknown logical variable '" + n + "'");
    return it->second;
  }
};
using LayoutPtr = std::shared_ptr<const Layout>;

inline int cmpValueVec(const std::vector<Value>& a, const std::vector<Value>& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); i++) {
    int c = Value::canonicalCmp(a[i], b[i]);
    if (c) return c;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

// Total map pvar -> Value, represented positionally.
struct PState {
  std::vector<Value> vals;

  friend bool operator==(const PState& a, const PState& b) {
    return a.vals == b.vals;
  }
  friend bool operator<(const PState& a, const PState& b) {
    return cmpValueVec(a.vals, b.vals) < 0;
  }
};

// Extended state: logical valuation plus program state. Execution never
// touches the logical part.
struct ExtState {
  std::vector<Value> log;
  PState prog;

  friend bool operator==(const ExtState& a, const ExtState& b) {
    return a.log == b.log && a.prog == b.prog;
  }
  friend bool operator!=(const ExtState& a, const ExtState& b) {
    return !(a == b);
  }
  friend bool operator<(const ExtState& a, const ExtState& b) {
    int c = cmpValueVec(a.log, b.log);
    if (c) return c < 0;
    return a.prog < b.prog;
  }
};

// Duplicate-free set of extended states in canonical order. Indexable so the
// set-splitting decision procedures can work on bitmasks.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::vector<ExtState> states) : states_(std::move(states)) {
    std::sort(states_.begin(), states_.end());
    states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
  }

  void insert(ExtState s) {
    auto it = std::lower_bound(states_.begin(), states_.end(), s);
    if (it == states_.end() || !(*it == s)) states_.insert(it, std::move(s));
  }
  bool contains(const ExtState& s) const {
    return std::binary_search(states_.begin(), states_.end(), s);
  }
  size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const ExtState& operator[](size_t i) const { return states_[i]; }
  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }

  StateSet unionWith(const StateSet& o) const {
    StateSet out = *this;
    for (const auto& s : o.states_) out.insert(s);
    return out;
  }
  bool subsetOf(const StateSet& o) const {
    for (const auto& s : states_)
      if (!o.contains(s)) return false;
    return true;
  }
  StateSet subsetByMask(uint32_t mask) const {
    StateSet out;
    for (size_t i = 0; i < states_.size(); i++)
      if (mask & (1u << i)) out.insert(states_[i]);
    return out;
  }

  friend bool operator==(const StateSet& a, const StateSet& b) {
    return a.states_ == b.states_;
  }
  friend bool operator<(const StateSet& a, const StateSet& b) {
    return std::lexicographical_compare(a.states_.begin(), a.states_.end(),
                                        b.states_.begin(), b.states_.end());
  }

 private:
  std::vector<ExtState> states_;
};

inline std::string showPState(const PState& s, const Layout& ly) {
  std::string out = "{";
  for (size_t i = 0; i < ly.pvars.size(); i++) {
    if (i) out += ", ";
    out += ly.pvars[i] + ": " + s.vals[i].show();
  }
  return out + "}";
}

inline std::string showExtState(const ExtState& s, const Layout& ly) {
  std::string out = "{";
  bool first = true;
  for (size_t i = 0; i < ly.pvars.size(); i++) {
    if (!first) out += ", ";
    first = false;
    out += ly.pvars[i] + ": " + s.prog.vals[i].show();
  }
  for (size_t i = 0; i < ly.lvars.size(); i++) {
    if (!first) out += ", ";
    first = false;
    out += "L " + ly.lvars[i] + ": " + s.log[i].show();
  }
  return out + "}";
}

inline std::string showStateSet(const StateSet& s, const Layout& ly) {
  std::string out = "{ ";
  for (size_t i = 0; i < s.size(); i++) {
    if (i) out += ", ";
    out += showExtState(s[i], ly);
  }
  return out + " }";
}

}  // namespace hhl
