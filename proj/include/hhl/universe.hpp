// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hhl/ast.hpp"
#include "hhl/semantics.hpp"
#include "hhl/state.hpp"

namespace hhl {

struct UniverseError : std::runtime_error {
  explicit UniverseError(const std::string& m) : std::runtime_error(m) {}
};

// Finite domains and bounds that finitize every semantic check: per-variable
// value domains (from declaration hints or overrides), the loop-unrolling
// bound, the maximum cardinality of candidate initial sets, and the search
// budget. Every bounded verdict cites the universe it was decided in.
struct Universe {
  LayoutPtr layout;
  std::map<std::string, std::vector<Value>> domain;  // pvars and lvars
  int maxIter = 3;
  int maxCard = 2;
  enum class Mode { Exhaustive, Sampled } mode = Mode::Exhaustive;
  long long budget = 10'000'000;
  long long samples = 10'000;
  uint64_t seed = 0;
  int jobs = 1;

  static Universe fromProgram(const Program& p) {
    Universe u;
    u.layout = Layout::of(p);
    auto addDecl = [&](const VarDecl& d) {
      if (d.hint.finite()) u.domain[d.name] = d.hint.enumerate();
    };
    for (const auto& d : p.pvars) addDecl(d);
    for (const auto& d : p.lvars) addDecl(d);
    return u;
  }

  void overrideDomain(const std::string& var, std::vector<Value> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    domain[var] = std::move(values);
  }

  bool hasDomain(const std::string& var) const { return domain.count(var) > 0; }

  const std::vector<Value>& varDomain(const std::string& var) const {
    auto it = domain.find(var);
    if (it == domain.end())
      throw UniverseError("variable '" + var +
                          "' has no finite domain; declare one (e.g. " + var +
                          ": int(0..3)) or pass --domain " + var + "=lo..hi");
    return it->second;
  }

  // Union of all per-variable domains; the range of unannotated value
  // quantifiers.
  std::vector<Value> defaultValueDomain() const {
    std::vector<Value> out;
    for (const auto& [_, vs] : domain)
      out.insert(out.end(), vs.begin(), vs.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty())
      throw UniverseError("no finite domains declared; value quantifiers "
                          "have nothing to range over");
    return out;
  }

  Fuel fuel() const {
    Fuel f;
    f.maxIter = maxIter;
    f.havocDomain = domain;
    return f;
  }

  // All extended states over the declared domains, in canonical order.
  std::vector<ExtState> grid() const {
    std::vector<std::vector<Value>> logDoms, progDoms;
    for (const auto& v : layout->lvars) logDoms.push_back(varDomain(v));
    for (const auto& v : layout->pvars) progDoms.push_back(varDomain(v));

    long long count = 1;
    for (const auto& d : logDoms) {
      count *= static_cast<long long>(d.size());
      if (count > budget) throw UniverseError("state grid exceeds budget");
    }
    for (const auto& d : progDoms) {
      count *= static_cast<long long>(d.size());
      if (count > budget) throw UniverseError("state grid exceeds budget");
    }

    std::vector<ExtState> out;
    ExtState cur;
    cur.log.resize(logDoms.size());
    cur.prog.vals.resize(progDoms.size());
    buildGrid(logDoms, progDoms, 0, cur, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Number of candidate sets of cardinality <= maxCard over a grid of n
  // states (including the empty set); clamped to avoid overflow.
  long long candidateCount(size_t n) const {
    long long total = 0;
    long long binom = 1;
    for (int k = 0; k <= maxCard; k++) {
      total += binom;
      if (total > budget) return budget + 1;
      binom = binom * static_cast<long long>(n - k) / (k + 1);
      if (static_cast<size_t>(k) >= n) break;
    }
    return total;
  }

 private:
  void buildGrid(const std::vector<std::vector<Value>>& logDoms,
                 const std::vector<std::vector<Value>>& progDoms, size_t pos,
                 ExtState& cur, std::vector<ExtState>& out) const {
    size_t nl = logDoms.size();
    if (pos == nl + progDoms.size()) {
      out.push_back(cur);
      return;
    }
    const auto& dom = pos < nl ? logDoms[pos] : progDoms[pos - nl];
    for (const auto& v : dom) {
      if (pos < nl)
        cur.log[pos] = v;
      else
        cur.prog.vals[pos - nl] = v;
      buildGrid(logDoms, progDoms, pos + 1, cur, out);
    }
  }
};

// Enumerates candidate state sets over a grid in canonical order: by
// increasing cardinality, then lexicographically by state indices. The
// "first" counterexample of a search is therefore stable across runs.
class CandidateSets {
 public:
  CandidateSets(const std::vector<ExtState>& grid, int maxCard)
      : grid_(grid), maxCard_(maxCard) {}

  // Calls f(S) until it returns false ("stop") or the space is exhausted.
  // Returns true if the enumeration ran to completion.
  template <typename F>
  bool forEach(F&& f) const {
    StateSet empty;
    if (!f(empty)) return false;
    std::vector<size_t> idx;
    for (int card = 1; card <= maxCard_ && card <= (int)grid_.size(); card++) {
      idx.assign(card, 0);
      for (int i = 0; i < card; i++) idx[i] = i;
      for (;;) {
        std::vector<ExtState> states;
        states.reserve(card);
        for (size_t i : idx) states.push_back(grid_[i]);
        if (!f(StateSet(std::move(states)))) return false;
        // next combination
        int i = card - 1;
        while (i >= 0 && idx[i] == grid_.size() - (card - i)) i--;
        if (i < 0) break;
        idx[i]++;
        for (int j = i + 1; j < card; j++) idx[j] = idx[j - 1] + 1;
      }
    }
    return true;
  }

 private:
  const std::vector<ExtState>& grid_;
  int maxCard_;
};

}  // namespace hhl
