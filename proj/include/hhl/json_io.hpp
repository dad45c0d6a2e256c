// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "hhl/oracle.hpp"
#include "hhl/prover.hpp"
#include "hhl/state.hpp"

namespace hhl {

using json = nlohmann::json;

// Canonical value encoding: integers as decimal strings (they are arbitrary
// precision), booleans natively, lists as arrays.
inline json valueToJson(const Value& v) {
  if (v.isInt()) return v.asInt().str();
  if (v.isBool()) return v.asBool();
  json arr = json::array();
  for (const auto& x : v.asList()) arr.push_back(valueToJson(x));
  return arr;
}

inline Value valueFromJson(const json& j) {
  if (j.is_string()) return Value(Int(j.get<std::string>()));
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(Int(j.get<long long>()));
  if (j.is_array()) {
    ValueList xs;
    for (const auto& e : j) xs.push_back(valueFromJson(e));
    return Value(std::move(xs));
  }
  throw EvalError("malformed value in JSON: " + j.dump());
}

inline json extStateToJson(const ExtState& s, const Layout& ly) {
  json logical = json::object();
  json program = json::object();
  for (size_t i = 0; i < ly.lvars.size(); i++)
    logical[ly.lvars[i]] = valueToJson(s.log[i]);
  for (size_t i = 0; i < ly.pvars.size(); i++)
    program[ly.pvars[i]] = valueToJson(s.prog.vals[i]);
  return json{{"logical", logical}, {"program", program}};
}

inline ExtState extStateFromJson(const json& j, const Layout& ly) {
  ExtState s;
  s.log.resize(ly.lvars.size(), Value(0));
  s.prog.vals.resize(ly.pvars.size(), Value(0));
  if (j.contains("logical"))
    for (auto it = j["logical"].begin(); it != j["logical"].end(); ++it)
      s.log[ly.lvar(it.key())] = valueFromJson(it.value());
  if (j.contains("program"))
    for (auto it = j["program"].begin(); it != j["program"].end(); ++it)
      s.prog.vals[ly.pvar(it.key())] = valueFromJson(it.value());
  return s;
}

inline json stateSetToJson(const StateSet& s, const Layout& ly) {
  json arr = json::array();
  for (size_t i = 0; i < s.size(); i++)
    arr.push_back(extStateToJson(s[i], ly));
  return arr;
}

inline StateSet stateSetFromJson(const json& j, const Layout& ly) {
  StateSet s;
  for (const auto& e : j) s.insert(extStateFromJson(e, ly));
  return s;
}

inline json universeToJson(const Universe& u) {
  json dom = json::object();
  for (const auto& [name, vals] : u.domain) {
    json arr = json::array();
    for (const auto& v : vals) arr.push_back(valueToJson(v));
    dom[name] = arr;
  }
  json out{{"domains", dom},
           {"maxIter", u.maxIter},
           {"maxCard", u.maxCard},
           {"budget", u.budget},
           {"mode", u.mode == Universe::Mode::Exhaustive ? "exhaustive"
                                                         : "sampled"}};
  if (u.mode == Universe::Mode::Sampled) {
    out["samples"] = u.samples;
    out["seed"] = u.seed;
  }
  return out;
}

inline json verdictToJson(const Verdict& v, const Universe& u) {
  json out;
  out["status"] = v.status == Verdict::Status::HoldsAtBound ? "holds_at_bound"
                  : v.status == Verdict::Status::Refuted    ? "refuted"
                                                            : "unknown";
  out["universe"] = universeToJson(u);
  out["bounded"] = v.bounded;
  out["examined"] = v.examined;
  if (!v.reason.empty()) out["reason"] = v.reason;
  if (v.witness) out["witness"] = stateSetToJson(*v.witness, *u.layout);
  if (v.semResult) out["semResult"] = stateSetToJson(*v.semResult, *u.layout);
  return out;
}

inline json reportToJson(const Report& rep, const Universe& u) {
  json nodes = json::array();
  for (const auto& n : rep.nodes) {
    json nn{{"id", n.id}, {"rule", n.rule}};
    if (!n.error.empty()) nn["error"] = n.error;
    if (!n.pre.empty()) nn["pre"] = n.pre;
    if (!n.post.empty()) nn["post"] = n.post;
    nn["children"] = n.children;
    nodes.push_back(nn);
  }
  json obls = json::array();
  for (const auto& o : rep.obligations) {
    json oo{{"node", o.node},
            {"kind", o.kind == Obligation::Kind::Entailment ? "entailment"
                     : o.kind == Obligation::Kind::SideCondition
                         ? "side-condition"
                         : "semantic-premise"},
            {"status", o.status == Obligation::Status::CheckedSyntactic
                           ? "checked-syntactic"
                       : o.status == Obligation::Status::CheckedBounded
                           ? "checked-bounded"
                       : o.status == Obligation::Status::Admitted ? "admitted"
                                                                  : "failed"},
            {"description", o.description}};
    if (!o.detail.empty()) oo["detail"] = o.detail;
    obls.push_back(oo);
  }
  return json{{"grade", Report::gradeName(rep.grade)},
              {"accepted", rep.accepted},
              {"universe", universeToJson(u)},
              {"nodes", nodes},
              {"obligations", obls}};
}

}  // namespace hhl
