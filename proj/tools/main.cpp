// SPDX-License-Identifier: Apache-2.0
//
// hhl: check proof outlines, verify or refute triples over bounded
// universes, translate judgments of other Hoare-style logics, and dump the
// reachable-set semantics of programs.
//
// Exit codes: 0 accepted/holds, 1 refuted/failed, 2 unknown or out of
// budget, 3 usage or parse errors.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hhl/json_io.hpp"
#include "hhl/logics.hpp"
#include "hhl/prover.hpp"

using namespace hhl;

namespace {

struct UniverseFlags {
  std::vector<std::string> domains;
  int maxIter = 3;
  int maxCard = 2;
  long long budget = 10'000'000;
  std::string mode = "exhaustive";
  long long samples = 10'000;
  uint64_t seed = 0;
  int jobs = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--domain", domains,
                    "override a variable domain, e.g. x=-2..11 or x={1,2}");
    cmd->add_option("--max-iter", maxIter, "loop unrolling bound");
    cmd->add_option("--max-card", maxCard,
                    "maximum cardinality of candidate initial sets");
    cmd->add_option("--budget", budget, "candidate-set budget");
    cmd->add_option("--mode", mode, "exhaustive or sampled");
    cmd->add_option("--samples", samples, "sample count in sampled mode");
    cmd->add_option("--seed", seed, "sampling seed");
    cmd->add_option("--jobs", jobs, "parallel scan workers");
  }

  Universe build(const Program& prog) const {
    Universe u = Universe::fromProgram(prog);
    u.maxIter = maxIter;
    u.maxCard = maxCard;
    u.budget = budget;
    u.samples = samples;
    u.seed = seed;
    u.jobs = jobs;
    u.mode = mode == "sampled" ? Universe::Mode::Sampled
                               : Universe::Mode::Exhaustive;
    for (const auto& d : domains) {
      size_t eq = d.find('=');
      if (eq == std::string::npos)
        throw UniverseError("bad --domain (want name=lo..hi): " + d);
      std::string name = d.substr(0, eq);
      std::string spec = d.substr(eq + 1);
      std::vector<Value> vals;
      if (!spec.empty() && spec[0] == '{') {
        Lexer lx(spec);
        lx.expectPunct("{");
        for (;;) {
          vals.emplace_back(lx.expectInt());
          if (!lx.eatPunct(",")) break;
        }
        lx.expectPunct("}");
      } else {
        Lexer lx(spec);
        Int lo = lx.expectInt();
        lx.expectPunct("..");
        Int hi = lx.expectInt();
        for (Int v = lo; v <= hi; ++v) vals.emplace_back(v);
      }
      u.overrideDomain(name, vals);
    }
    return u;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program loadProgram(const std::string& path) {
  return parseProgram(slurp(path));
}

void printVerdictHuman(const Verdict& v, const Universe& u) {
  switch (v.status) {
    case Verdict::Status::HoldsAtBound:
      std::cout << "holds at bound"
                << (v.bounded ? " (loop unrolling truncated)" : "")
                << "; candidate sets examined: " << v.examined << "\n";
      break;
    case Verdict::Status::Refuted:
      std::cout << "refuted" << (v.bounded ? " (at iteration bound)" : "")
                << "\n";
      std::cout << "witness set: " << showStateSet(*v.witness, *u.layout)
                << "\n";
      if (v.semResult)
        std::cout << "reachable set: "
                  << showStateSet(*v.semResult, *u.layout) << "\n";
      break;
    case Verdict::Status::Unknown:
      std::cout << "unknown: " << v.reason << "\n";
      break;
  }
}

int verdictExit(const Verdict& v) {
  switch (v.status) {
    case Verdict::Status::HoldsAtBound: return 0;
    case Verdict::Status::Refuted: return 1;
    case Verdict::Status::Unknown: return 2;
  }
  return 2;
}

long long msSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proof checker and bounded semantic oracle for hyper-triples"};
  app.require_subcommand(1);

  struct TripleArgs {
    std::string progPath, pre, post;
    bool jsonOut = false, timing = false;
    UniverseFlags uf;
  };
  auto addTriple = [&](CLI::App* cmd, TripleArgs& ta) {
    cmd->add_option("program", ta.progPath, "program file")->required();
    cmd->add_option("--pre", ta.pre, "precondition")->required();
    cmd->add_option("--post", ta.post, "postcondition")->required();
    cmd->add_flag("--json", ta.jsonOut, "machine-readable output");
    cmd->add_flag("--timing", ta.timing, "include elapsed time in output");
    ta.uf.attach(cmd);
  };

  TripleArgs verifyArgs, totalArgs, disproveArgs;
  CLI::App* verify = app.add_subcommand("verify", "check a hyper-triple");
  addTriple(verify, verifyArgs);
  CLI::App* total = app.add_subcommand("total", "check a total hyper-triple");
  addTriple(total, totalArgs);
  CLI::App* disprove = app.add_subcommand(
      "disprove", "find a witness set and a strengthened precondition");
  addTriple(disprove, disproveArgs);

  std::string checkProg, checkProofPath;
  bool checkJson = false, admitOk = false;
  UniverseFlags checkUf;
  CLI::App* check = app.add_subcommand("check", "check a proof outline");
  check->add_option("program", checkProg, "program file")->required();
  check->add_option("--proof", checkProofPath, "proof script")->required();
  check->add_flag("--json", checkJson, "machine-readable output");
  check->add_flag("--admit-ok", admitOk,
                  "accept admitted obligations without comment");
  checkUf.attach(check);

  std::string semProg, semStates;
  UniverseFlags semUf;
  CLI::App* sem = app.add_subcommand(
      "sem", "dump the reachable extended states of a program");
  sem->add_option("program", semProg, "program file")->required();
  sem->add_option("--states", semStates, "initial state set (JSON)")
      ->required();
  semUf.attach(sem);

  std::string trLogic, trProg, trProg2, trPre, trPost, trPreStates,
      trPostStates, trTag = "t", trTag2 = "u";
  int trK = 1, trK2 = 1;
  bool trVerify = false, trJson = false;
  UniverseFlags trUf;
  CLI::App* translate = app.add_subcommand(
      "translate", "encode a judgment of another logic as a hyper-triple");
  translate
      ->add_option("--logic", trLogic, "hl|il|fu|kfu|chl|kil|kue|refinement")
      ->required();
  translate->add_option("program", trProg, "program file")->required();
  translate->add_option("--program2", trProg2,
                        "second program (refinement only)");
  translate->add_option("--pre", trPre, "source-logic precondition");
  translate->add_option("--post", trPost, "source-logic postcondition");
  translate->add_option("--pre-states", trPreStates,
                        "explicit pre states (JSON file, il only)");
  translate->add_option("--post-states", trPostStates,
                        "explicit post states (JSON file, il only)");
  translate->add_option("--k", trK, "arity (kfu, chl, kil) or k1 (kue)");
  translate->add_option("--k2", trK2, "k2 (kue)");
  translate->add_option("--tag", trTag, "execution tag variable");
  translate->add_option("--tag2", trTag2, "group/identity tag variable");
  translate->add_flag("--verify", trVerify, "also run the bounded oracle");
  translate->add_flag("--json", trJson, "machine-readable output");
  trUf.attach(translate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed() || total->parsed() || disprove->parsed()) {
      TripleArgs& ta = verify->parsed()  ? verifyArgs
                       : total->parsed() ? totalArgs
                                         : disproveArgs;
      Program prog = loadProgram(ta.progPath);
      Universe u = ta.uf.build(prog);
      HPtr pre = parseAssertion(ta.pre, prog);
      HPtr post = parseAssertion(ta.post, prog);
      Oracle oracle(u);
      auto t0 = std::chrono::steady_clock::now();

      if (disprove->parsed()) {
        Verdict attempt;
        auto d = oracle.disprove(pre, prog.body, post, &attempt);
        if (!d) {
          if (ta.jsonOut) {
            json out{{"status", attempt.status == Verdict::Status::Unknown
                                    ? "unknown"
                                    : "no_witness_at_bound"},
                     {"universe", universeToJson(u)}};
            if (ta.timing) out["elapsedMs"] = msSince(t0);
            std::cout << out.dump(2) << "\n";
          } else {
            std::cout << "no witness at bound\n";
          }
          return 2;
        }
        if (ta.jsonOut) {
          json out{{"status", "refuted"},
                   {"universe", universeToJson(u)},
                   {"witness", stateSetToJson(d->witness, *u.layout)},
                   {"strengthenedPre",
                    printHAssertion(d->strengthenedPre, u.layout.get())},
                   {"reverified", d->reverified.holds()}};
          if (ta.timing) out["elapsedMs"] = msSince(t0);
          std::cout << out.dump(2) << "\n";
        } else {
          std::cout << "refuted; witness set: "
                    << showStateSet(d->witness, *u.layout) << "\n";
          std::cout << "strengthened precondition:\n  "
                    << printHAssertion(d->strengthenedPre, u.layout.get())
                    << "\n";
          std::cout << "re-verified {P'} C {not Q}: "
                    << (d->reverified.holds() ? "holds at bound" : "FAILED")
                    << "\n";
        }
        return d->reverified.holds() ? 0 : 2;
      }

      Verdict v = total->parsed()
                      ? oracle.checkTotalTriple(pre, prog.body, post)
                      : oracle.checkTriple(pre, prog.body, post);
      if (ta.jsonOut) {
        json out = verdictToJson(v, u);
        if (ta.timing) out["elapsedMs"] = msSince(t0);
        std::cout << out.dump(2) << "\n";
      } else {
        printVerdictHuman(v, u);
      }
      return verdictExit(v);
    }

    if (check->parsed()) {
      Program prog = loadProgram(checkProg);
      Universe u = checkUf.build(prog);
      ScriptPtr script = parseProofScript(slurp(checkProofPath));
      Report rep = checkProof(prog, script, u);
      if (checkJson) {
        std::cout << reportToJson(rep, u).dump(2) << "\n";
      } else {
        std::cout << "grade: " << Report::gradeName(rep.grade) << "\n";
        for (const auto& o : rep.obligations) {
          const char* st = o.status == Obligation::Status::CheckedSyntactic
                               ? "syntactic"
                           : o.status == Obligation::Status::CheckedBounded
                               ? "bounded  "
                           : o.status == Obligation::Status::Admitted
                               ? "admitted "
                               : "FAILED   ";
          std::cout << "  [" << st << "] node " << o.node << ": "
                    << o.description << "\n";
          if (!o.detail.empty())
            std::cout << "             " << o.detail << "\n";
        }
        for (const auto& n : rep.nodes)
          if (!n.error.empty())
            std::cout << "  node " << n.id << " (" << n.rule
                      << "): " << n.error << "\n";
      }
      (void)admitOk;
      return rep.accepted ? 0 : 1;
    }

    if (sem->parsed()) {
      Program prog = loadProgram(semProg);
      Universe u = semUf.build(prog);
      json in = json::parse(slurp(semStates));
      StateSet S = stateSetFromJson(in, *u.layout);
      Semantics sema(u.layout, u.fuel());
      StateSet out = sema.sem(prog.body, S);
      json j{{"states", stateSetToJson(out, *u.layout)},
             {"bounded", sema.bounded()}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (translate->parsed()) {
      Program prog = loadProgram(trProg);
      Universe u = trUf.build(prog);
      HyperTriplePair enc;
      CommandPtr cmd = prog.body;
      auto tupleOf = [&](const std::string& text, int k, const char* stem) {
        std::vector<std::string> refs;
        for (int i = 1; i <= k; i++)
          refs.push_back(std::string(stem) + std::to_string(i));
        return parseTupleAssertion(text, prog, refs);
      };
      if (trLogic == "hl") {
        enc = fromHL(prog, tupleOf(trPre, 1, "a"), tupleOf(trPost, 1, "a"));
      } else if (trLogic == "fu") {
        enc = fromFU(prog, tupleOf(trPre, 1, "a"), tupleOf(trPost, 1, "a"));
      } else if (trLogic == "chl") {
        enc = fromCHL(prog, trK, tupleOf(trPre, trK, "a"),
                      tupleOf(trPost, trK, "a"), trTag);
      } else if (trLogic == "kfu") {
        enc = fromKFU(prog, trK, tupleOf(trPre, trK, "a"),
                      tupleOf(trPost, trK, "a"), trTag);
      } else if (trLogic == "kil") {
        enc = fromKIL(prog, u, trK, tupleOf(trPre, trK, "a"),
                      tupleOf(trPost, trK, "a"), trTag, trTag2);
      } else if (trLogic == "kue") {
        enc = fromKUE(prog, trK, trK2, tupleOf(trPre, trK + trK2, "a"),
                      tupleOf(trPost, trK + trK2, "a"), trTag, trTag2);
      } else if (trLogic == "il") {
        std::vector<ExtState> P, Q;
        if (!trPreStates.empty())
          for (const auto& e : json::parse(slurp(trPreStates)))
            P.push_back(extStateFromJson(e, *u.layout));
        if (!trPostStates.empty())
          for (const auto& e : json::parse(slurp(trPostStates)))
            Q.push_back(extStateFromJson(e, *u.layout));
        enc = fromIL(prog, P, Q);
      } else if (trLogic == "refinement") {
        if (trProg2.empty()) throw EncodingError("refinement needs --program2");
        Program prog2 = loadProgram(trProg2);
        RefinementEncoding r =
            refinementProduct(prog, prog.body, prog2.body, trTag);
        enc = {r.pre, r.post};
        cmd = r.product;
        if (!trJson)
          std::cout << "product program:\n" << printCommand(cmd) << "\n";
      } else {
        throw EncodingError("unknown logic: " + trLogic);
      }

      if (trJson) {
        json out{{"pre", printHAssertion(enc.pre, u.layout.get())},
                 {"post", printHAssertion(enc.post, u.layout.get())}};
        if (trLogic == "refinement") out["product"] = printCommand(cmd);
        if (trVerify) {
          Oracle oracle(u);
          out["verdict"] =
              verdictToJson(oracle.checkTriple(enc.pre, cmd, enc.post), u);
        }
        std::cout << out.dump(2) << "\n";
        return 0;
      }
      std::cout << "pre:  " << printHAssertion(enc.pre, u.layout.get())
                << "\n";
      std::cout << "post: " << printHAssertion(enc.post, u.layout.get())
                << "\n";
      if (trVerify) {
        Oracle oracle(u);
        Verdict v = oracle.checkTriple(enc.pre, cmd, enc.post);
        printVerdictHuman(v, u);
        return verdictExit(v);
      }
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ScriptError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const UniverseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
