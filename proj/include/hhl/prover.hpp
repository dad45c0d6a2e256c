// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hhl/hyper_print.hpp"
#include "hhl/oracle.hpp"
#include "hhl/proof_script.hpp"
#include "hhl/transform.hpp"

namespace hhl {

// ---------------------------------------------------------------------------
// Proof checking: a user-supplied proof tree is validated rule by rule.
// Syntactic fit (computed preconditions, conclusion shapes, side conditions
// on assertion shape) is decided exactly; entailments and semantic premises
// go to an obligation ledger and are discharged by a ladder of checks:
// alpha-equality, conjunct subsumption, bounded oracle enumeration, or an
// explicit admission.

struct Obligation {
  enum class Kind { Entailment, SideCondition, SemanticPremise } kind;
  enum class Status { CheckedSyntactic, CheckedBounded, Admitted, Failed }
      status;
  int node = 0;
  std::string description;
  std::string detail;  // witness or failure explanation
};

struct NodeReport {
  int id = 0;
  std::string rule;
  std::string error;  // empty when the rule fits
  std::string pre, post;
  std::vector<int> children;
};

struct Report {
  enum class Grade { Syntactic, Bounded, Admitted, Failed };
  Grade grade = Grade::Syntactic;
  bool accepted = false;
  std::vector<NodeReport> nodes;
  std::vector<Obligation> obligations;
  HPtr pre, post;       // the proved triple, when accepted
  CommandPtr command;

  static const char* gradeName(Grade g) {
    switch (g) {
      case Grade::Syntactic: return "syntactic";
      case Grade::Bounded: return "bounded";
      case Grade::Admitted: return "admitted";
      case Grade::Failed: return "failed";
    }
    return "?";
  }
};

// A rigid binder introduced by a rule above the current node, together with
// the instantiation space its obligations range over.
struct RigidBinder {
  enum class Kind { Value, State } kind;
  std::string name;
  DomainRef dom;  // for values
};

// A pair of rigid states constrained to be execution-linked: equal logical
// parts and the second reachable from the first through the command.
struct LinkedPair {
  std::string first, second;
  CommandPtr command;
};

struct CheckError : std::runtime_error {
  explicit CheckError(const std::string& m) : std::runtime_error(m) {}
};

class ProofChecker {
 public:
  ProofChecker(const Program& prog, const Universe& u)
      : prog_(prog), u_(u), oracle_(u) {}

  Report check(const ScriptPtr& root) {
    Report rep;
    Ctx ctx;
    try {
      Checked c = checkNode(root, prog_.body, ctx, rep);
      rep.pre = c.pre;
      rep.post = c.post;
      rep.command = prog_.body;
    } catch (const std::exception& e) {
      rep.grade = Report::Grade::Failed;
      NodeReport nr;
      nr.id = static_cast<int>(rep.nodes.size());
      nr.rule = "(error)";
      nr.error = e.what();
      rep.nodes.push_back(nr);
    }
    finishGrade(rep);
    return rep;
  }

 private:
  struct Ctx {
    std::vector<RigidBinder> rigids;
    std::vector<LinkedPair> links;
    bool admitSubtree = false;
  };

  struct Checked {
    HPtr pre, post;
  };

  // ---- assertion parsing under the current rigid scope ----
  std::set<std::string> stateScope(const Ctx& ctx) const {
    std::set<std::string> s;
    for (const auto& r : ctx.rigids)
      if (r.kind == RigidBinder::Kind::State) s.insert(r.name);
    for (const auto& l : ctx.links) {
      s.insert(l.first);
      s.insert(l.second);
    }
    return s;
  }
  std::set<std::string> valueScope(const Ctx& ctx) const {
    std::set<std::string> s;
    for (const auto& r : ctx.rigids)
      if (r.kind == RigidBinder::Kind::Value) s.insert(r.name);
    return s;
  }

  HPtr parseA(const std::string& text, const Ctx& ctx) {
    return parseAssertion(text, prog_, stateScope(ctx), valueScope(ctx));
  }
  StatePred parseP(const std::string& text, const Ctx& ctx) {
    return parseStatePred(text, prog_, stateScope(ctx), valueScope(ctx));
  }
  StateExpr parseE(const std::string& text, const Ctx& ctx) {
    return parseStateExpr(text, prog_, stateScope(ctx), valueScope(ctx));
  }

  static bool fits(const HPtr& given, const HPtr& computed) {
    return alphaEqual(given, computed) ||
           alphaEqual(simplify(given), simplify(computed));
  }

  // ---- obligation ledger ----
  int obligation(Report& rep, Obligation::Kind kind, int node,
                 std::string desc, Obligation::Status st,
                 std::string detail = "") {
    Obligation o;
    o.kind = kind;
    o.status = st;
    o.node = node;
    o.description = std::move(desc);
    o.detail = std::move(detail);
    rep.obligations.push_back(std::move(o));
    return static_cast<int>(rep.obligations.size()) - 1;
  }

  void entailment(Report& rep, int node, const Ctx& ctx, const HPtr& P,
                  const HPtr& Q, const std::string& where) {
    std::string desc = where + ": " + printHAssertion(P, u_.layout.get()) +
                       "  |=  " + printHAssertion(Q, u_.layout.get());
    if (alphaEqual(P, Q) || alphaEqual(simplify(P), simplify(Q)) ||
        subsumesByConjuncts(P, Q)) {
      obligation(rep, Obligation::Kind::Entailment, node, desc,
                 Obligation::Status::CheckedSyntactic);
      return;
    }
    if (ctx.admitSubtree) {
      obligation(rep, Obligation::Kind::Entailment, node, desc,
                 Obligation::Status::Admitted);
      return;
    }
    dischargeSemantic(rep, node, ctx, desc, Obligation::Kind::Entailment,
                      [&](const RigidEnv& env) {
                        return oracle_.checkEntailment(P, Q, env);
                      });
  }

  void dischargeSemantic(Report& rep, int node, const Ctx& ctx,
                         const std::string& desc, Obligation::Kind kind,
                         const std::function<Verdict(const RigidEnv&)>& run) {
    bool bounded = false;
    std::string failDetail;
    bool ok = forEachInstantiation(ctx, [&](const RigidEnv& env) {
      Verdict v = run(env);
      if (v.status == Verdict::Status::Unknown) {
        failDetail = "undecided: " + v.reason;
        return false;
      }
      if (v.refuted()) {
        failDetail = "refuted";
        if (v.witness)
          failDetail += " by " + showStateSet(*v.witness, *u_.layout);
        return false;
      }
      bounded = true;
      return true;
    });
    obligation(rep, kind, node, desc,
               ok ? Obligation::Status::CheckedBounded
                  : Obligation::Status::Failed,
               failDetail);
    (void)bounded;
  }

  // Enumerates instantiations of the rigid binders. Linked pairs range over
  // execution-linked state pairs; plain state rigids over the grid; value
  // rigids over their domains.
  bool forEachInstantiation(const Ctx& ctx,
                            const std::function<bool(const RigidEnv&)>& f) {
    std::vector<ExtState> grid;
    std::vector<std::pair<std::string, std::vector<Value>>> valueDims;
    std::vector<std::string> stateDims;
    SatChecker sc(u_);
    for (const auto& r : ctx.rigids) {
      if (r.kind == RigidBinder::Kind::Value)
        valueDims.emplace_back(r.name, sc.resolveDomain(r.dom));
      else
        stateDims.push_back(r.name);
    }
    std::vector<std::vector<std::pair<ExtState, ExtState>>> linkDims;
    if (!stateDims.empty() || !ctx.links.empty()) grid = u_.grid();
    for (const auto& l : ctx.links) {
      std::vector<std::pair<ExtState, ExtState>> pairs;
      Semantics sema(u_.layout, u_.fuel());
      for (const auto& st : grid) {
        StateSet one;
        one.insert(st);
        StateSet reach = sema.sem(l.command, one);
        for (const auto& r : reach)
          if (r.log == st.log) pairs.emplace_back(st, r);
      }
      linkDims.push_back(std::move(pairs));
    }

    // budget: product of dimension sizes
    long long count = 1;
    for (const auto& [_, d] : valueDims) count *= (long long)d.size();
    for (size_t i = 0; i < stateDims.size(); i++)
      count *= (long long)grid.size();
    for (const auto& d : linkDims) count *= (long long)std::max<size_t>(d.size(), 1);
    if (count > 200000) return false;

    // iterate the product
    std::vector<size_t> vIdx(valueDims.size(), 0);
    std::vector<size_t> sIdx(stateDims.size(), 0);
    std::vector<size_t> lIdx(linkDims.size(), 0);
    for (;;) {
      RigidEnv env;
      for (size_t i = 0; i < valueDims.size(); i++)
        env.values[valueDims[i].first] = valueDims[i].second[vIdx[i]];
      bool valid = true;
      for (size_t i = 0; i < stateDims.size(); i++) {
        if (grid.empty()) {
          valid = false;
          break;
        }
        env.states[stateDims[i]] = &grid[sIdx[i]];
      }
      std::vector<const std::pair<ExtState, ExtState>*> linkRefs;
      for (size_t i = 0; i < linkDims.size() && valid; i++) {
        if (linkDims[i].empty()) {
          valid = false;  // no linked pairs: premises hold vacuously
          break;
        }
        linkRefs.push_back(&linkDims[i][lIdx[i]]);
        env.states[ctx.links[i].first] = &linkRefs.back()->first;
        env.states[ctx.links[i].second] = &linkRefs.back()->second;
      }
      if (valid && !f(env)) return false;

      // advance the mixed-radix counter
      size_t k = 0;
      bool carried = false;
      for (; k < valueDims.size(); k++) {
        if (++vIdx[k] < valueDims[k].second.size()) break;
        vIdx[k] = 0;
      }
      carried = k == valueDims.size();
      if (carried) {
        size_t j = 0;
        for (; j < stateDims.size(); j++) {
          if (++sIdx[j] < grid.size()) break;
          sIdx[j] = 0;
        }
        carried = j == stateDims.size();
      }
      if (carried) {
        size_t j = 0;
        for (; j < linkDims.size(); j++) {
          if (++lIdx[j] < std::max<size_t>(linkDims[j].size(), 1)) break;
          lIdx[j] = 0;
        }
        carried = j == linkDims.size();
      }
      if (carried) return true;
    }
  }

  // ---- rule checking ----
  Checked checkNode(const ScriptPtr& node, const CommandPtr& cmd, Ctx ctx,
                    Report& rep) {
    int id = static_cast<int>(rep.nodes.size());
    rep.nodes.push_back({});
    rep.nodes[id].id = id;
    rep.nodes[id].rule = node->rule;
    if (node->admit) ctx.admitSubtree = true;

    Checked out;
    try {
      out = dispatch(node, cmd, ctx, rep, id);
    } catch (const ParseError& e) {
      rep.nodes[id].error = e.what();
      throw CheckError(std::string("node ") + std::to_string(id) + " (" +
                       node->rule + "): " + e.what());
    } catch (const CheckError&) {
      throw;
    } catch (const std::exception& e) {
      rep.nodes[id].error = e.what();
      throw CheckError(std::string("node ") + std::to_string(id) + " (" +
                       node->rule + "): " + e.what());
    }
    rep.nodes[id].pre = printHAssertion(out.pre, u_.layout.get());
    rep.nodes[id].post = printHAssertion(out.post, u_.layout.get());
    return out;
  }

  [[noreturn]] void misfit(const ScriptPtr& node, const std::string& msg) {
    throw CheckError("rule '" + node->rule + "' at " +
                     std::to_string(node->line) + ":" +
                     std::to_string(node->col) + ": " + msg);
  }

  void needChildren(const ScriptPtr& node, size_t n) {
    if (node->children.size() != n)
      misfit(node, "expects " + std::to_string(n) + " premise(s), got " +
                       std::to_string(node->children.size()));
  }

  HPtr givenOr(const ScriptPtr& node, const char* key, const Ctx& ctx,
               const HPtr& computed, const char* what) {
    if (!node->has(key)) {
      if (!computed) misfit(node, std::string("missing :") + key);
      return computed;
    }
    HPtr given = parseA(node->text(key), ctx);
    if (computed && !fits(given, computed))
      misfit(node, std::string(what) + " does not match the rule: given\n  " +
                       printHAssertion(given, u_.layout.get()) +
                       "\nbut the rule yields\n  " +
                       printHAssertion(computed, u_.layout.get()));
    return given;
  }

  Checked child(const ScriptPtr& node, size_t i, const CommandPtr& cmd,
                const Ctx& ctx, Report& rep, int id) {
    rep.nodes[id].children.push_back(static_cast<int>(rep.nodes.size()));
    return checkNode(node->children[i], cmd, ctx, rep);
  }

  // guard of a deterministic command as a state predicate / box form
  StatePred guardPred(const PExprPtr& b) const {
    StatePred p;
    p.self = "_g";
    p.body = liftPExprToAssertion(b, p.self);
    return p;
  }
  HPtr boxOf(const PExprPtr& b) const {
    return HAssertion::mkBox("_bx", liftPExprToAssertion(b, "_bx"));
  }
  HPtr lowOf(const PExprPtr& b) const {
    // low over a full expression: lift b as a value expression
    return HAssertion::mkLow("_lw", liftPExpr(b, "_lw"));
  }

  std::pair<CommandPtr, CommandPtr> choiceArms(const ScriptPtr& node,
                                               const CommandPtr& cmd) {
    if (cmd->kind == Command::Kind::Choice) return {cmd->c1, cmd->c2};
    if (cmd->kind == Command::Kind::If)
      return {Command::mkSeq(Command::mkAssume(cmd->expr), cmd->c1),
              Command::mkSeq(Command::mkAssume(pNot(cmd->expr)), cmd->c2)};
    misfit(node, "needs a choice (or if) command, got: " + printCommand(cmd));
  }

  Checked dispatch(const ScriptPtr& node, const CommandPtr& cmd, Ctx& ctx,
                   Report& rep, int id) {
    const std::string& r = node->rule;

    // ---- core rules ----
    if (r == "skip") {
      needChildren(node, 0);
      if (cmd->kind != Command::Kind::Skip) misfit(node, "needs skip");
      HPtr pre = parseA(node->text("pre"), ctx);
      HPtr post = givenOr(node, "post", ctx, pre, "postcondition");
      if (!fits(post, pre)) misfit(node, "pre and post must coincide");
      return {pre, post};
    }
    if (r == "seq") {
      needChildren(node, 2);
      if (cmd->kind != Command::Kind::Seq)
        misfit(node, "needs a sequence command");
      Checked a = child(node, 0, cmd->c1, ctx, rep, id);
      Checked b = child(node, 1, cmd->c2, ctx, rep, id);
      if (!fits(a.post, b.pre))
        misfit(node,
               "the first premise's postcondition must equal the second's "
               "precondition; got\n  " +
                   printHAssertion(a.post, u_.layout.get()) + "\nvs\n  " +
                   printHAssertion(b.pre, u_.layout.get()));
      return {givenOr(node, "pre", ctx, a.pre, "precondition"),
              givenOr(node, "post", ctx, b.post, "postcondition")};
    }
    if (r == "choice") {
      needChildren(node, 2);
      auto arms = choiceArms(node, cmd);
      Checked a = child(node, 0, arms.first, ctx, rep, id);
      Checked b = child(node, 1, arms.second, ctx, rep, id);
      if (!fits(a.pre, b.pre))
        misfit(node, "both premises must share the precondition");
      HPtr post = HAssertion::mkOtimes(a.post, b.post);
      return {givenOr(node, "pre", ctx, a.pre, "precondition"),
              givenOr(node, "post", ctx, post, "postcondition")};
    }
    if (r == "cons") {
      needChildren(node, 1);
      HPtr pre = parseA(node->text("pre"), ctx);
      HPtr post = parseA(node->text("post"), ctx);
      Checked c = child(node, 0, cmd, ctx, rep, id);
      entailment(rep, id, ctx, pre, c.pre, "consequence (pre)");
      entailment(rep, id, ctx, c.post, post, "consequence (post)");
      return {pre, post};
    }
    if (r == "exist") {
      needChildren(node, 1);
      if (node->has("bind")) {
        std::string v = node->text("bind");
        DomainRef dom = node->has("dom") ? parseDom(node->text("dom")) :
                                           DomainRef::dflt();
        ctx.rigids.push_back({RigidBinder::Kind::Value, v, dom});
        Checked c = child(node, 0, cmd, ctx, rep, id);
        HPtr pre = HAssertion::mkQuantVal(HK::ExistsVal, v, dom, c.pre);
        HPtr post = HAssertion::mkQuantVal(HK::ExistsVal, v, dom, c.post);
        return {givenOr(node, "pre", ctx, pre, "precondition"),
                givenOr(node, "post", ctx, post, "postcondition")};
      }
      std::string s = node->text("bindstate");
      ctx.rigids.push_back({RigidBinder::Kind::State, s, {}});
      Checked c = child(node, 0, cmd, ctx, rep, id);
      HPtr pre = HAssertion::mkQuantState(HK::ExistsStateU, s, c.pre);
      HPtr post = HAssertion::mkQuantState(HK::ExistsStateU, s, c.post);
      return {givenOr(node, "pre", ctx, pre, "precondition"),
              givenOr(node, "post", ctx, post, "postcondition")};
    }
    if (r == "iter") {
      needChildren(node, 1);
      if (cmd->kind != Command::Kind::Iter)
        misfit(node, "needs an iteration command");
      std::string n = node->text("bind");
      HPtr inv = parseWithValue(node->text("inv"), ctx, n);
      ctx.rigids.push_back({RigidBinder::Kind::Value, n,
                            DomainRef::explicitSet(iterIndices())});
      Checked c = child(node, 0, cmd->c1, ctx, rep, id);
      HPtr expectedPre = inv;
      HPtr expectedPost = substQVar(
          inv, n, HExpr::mkBin(BinOp::Add, HExpr::mkQVar(n),
                               HExpr::mkLit(Value(1))));
      if (!fits(c.pre, expectedPre) || !fits(c.post, expectedPost))
        misfit(node, "the premise must step the indexed invariant");
      HPtr pre = substQVar(inv, n, HExpr::mkLit(Value(0)));
      HPtr post = HAssertion::mkBigOtimesFamily(n, DomainRef::dflt(), inv);
      return {givenOr(node, "pre", ctx, pre, "precondition"),
              givenOr(node, "post", ctx, post, "postcondition")};
    }

    // ---- syntactic atomic rules ----
    if (r == "assigns") {
      needChildren(node, 0);
      if (cmd->kind != Command::Kind::Assign)
        misfit(node, "needs an assignment");
      HPtr post = parseA(node->text("post"), ctx);
      HPtr pre = transformAssign(cmd->expr, cmd->var, post);
      return {givenOr(node, "pre", ctx, pre, "computed precondition"), post};
    }
    if (r == "havocs") {
      needChildren(node, 0);
      if (cmd->kind != Command::Kind::Havoc) misfit(node, "needs havoc");
      HPtr post = parseA(node->text("post"), ctx);
      HPtr pre = transformHavoc(cmd->var, post);
      return {givenOr(node, "pre", ctx, pre, "computed precondition"), post};
    }
    if (r == "assumes") {
      needChildren(node, 0);
      if (cmd->kind != Command::Kind::Assume) misfit(node, "needs assume");
      HPtr post = parseA(node->text("post"), ctx);
      HPtr pre = transformAssumePExpr(cmd->expr, post);
      return {givenOr(node, "pre", ctx, pre, "computed precondition"), post};
    }

    // ---- loop rules ----
    if (r == "while-desugared") {
      needChildren(node, 2);
      if (cmd->kind != Command::Kind::While) misfit(node, "needs a while loop");
      std::string n = node->text("bind");
      HPtr inv = parseWithValue(node->text("inv"), ctx, n);
      Ctx inner = ctx;
      inner.rigids.push_back({RigidBinder::Kind::Value, n,
                              DomainRef::explicitSet(iterIndices())});
      CommandPtr stepCmd =
          Command::mkSeq(Command::mkAssume(cmd->expr), cmd->c1);
      Checked step = child(node, 0, stepCmd, inner, rep, id);
      HPtr expectedPost = substQVar(
          inv, n, HExpr::mkBin(BinOp::Add, HExpr::mkQVar(n),
                               HExpr::mkLit(Value(1))));
      if (!fits(step.pre, inv) || !fits(step.post, expectedPost))
        misfit(node, "the first premise must step the indexed invariant");
      CommandPtr exitCmd = Command::mkAssume(pNot(cmd->expr));
      Checked fin = child(node, 1, exitCmd, ctx, rep, id);
      HPtr family = HAssertion::mkBigOtimesFamily(n, DomainRef::dflt(), inv);
      if (!fits(fin.pre, family))
        misfit(node,
               "the second premise must start from the indexed split-union");
      HPtr pre = substQVar(inv, n, HExpr::mkLit(Value(0)));
      return {givenOr(node, "pre", ctx, pre, "precondition"),
              givenOr(node, "post", ctx, fin.post, "postcondition")};
    }
    if (r == "while-sync") {
      needChildren(node, 1);
      if (cmd->kind != Command::Kind::While) misfit(node, "needs a while loop");
      HPtr inv = parseA(node->text("pre"), ctx);
      entailment(rep, id, ctx, inv, lowOf(cmd->expr), "loop guard agreement");
      Checked body = child(node, 0, cmd->c1, ctx, rep, id);
      HPtr expectedPre = HAssertion::mkAnd(inv, boxOf(cmd->expr));
      if (!fits(body.pre, expectedPre))
        misfit(node, "the premise must assume the invariant and the guard");
      if (!fits(body.post, inv))
        misfit(node, "the premise must re-establish the invariant");
      HPtr post = HAssertion::mkAnd(
          HAssertion::mkOr(inv, HAssertion::mkEmp()), boxOf(pNot(cmd->expr)));
      return {inv, givenOr(node, "post", ctx, post, "postcondition")};
    }
    if (r == "if-sync") {
      needChildren(node, 2);
      if (cmd->kind != Command::Kind::If) misfit(node, "needs an if command");
      HPtr pre = parseA(node->text("pre"), ctx);
      entailment(rep, id, ctx, pre, lowOf(cmd->expr), "branch agreement");
      Ctx inner = ctx;
      Checked t = child(node, 0, cmd->c1, inner, rep, id);
      Checked e = child(node, 1, cmd->c2, inner, rep, id);
      if (!fits(t.pre, HAssertion::mkAnd(pre, boxOf(cmd->expr))))
        misfit(node, "the then-premise must assume the guard everywhere");
      if (!fits(e.pre, HAssertion::mkAnd(pre, boxOf(pNot(cmd->expr)))))
        misfit(node, "the else-premise must assume the negated guard");
      if (!fits(t.post, e.post))
        misfit(node, "both branches must establish the same postcondition");
      return {pre, givenOr(node, "post", ctx, t.post, "postcondition")};
    }
    if (r == "while-ae") {
      needChildren(node, 2);
      if (cmd->kind != Command::Kind::While) misfit(node, "needs a while loop");
      CommandPtr unroll = Command::mkIf(cmd->expr, cmd->c1, Command::mkSkip());
      Checked inv = child(node, 0, unroll, ctx, rep, id);
      if (!fits(inv.pre, inv.post))
        misfit(node, "the unrolling premise must preserve the invariant");
      CommandPtr exitCmd = Command::mkAssume(pNot(cmd->expr));
      Checked fin = child(node, 1, exitCmd, ctx, rep, id);
      if (!fits(fin.pre, inv.pre))
        misfit(node, "the exit premise must start from the invariant");
      ShapeReport shape = syntacticShape(fin.post);
      if (shape.forallStateAfterAnyExists)
        misfit(node,
               "the postcondition places a universal state quantifier under "
               "an existential, which this rule does not support");
      return {givenOr(node, "pre", ctx, inv.pre, "precondition"),
              givenOr(node, "post", ctx, fin.post, "postcondition")};
    }
    if (r == "while-exists") {
      needChildren(node, 2);
      if (cmd->kind != Command::Kind::While) misfit(node, "needs a while loop");
      std::string phi = node->text("bindstate");
      std::string vvar = node->has("bindvalue") ? node->text("bindvalue") : "v";
      // conclusion: {exists phi in S. P_phi} while {exists phi in S. Q_phi}
      HPtr pre = parseA(node->text("pre"), ctx);
      HPtr post = parseA(node->text("post"), ctx);
      if (pre->kind != HK::ExistsState || post->kind != HK::ExistsState)
        misfit(node, "pre and post must existentially bind a state");
      HPtr Pphi = renameStateRef(pre->a, pre->binder, phi);
      HPtr Qphi = renameStateRef(post->a, post->binder, phi);

      Ctx sctx = ctx;
      sctx.rigids.push_back({RigidBinder::Kind::State, phi, {}});
      StateExpr variant = parseE(node->text("variant"), sctx);

      // first premise, schematic in the variant's initial value v
      Ctx vctx = ctx;
      vctx.rigids.push_back(
          {RigidBinder::Kind::Value, vvar,
           DomainRef::explicitSet(variantValues(variant))});
      CommandPtr unroll = Command::mkIf(cmd->expr, cmd->c1, Command::mkSkip());
      Checked first = child(node, 0, unroll, vctx, rep, id);
      HPtr guardAt = stateInstance(guardPred(cmd->expr), phi);
      HPtr eAtPhi = nullptr;
      {
        HExprPtr e = renameStateRefInExpr(variant.expr, variant.self, phi);
        eAtPhi = HAssertion::mkCmp(CmpOp::Eq, HExpr::mkQVar(vvar), e);
        HPtr cpre = HAssertion::mkQuantState(
            HK::ExistsState, phi,
            HAssertion::mkAnd(Pphi, HAssertion::mkAnd(guardAt, eAtPhi)));
        HPtr decrease = HAssertion::mkAnd(
            HAssertion::mkCmp(CmpOp::Le, HExpr::mkLit(Value(0)), e),
            HAssertion::mkCmp(CmpOp::Lt, e, HExpr::mkQVar(vvar)));
        HPtr cpost = HAssertion::mkQuantState(
            HK::ExistsState, phi, HAssertion::mkAnd(Pphi, decrease));
        if (!fits(first.pre, cpre))
          misfit(node, "the variant premise must fix the variant: expected\n  " +
                           printHAssertion(cpre, u_.layout.get()));
        if (!fits(first.post, cpost))
          misfit(node,
                 "the variant premise must decrease the variant: expected\n  " +
                     printHAssertion(cpost, u_.layout.get()));
      }
      // second premise, schematic in the exited witness state
      Checked second = child(node, 1, cmd, sctx, rep, id);
      if (!fits(second.pre, Pphi) || !fits(second.post, Qphi))
        misfit(node, "the witness premise must prove the loop for the fixed "
                     "state");
      return {pre, post};
    }

    // ---- composition rules ----
    if (r == "and" || r == "or") {
      needChildren(node, 2);
      Checked a = child(node, 0, cmd, ctx, rep, id);
      Checked b = child(node, 1, cmd, ctx, rep, id);
      HPtr pre = r == "and" ? HAssertion::mkAnd(a.pre, b.pre)
                            : HAssertion::mkOr(a.pre, b.pre);
      HPtr post = r == "and" ? HAssertion::mkAnd(a.post, b.post)
                             : HAssertion::mkOr(a.post, b.post);
      return {givenOr(node, "pre", ctx, pre, "precondition"),
              givenOr(node, "post", ctx, post, "postcondition")};
    }
    if (r == "framesafe") {
      needChildren(node, 1);
      HPtr F = parseA(node->text("frame"), ctx);
      ShapeReport shape = syntacticShape(F);
      if (shape.containsExistsState)
        misfit(node, "the frame must not assert the existence of states");
      frameDisjoint(node, F, cmd);
      Checked c = child(node, 0, cmd, ctx, rep, id);
      return {givenOr(node, "pre", ctx, HAssertion::mkAnd(c.pre, F),
                      "precondition"),
              givenOr(node, "post", ctx, HAssertion::mkAnd(c.post, F),
                      "postcondition")};
    }
    if (r == "frame") {
      needChildren(node, 1);
      HPtr F = parseA(node->text("frame"), ctx);
      frameDisjoint(node, F, cmd);
      Checked c = child(node, 0, cmd, ctx, rep, id);
      HPtr pre = HAssertion::mkAnd(c.pre, F);
      // the premise triple must be total: a semantic obligation
      dischargeSemantic(
          rep, id, ctx,
          "termination: every state satisfying " +
              printHAssertion(pre, u_.layout.get()) +
              " has a terminating execution",
          Obligation::Kind::SemanticPremise, [&](const RigidEnv& env) {
            return oracle_.checkTerminationPremise(pre, cmd, env);
          });
      return {givenOr(node, "pre", ctx, pre, "precondition"),
              givenOr(node, "post", ctx, HAssertion::mkAnd(c.post, F),
                      "postcondition")};
    }
    if (r == "forall") {
      needChildren(node, 1);
      std::string v = node->text("bind");
      DomainRef dom = node->has("dom") ? parseDom(node->text("dom"))
                                       : DomainRef::dflt();
      ctx.rigids.push_back({RigidBinder::Kind::Value, v, dom});
      Checked c = child(node, 0, cmd, ctx, rep, id);
      return {givenOr(node, "pre", ctx,
                      HAssertion::mkQuantVal(HK::ForallVal, v, dom, c.pre),
                      "precondition"),
              givenOr(node, "post", ctx,
                      HAssertion::mkQuantVal(HK::ForallVal, v, dom, c.post),
                      "postcondition")};
    }
    if (r == "indexed-union") {
      needChildren(node, 1);
      std::string v = node->text("bind");
      DomainRef dom = node->has("dom") ? parseDom(node->text("dom"))
                                       : DomainRef::dflt();
      ctx.rigids.push_back({RigidBinder::Kind::Value, v, dom});
      Checked c = child(node, 0, cmd, ctx, rep, id);
      return {givenOr(node, "pre", ctx,
                      HAssertion::mkBigOtimesFamily(v, dom, c.pre),
                      "precondition"),
              givenOr(node, "post", ctx,
                      HAssertion::mkBigOtimesFamily(v, dom, c.post),
                      "postcondition")};
    }
    if (r == "union") {
      needChildren(node, 2);
      Checked a = child(node, 0, cmd, ctx, rep, id);
      Checked b = child(node, 1, cmd, ctx, rep, id);
      return {givenOr(node, "pre", ctx, HAssertion::mkOtimes(a.pre, b.pre),
                      "precondition"),
              givenOr(node, "post", ctx, HAssertion::mkOtimes(a.post, b.post),
                      "postcondition")};
    }
    if (r == "bigunion") {
      needChildren(node, 1);
      Checked c = child(node, 0, cmd, ctx, rep, id);
      return {givenOr(node, "pre", ctx, HAssertion::mkBigOtimes(c.pre),
                      "precondition"),
              givenOr(node, "post", ctx, HAssertion::mkBigOtimes(c.post),
                      "postcondition")};
    }
    if (r == "specialize") {
      needChildren(node, 1);
      StatePred p = parseP(node->text("guard"), ctx);
      ShapeReport shape = syntacticShape(p.body);
      std::set<std::string> writes = wrVars(cmd);
      for (const auto& v : shape.fvProg)
        if (writes.count(v))
          misfit(node, "the guard reads '" + v + "', which the command writes");
      Checked c = child(node, 0, cmd, ctx, rep, id);
      return {givenOr(node, "pre", ctx, transformAssume(p, c.pre),
                      "precondition"),
              givenOr(node, "post", ctx, transformAssume(p, c.post),
                      "postcondition")};
    }
    if (r == "lupdate") {
      needChildren(node, 1);
      std::vector<std::string> V = nameList(node, "vars");
      HPtr pre = parseA(node->text("pre"), ctx);
      Checked c = child(node, 0, cmd, ctx, rep, id);
      HPtr post = givenOr(node, "post", ctx, c.post, "postcondition");
      dischargeSemantic(
          rep, id, ctx,
          "logical update: " + printHAssertion(pre, u_.layout.get()) +
              "  can be relabeled on {" + joinNames(V) + "} to  " +
              printHAssertion(c.pre, u_.layout.get()),
          Obligation::Kind::SemanticPremise, [&](const RigidEnv& env) {
            return oracle_.checkLogicalEntailment(pre, c.pre, V, env);
          });
      dischargeSemantic(
          rep, id, ctx,
          "invariance of " + printHAssertion(post, u_.layout.get()) +
              " under relabelings of {" + joinNames(V) + "}",
          Obligation::Kind::SemanticPremise, [&](const RigidEnv& env) {
            return oracle_.checkInvariantOnV(post, V, env);
          });
      return {pre, post};
    }
    if (r == "lupdates") {
      needChildren(node, 1);
      auto it = node->params.find("updates");
      if (it == node->params.end() || !it->second.isList)
        misfit(node, "missing :updates ((t {e}) ...)");
      HPtr pre = parseA(node->text("pre"), ctx);
      Checked c = child(node, 0, cmd, ctx, rep, id);
      HPtr post = givenOr(node, "post", ctx, c.post, "postcondition");
      // premise pre must be: pre && (forall s in S. /\ s(t_i) = e_i(s))
      std::string self = "_u";
      HPtr eqs = nullptr;
      NameInfo preNames = names(pre);
      NameInfo postNames = names(post);
      for (const auto& upd : it->second.items) {
        if (!upd.isList || upd.items.size() != 2)
          misfit(node, ":updates entries must be (t {e}) pairs");
        std::string t = upd.items[0].atom;
        if (!prog_.isLVar(t))
          misfit(node, "'" + t + "' is not a logical variable");
        StateExpr e = parseStateExpr(upd.items[1].atom, prog_,
                                     stateScope(ctx), valueScope(ctx));
        NameInfo eNames;
        collectNames(HAssertion::mkCmp(CmpOp::Eq, e.expr, e.expr), {},
                     {e.self}, eNames);
        if (preNames.fvLog.count(t) || postNames.fvLog.count(t) ||
            eNames.fvLog.count(t))
          misfit(node, "the updated variable '" + t +
                           "' must not occur in the pre, post, or expression");
        HExprPtr es = renameStateRefInExpr(e.expr, e.self, self);
        HPtr eq = HAssertion::mkCmp(CmpOp::Eq, HExpr::mkLLook(self, t), es);
        eqs = eqs ? HAssertion::mkAnd(eqs, eq) : eq;
      }
      HPtr expected = HAssertion::mkAnd(
          pre, HAssertion::mkQuantState(HK::ForallState, self, eqs));
      if (!fits(c.pre, expected))
        misfit(node, "the premise must pin the updated logical variables: "
                     "expected\n  " +
                         printHAssertion(expected, u_.layout.get()));
      return {pre, post};
    }
    if (r == "atmost" || r == "atleast") {
      needChildren(node, 1);
      Checked c = child(node, 0, cmd, ctx, rep, id);
      auto wrap = [&](const HPtr& x) {
        return r == "atmost" ? HAssertion::mkAtMost(x)
                             : HAssertion::mkAtLeast(x);
      };
      return {givenOr(node, "pre", ctx, wrap(c.pre), "precondition"),
              givenOr(node, "post", ctx, wrap(c.post), "postcondition")};
    }
    if (r == "true") {
      needChildren(node, 0);
      HPtr pre = parseA(node->text("pre"), ctx);
      return {pre, HAssertion::mkTrue()};
    }
    if (r == "false") {
      needChildren(node, 0);
      HPtr post = parseA(node->text("post"), ctx);
      return {HAssertion::mkFalse(), post};
    }
    if (r == "empty") {
      needChildren(node, 0);
      return {HAssertion::mkEmp(), HAssertion::mkEmp()};
    }
    if (r == "linking") {
      needChildren(node, 1);
      auto namesList = nameList(node, "bindstates");
      if (namesList.size() != 2)
        misfit(node, ":bindstates must name the two linked states");
      HPtr pre = parseA(node->text("pre"), ctx);
      HPtr post = parseA(node->text("post"), ctx);
      if (pre->kind != HK::ForallState || post->kind != HK::ForallState)
        misfit(node, "pre and post must universally bind a state");
      HPtr Pphi = renameStateRef(pre->a, pre->binder, namesList[0]);
      HPtr Qphi = renameStateRef(post->a, post->binder, namesList[1]);
      Ctx inner = ctx;
      inner.links.push_back({namesList[0], namesList[1], cmd});
      Checked c = child(node, 0, cmd, inner, rep, id);
      if (!fits(c.pre, Pphi) || !fits(c.post, Qphi))
        misfit(node, "the premise must prove the body for the linked pair");
      return {pre, post};
    }
    if (r == "while-sync-tot") {
      needChildren(node, 1);
      if (cmd->kind != Command::Kind::While) misfit(node, "needs a while loop");
      std::string t = node->text("snapshot");
      if (!prog_.isLVar(t))
        misfit(node, "the snapshot '" + t + "' must be a logical variable");
      StateExpr variant = parseE(node->text("variant"), ctx);
      HPtr pre = parseA(node->text("pre"), ctx);
      // conclusion pre must be I && low(b); peel the guard-agreement part
      if (pre->kind != HK::And || !fits(pre->b, lowOf(cmd->expr)))
        misfit(node, "pre must have the form I && low(guard)");
      HPtr inv = pre->a;
      if (names(inv).fvLog.count(t))
        misfit(node, "the snapshot variable must not occur in the invariant");
      std::string self = "_sn";
      HExprPtr eAt = renameStateRefInExpr(variant.expr, variant.self, self);
      HPtr guardAt = liftPExprToAssertion(cmd->expr, self);
      HPtr snapEq = HAssertion::mkCmp(CmpOp::Eq, eAt, HExpr::mkLLook(self, t));
      HPtr cpre = HAssertion::mkAnd(
          inv, HAssertion::mkBox(self, HAssertion::mkAnd(guardAt, snapEq)));
      HPtr decrease = HAssertion::mkAnd(
          HAssertion::mkCmp(CmpOp::Le, HExpr::mkLit(Value(0)), eAt),
          HAssertion::mkCmp(CmpOp::Lt, eAt, HExpr::mkLLook(self, t)));
      HPtr cpost = HAssertion::mkAnd(
          HAssertion::mkAnd(inv, lowOf(cmd->expr)),
          HAssertion::mkBox(self, decrease));
      Checked c = child(node, 0, cmd->c1, ctx, rep, id);
      if (!fits(c.pre, cpre))
        misfit(node, "the premise must snapshot the variant: expected\n  " +
                         printHAssertion(cpre, u_.layout.get()));
      if (!fits(c.post, cpost))
        misfit(node, "the premise must decrease the variant: expected\n  " +
                         printHAssertion(cpost, u_.layout.get()));
      // the premise triple must be total
      dischargeSemantic(
          rep, id, ctx,
          "termination of the loop body from " +
              printHAssertion(cpre, u_.layout.get()),
          Obligation::Kind::SemanticPremise, [&](const RigidEnv& env) {
            return oracle_.checkTerminationPremise(cpre, cmd->c1, env);
          });
      HPtr post = HAssertion::mkAnd(inv, boxOf(pNot(cmd->expr)));
      return {pre, givenOr(node, "post", ctx, post, "postcondition")};
    }

    misfit(node, "unknown rule");
  }

  void frameDisjoint(const ScriptPtr& node, const HPtr& F,
                     const CommandPtr& cmd) {
    ShapeReport shape = syntacticShape(F);
    std::set<std::string> writes = wrVars(cmd);
    for (const auto& v : shape.fvProg)
      if (writes.count(v))
        misfit(node, "the frame reads '" + v + "', which the command writes");
  }

  std::vector<std::string> nameList(const ScriptPtr& node,
                                    const std::string& key) {
    auto it = node->params.find(key);
    if (it == node->params.end()) misfit(node, "missing :" + key);
    std::vector<std::string> out;
    if (it->second.isList) {
      for (const auto& v : it->second.items) out.push_back(v.atom);
    } else {
      out.push_back(it->second.atom);
    }
    return out;
  }

  static std::string joinNames(const std::vector<std::string>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); i++) {
      if (i) out += ", ";
      out += v[i];
    }
    return out;
  }

  // binder-domain syntax: dom(x), lo..hi, {v, ...}
  DomainRef parseDom(const std::string& text) {
    Lexer lx(text);
    if (lx.eatIdent("dom")) {
      lx.expectPunct("(");
      std::string v = lx.expectIdent("a variable name");
      lx.expectPunct(")");
      return DomainRef::ofVar(v);
    }
    if (lx.eatPunct("{")) {
      std::vector<Value> vals;
      for (;;) {
        vals.emplace_back(lx.expectInt());
        if (!lx.eatPunct(",")) break;
      }
      lx.expectPunct("}");
      return DomainRef::explicitSet(std::move(vals));
    }
    Int lo = lx.expectInt();
    lx.expectPunct("..");
    Int hi = lx.expectInt();
    std::vector<Value> vals;
    for (Int v = lo; v <= hi; ++v) vals.emplace_back(v);
    return DomainRef::explicitSet(std::move(vals));
  }

  HPtr parseWithValue(const std::string& text, const Ctx& ctx,
                      const std::string& extraValue) {
    auto vs = valueScope(ctx);
    vs.insert(extraValue);
    return parseAssertion(text, prog_, stateScope(ctx), vs);
  }

  std::vector<Value> iterIndices() const {
    std::vector<Value> idx;
    for (int i = 0; i <= u_.maxIter; i++) idx.emplace_back(i);
    return idx;
  }

  std::vector<Value> variantValues(const StateExpr& variant) {
    std::vector<Value> out;
    SatChecker sc(u_);
    for (const auto& st : u_.grid()) {
      RigidEnv env;
      env.states[variant.self] = &st;
      Value v = sc.eval(variant.expr, env);
      bool dup = false;
      for (const auto& w : out) dup = dup || w == v;
      if (!dup) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  HPtr stateInstance(const StatePred& p, const std::string& at) {
    return renameStateRef(p.body, p.self, at);
  }

  void finishGrade(Report& rep) {
    Report::Grade g = Report::Grade::Syntactic;
    for (const auto& n : rep.nodes)
      if (!n.error.empty()) g = Report::Grade::Failed;
    for (const auto& o : rep.obligations) {
      if (o.status == Obligation::Status::Failed) {
        g = Report::Grade::Failed;
        break;
      }
      if (o.status == Obligation::Status::Admitted &&
          g != Report::Grade::Failed)
        g = std::max(g, Report::Grade::Admitted);
      else if (o.status == Obligation::Status::CheckedBounded)
        g = std::max(g, Report::Grade::Bounded);
    }
    rep.grade = g;
    rep.accepted = g != Report::Grade::Failed;
  }

  const Program& prog_;
  const Universe& u_;
  Oracle oracle_;
};

inline Report checkProof(const Program& prog, const ScriptPtr& script,
                         const Universe& u) {
  ProofChecker pc(prog, u);
  return pc.check(script);
}

}  // namespace hhl
