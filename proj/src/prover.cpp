#include "lsv/prover.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lsv/interp.hpp"
#include "lsv/printer.hpp"

#include <json.hpp>

namespace lsv {

const char *verdictName(Verdict v) {
  switch (v) {
  case Verdict::Proved:
    return "proved";
  case Verdict::Refuted:
    return "refuted";
  case Verdict::Unknown:
    return "unknown";
  }
  return "?";
}

int verdictExitCode(const VerdictReport &r) {
  switch (r.verdict) {
  case Verdict::Proved:
    return 0;
  case Verdict::Refuted:
    return 1;
  case Verdict::Unknown:
    return 2;
  }
  return 2;
}

// ---------------------------------------------------------------------------
// Proof tree rendering
// ---------------------------------------------------------------------------

namespace {

void renderNode(const ProofTree &t, std::size_t id, int depth,
                std::ostream &os) {
  const ProofNode &n = t.nodes[id];
  std::string ind(static_cast<std::size_t>(depth) * 2, ' ');
  os << ind << n.path << ": " << prettyPrint(n.goal.sequent) << "\n";
  if (!n.ruleName.empty())
    os << ind << "  rule " << n.ruleName << "\n";
  else if (n.leafStatus)
    os << ind << "  " << closureToString(*n.leafStatus)
       << (n.boundednessObligation ? " [unwind bound]" : "") << "\n";
  for (std::size_t c : n.children)
    renderNode(t, c, depth + 1, os);
}

} // namespace

std::string ProofTree::render() const {
  std::ostringstream os;
  if (!nodes.empty())
    renderNode(*this, 0, 0, os);
  return os.str();
}

std::string ProofTree::renderDot() const {
  std::ostringstream os;
  os << "digraph proof {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto &n : nodes) {
    std::string label = n.path + "\\n" +
                        (!n.ruleName.empty()
                             ? n.ruleName
                             : (n.leafStatus ? closureToString(*n.leafStatus)
                                             : std::string("?")));
    os << "  n" << n.id << " [label=\"" << label << "\"];\n";
    for (std::size_t c : n.children)
      os << "  n" << n.id << " -> n" << c << ";\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

std::string VerdictReport::toJson() const {
  nlohmann::ordered_json j;
  j["verdict"] = verdictName(verdict);
  nlohmann::ordered_json rules = nlohmann::ordered_json::object();
  for (const auto &[k, v] : ruleApplications)
    rules[k] = v;
  j["rules"] = rules;
  j["leaves"] = leaves;
  nlohmann::ordered_json closed = nlohmann::ordered_json::object();
  for (const auto &[k, v] : closedBy)
    closed[k] = v;
  j["closedBy"] = closed;
  j["open"] = openLeaves;
  j["refuted"] = refutedLeaves;
  if (!counterexample.empty()) {
    nlohmann::ordered_json cex = nlohmann::ordered_json::object();
    for (const auto &[k, v] : counterexample) {
      if (const auto *b = std::get_if<bool>(&v))
        cex[k] = *b;
      else
        cex[k] = std::get<std::int64_t>(v);
    }
    j["counterexample"] = cex;
  }
  j["artifacts"] = artifacts;
  if (!error.empty())
    j["error"] = error;
  return j.dump();
}

std::string VerdictReport::render() const {
  std::ostringstream os;
  os << "verdict: " << verdictName(verdict) << "\n";
  for (const auto &[k, v] : ruleApplications)
    os << "rule." << k << ": " << v << "\n";
  os << "leaves: " << leaves << "\n";
  for (const auto &[k, v] : closedBy)
    os << "closed." << k << ": " << v << "\n";
  os << "leaves.open: " << openLeaves << "\n";
  os << "leaves.refuted: " << refutedLeaves << "\n";
  if (!counterexample.empty()) {
    os << "counterexample:";
    for (const auto &[k, v] : counterexample)
      os << " " << k << "=" << valueToString(v);
    os << "\n";
  }
  for (const auto &a : artifacts)
    os << "artifact: " << a << "\n";
  if (!error.empty())
    os << "error: " << error << "\n";
  os << "json: " << toJson() << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// The strategy
// ---------------------------------------------------------------------------

namespace {

struct StrategyState {
  std::map<const Stmt *, LoopAnnotation> annots;
};

struct WorkItem {
  std::size_t nodeId;
  StrategyState state;
};

std::string methodName(const ClosureResult &c) {
  switch (c.method) {
  case ClosureResult::Method::Syntactic:
    return "syntactic";
  case ClosureResult::Method::Bounded:
    return "bounded";
  case ClosureResult::Method::External:
    return "external";
  }
  return "?";
}

/// first succedent formula containing a box (for propositional exposure)
std::optional<std::size_t> boxCarrierIndex(const Sequent &s) {
  for (std::size_t i = 0; i < s.succedent.size(); ++i)
    if (containsBox(s.succedent[i]))
      return i;
  return std::nullopt;
}

} // namespace

ProveResult prove(const AnnotatedProgram &ap, const ProveOptions &opts) {
  ProveResult out;
  ProofTree &tree = out.tree;
  VerdictReport &report = out.report;

  auto pool = std::make_shared<FreshNamePool>();
  pool->reserveAll(identifiersOfProgram(ap.program));
  pool->reserveAll(labelsOfProgram(ap.program));
  pool->reserveAll(freeProgVars(ap.precondition));
  pool->reserveAll(freeProgVars(ap.postcondition));
  for (const auto &[_, la] : ap.loopAnnotations)
    if (la.invariant)
      pool->reserveAll(freeProgVars(la.invariant));

  Goal root;
  root.sequent.antecedent.push_back(ap.precondition);
  root.sequent.succedent.push_back(mkBox(ap.program, ap.postcondition));
  root.pool = pool;
  root.sorts = std::make_shared<SortEnv>(ap.sorts);

  StrategyState rootState{ap.loopAnnotations};

  tree.nodes.push_back(ProofNode{});
  tree.nodes[0].id = 0;
  tree.nodes[0].path = "0";
  tree.nodes[0].goal = std::move(root);
  tree.nodes[0].goal.sequent = simplifySequent(tree.nodes[0].goal.sequent);

  std::vector<WorkItem> stack;
  stack.push_back({0, std::move(rootState)});

  SolverOptions solverOpts{opts.bound, opts.budget};
  std::size_t steps = 0;
  bool stepBudgetHit = false;

  auto closeLeaf = [&](std::size_t id, ClosureResult c) {
    tree.nodes[id].leafStatus = std::move(c);
  };

  while (!stack.empty()) {
    WorkItem item = std::move(stack.back());
    stack.pop_back();
    std::size_t id = item.nodeId;
    Goal &goal = tree.nodes[id].goal;

    if (syntacticallyClosed(goal.sequent)) {
      ClosureResult c;
      c.status = ClosureResult::Status::ClosedValid;
      c.method = ClosureResult::Method::Syntactic;
      closeLeaf(id, std::move(c));
      continue;
    }

    if (steps >= opts.maxSteps) {
      stepBudgetHit = true;
      ClosureResult c;
      c.status = ClosureResult::Status::Open;
      c.method = ClosureResult::Method::Syntactic;
      c.note = "step budget exceeded";
      closeLeaf(id, std::move(c));
      continue;
    }

    std::optional<RuleResult> applied;
    StrategyState premiseStateBase = item.state;
    std::vector<StrategyState> premiseStates;
    bool unwindExitHere = false;

    try {
      auto gb = selectBoxFormula(goal.sequent);
      if (gb) {
        ActiveDecomposition dec = locateActiveStatement(gb->box->program);
        switch (classifyActive(dec)) {
        case ActiveKind::BasicSE:
          applied = applyBasicSE(goal);
          break;
        case ActiveKind::EmptyLoopScope:
          applied = emptyIndexedLoopScope(goal);
          break;
        case ActiveKind::ContinueLoopScope:
          applied = continueIndexedLoopScope(goal);
          break;
        case ActiveKind::BreakLoopScope:
          applied = breakIndexedLoopScope(goal);
          break;
        case ActiveKind::AtWhile:
        case ActiveKind::AtFor: {
          const Stmt *loop = dec.active.get();
          const bool isFor = classifyActive(dec) == ActiveKind::AtFor;
          if (isFor &&
              as<ForStmt>(dec.active)->init.kind != ForInit::Kind::Empty) {
            applied = pullOutLoopInitializer(goal);
            // the annotation follows the rewritten loop node
            auto it = premiseStateBase.annots.find(applied->replacedLoop.get());
            if (it != premiseStateBase.annots.end())
              premiseStateBase.annots[applied->newLoop.get()] = it->second;
            break;
          }
          auto it = item.state.annots.find(loop);
          if (it == item.state.annots.end()) {
            ClosureResult c;
            c.status = ClosureResult::Status::Open;
            c.method = ClosureResult::Method::Syntactic;
            c.note = "missing loop annotation";
            closeLeaf(id, std::move(c));
            continue;
          }
          if (it->second.kind == LoopAnnotation::Kind::Invariant) {
            applied = isFor ? loopInvariantFor(goal, it->second.invariant)
                            : loopInvariantWhile(goal, it->second.invariant);
          } else if (it->second.unwind > 0) {
            applied = isFor ? unwindForLoop(goal) : unwindWhileLoop(goal);
            premiseStateBase.annots[loop].unwind -= 1;
          } else {
            applied = unwindExit(goal);
            unwindExitHere = true;
          }
          break;
        }
        }
      } else if (auto carrier = boxCarrierIndex(goal.sequent)) {
        applied = propositionalRight(goal, *carrier);
      } else {
        // modality-free leaf: close via the bounded solver
        ClosureResult c = boundedValid(goal.sequent, solverOpts);
        closeLeaf(id, std::move(c));
        continue;
      }
    } catch (const RuleError &e) {
      ClosureResult c;
      c.status = ClosureResult::Status::Open;
      c.method = ClosureResult::Method::Syntactic;
      c.note = std::string("rule error: ") + e.what();
      closeLeaf(id, std::move(c));
      continue;
    }

    ++steps;
    report.ruleApplications[applied->ruleName] += 1;
    tree.nodes[id].ruleName = applied->ruleName;

    if (applied->premises.empty()) {
      // the rule closed the goal (uncaught throw satisfies the box)
      ClosureResult c;
      c.status = ClosureResult::Status::ClosedValid;
      c.method = ClosureResult::Method::Syntactic;
      c.note = "abrupt termination";
      tree.nodes[id].leafStatus = std::move(c);
      continue;
    }

    std::vector<std::size_t> childIds;
    for (std::size_t k = 0; k < applied->premises.size(); ++k) {
      ProofNode child;
      child.id = tree.nodes.size();
      child.path = tree.nodes[id].path + "." + std::to_string(k);
      child.goal = applied->premises[k];
      child.goal.sequent = simplifySequent(child.goal.sequent);
      child.boundednessObligation = unwindExitHere && k == 0;
      childIds.push_back(child.id);
      tree.nodes.push_back(std::move(child));
      premiseStates.push_back(premiseStateBase);
    }
    tree.nodes[id].children = childIds;
    for (std::size_t k = childIds.size(); k-- > 0;)
      stack.push_back({childIds[k], std::move(premiseStates[k])});
  }

  // verdict and statistics
  bool allClosed = true;
  const ProofNode *firstRefuted = nullptr;
  for (const auto &n : tree.nodes) {
    if (!n.leafStatus)
      continue;
    ++report.leaves;
    switch (n.leafStatus->status) {
    case ClosureResult::Status::ClosedValid:
      report.closedBy[methodName(*n.leafStatus)] += 1;
      break;
    case ClosureResult::Status::Open:
      ++report.openLeaves;
      allClosed = false;
      break;
    case ClosureResult::Status::Refuted:
      ++report.refutedLeaves;
      allClosed = false;
      if (!n.boundednessObligation && !firstRefuted)
        firstRefuted = &n;
      break;
    }
  }
  if (allClosed && report.leaves > 0)
    report.verdict = Verdict::Proved;
  else if (firstRefuted) {
    report.verdict = Verdict::Refuted;
    report.counterexample = firstRefuted->leafStatus->counterexample;
  } else {
    report.verdict = Verdict::Unknown;
    if (stepBudgetHit)
      report.error = "step budget exceeded";
  }

  // artifacts
  namespace fs = std::filesystem;
  if (!opts.emitSmtDir.empty()) {
    fs::create_directories(opts.emitSmtDir);
    for (const auto &n : tree.nodes) {
      if (!n.leafStatus || n.leafStatus->status == ClosureResult::Status::ClosedValid)
        continue;
      if (sequentContainsBox(n.goal.sequent))
        continue; // not expressible: symbolic execution did not finish
      fs::path p = fs::path(opts.emitSmtDir) / ("goal-" + n.path + ".smt2");
      std::ofstream f(p);
      f << emitSMT(n.goal.sequent);
      report.artifacts.push_back(p.string());
    }
  }
  if (!opts.proofOut.empty()) {
    std::ofstream f(opts.proofOut);
    if (opts.proofOut.size() > 4 &&
        opts.proofOut.substr(opts.proofOut.size() - 4) == ".dot")
      f << tree.renderDot();
    else
      f << tree.render();
    report.artifacts.push_back(opts.proofOut);
  }
  return out;
}

ProveResult proveFile(const std::string &text, const ProveOptions &opts) {
  return prove(parseAnnotatedFile(text), opts);
}

// ---------------------------------------------------------------------------
// Source-to-source desugaring
// ---------------------------------------------------------------------------

namespace {

void collectLoops(const StmtPtr &s, std::vector<StmtPtr> &out) {
  if (!s)
    return;
  if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
    for (const auto &t : x->body)
      collectLoops(t, out);
  } else if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
    collectLoops(x->body, out);
  } else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
    collectLoops(x->thenBranch, out);
    collectLoops(x->elseBranch, out);
  } else if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
    out.push_back(s);
    collectLoops(x->body, out);
  } else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
    out.push_back(s);
    collectLoops(x->body, out);
  } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
    for (const auto &t : x->tryBody)
      collectLoops(t, out);
    for (const auto &t : x->catchBody)
      collectLoops(t, out);
  } else if (const auto *x = std::get_if<LoopScopeStmt>(&s->node)) {
    for (const auto &t : x->body)
      collectLoops(t, out);
  }
}

struct DesugarRewriter {
  const Stmt *target;
  std::string rule;
  FreshNamePool pool;
  bool done = false;

  StmtList transformLoop(const StmtPtr &loop,
                         const std::vector<std::string> &labels) {
    done = true;
    if (rule == rules::pullOutLoopInitializer) {
      const auto *f = as<ForStmt>(loop);
      if (!f || f->init.kind == ForInit::Kind::Empty)
        throw RuleError("pullOutLoopInitializer needs a for-loop with an initializer");
      StmtPtr newFor = mkFor(ForInit::empty(), f->guard, f->update, f->body);
      StmtList blk = initToStmtList(f->init);
      blk.push_back(labels.empty() ? newFor : mkLabeled(labels, newFor));
      return {mkBlock(std::move(blk))};
    }
    if (rule == rules::unwindWhileLoop) {
      const auto *w = as<WhileStmt>(loop);
      if (!w)
        throw RuleError("unwindWhileLoop needs a while-loop");
      std::string x = pool.freshVar("x");
      std::string cont = pool.freshVar("cont");
      StmtList out;
      out.push_back(mkVarDecl(Sort::Bool, x, mkBoolLit(true)));
      out.push_back(mkVarDecl(Sort::Bool, cont, mkBoolLit(false)));
      out.push_back(mkLoopScope(
          x, {scopedIterationIf(w->cond, labels, w->body, x),
              unwindWhileContinuationIf(x, cont)}));
      out.push_back(
          mkIf(mkVar(cont), labels.empty() ? loop : mkLabeled(labels, loop)));
      return out;
    }
    if (rule == rules::unwindForLoop) {
      const auto *f = as<ForStmt>(loop);
      if (!f)
        throw RuleError("unwindForLoop needs a for-loop");
      if (f->init.kind != ForInit::Kind::Empty)
        throw RuleError(
            "unwindForLoop needs an initializer-free for-loop; apply "
            "pullOutLoopInitializer first");
      std::string x = pool.freshVar("x");
      std::string cont = pool.freshVar("cont");
      StmtList out;
      out.push_back(mkVarDecl(Sort::Bool, x, mkBoolLit(true)));
      out.push_back(mkVarDecl(Sort::Bool, cont, mkBoolLit(false)));
      out.push_back(mkLoopScope(
          x, {scopedIterationIf(guardOrTrue(f->guard), labels, f->body, x),
              unwindForContinuationIf(exprListToStmtList(f->update), x, cont)}));
      out.push_back(
          mkIf(mkVar(cont), labels.empty() ? loop : mkLabeled(labels, loop)));
      return out;
    }
    throw RuleError("rule '" + rule + "' is not a source-to-source transform");
  }

  // returns the replacement sequence if `s` (or its labeled wrapping)
  // contains the target at the top
  std::optional<StmtList> matchHere(const StmtPtr &s) {
    if (s.get() == target)
      return transformLoop(s, {});
    if (const auto *l = as<LabeledStmt>(s)) {
      std::vector<std::string> labels = l->labels;
      StmtPtr body = l->body;
      while (const auto *inner = as<LabeledStmt>(body)) {
        labels.insert(labels.end(), inner->labels.begin(), inner->labels.end());
        body = inner->body;
      }
      if (body.get() == target)
        return transformLoop(body, labels);
    }
    return std::nullopt;
  }

  StmtList rewriteSeq(const StmtList &ss) {
    StmtList out;
    for (const auto &s : ss) {
      if (done) {
        out.push_back(s);
        continue;
      }
      if (auto rep = matchHere(s)) {
        out.insert(out.end(), rep->begin(), rep->end());
        continue;
      }
      out.push_back(rewriteStmt(s));
    }
    return out;
  }

  StmtPtr rewriteOne(const StmtPtr &s) {
    if (done)
      return s;
    if (auto rep = matchHere(s))
      return asSingleStmt(*rep);
    return rewriteStmt(s);
  }

  StmtPtr rewriteStmt(const StmtPtr &s) {
    if (done)
      return s;
    if (const auto *x = std::get_if<BlockStmt>(&s->node))
      return mkBlock(rewriteSeq(x->body));
    if (const auto *x = std::get_if<LabeledStmt>(&s->node))
      return mkLabeled(x->labels, rewriteOne(x->body));
    if (const auto *x = std::get_if<IfStmt>(&s->node))
      return mkIf(x->cond, rewriteOne(x->thenBranch),
                  x->elseBranch ? rewriteOne(x->elseBranch) : nullptr);
    if (const auto *x = std::get_if<WhileStmt>(&s->node))
      return mkWhile(x->cond, rewriteOne(x->body));
    if (const auto *x = std::get_if<ForStmt>(&s->node))
      return mkFor(x->init, x->guard, x->update, rewriteOne(x->body));
    if (const auto *x = std::get_if<TryCatchStmt>(&s->node))
      return mkTryCatch(rewriteSeq(x->tryBody), x->catchVar,
                        rewriteSeq(x->catchBody));
    if (const auto *x = std::get_if<LoopScopeStmt>(&s->node))
      return mkLoopScope(x->index, rewriteSeq(x->body));
    return s;
  }
};

} // namespace

std::vector<StmtPtr> loopsInOrder(const StmtList &program) {
  std::vector<StmtPtr> out;
  for (const auto &s : program)
    collectLoops(s, out);
  return out;
}

std::string desugar(const StmtList &program, const std::string &ruleName,
                    std::size_t occurrence) {
  auto loops = loopsInOrder(program);
  if (occurrence < 1 || occurrence > loops.size())
    throw RuleError("no loop occurrence " + std::to_string(occurrence) +
                    " (program has " + std::to_string(loops.size()) + ")");
  DesugarRewriter rw;
  rw.target = loops[occurrence - 1].get();
  rw.rule = ruleName;
  rw.pool.reserveAll(identifiersOfProgram(program));
  rw.pool.reserveAll(labelsOfProgram(program));
  StmtList out = rw.rewriteSeq(program);
  if (!rw.done)
    throw RuleError("internal error: loop occurrence not found");
  return prettyPrintIndented(out);
}

} // namespace lsv
