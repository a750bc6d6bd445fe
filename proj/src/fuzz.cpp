#include "lsv/fuzz.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "lsv/calculus.hpp"
#include "lsv/interp.hpp"
#include "lsv/parser.hpp"
#include "lsv/printer.hpp"

namespace lsv {

// ---------------------------------------------------------------------------
// Random programs
// ---------------------------------------------------------------------------

namespace {
std::uint64_t mix(std::uint64_t &x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d649bb133111ebULL;
  return z ^ (z >> 31);
}

const std::vector<std::string> kIntVars = {"i", "j", "s"};
const std::vector<std::string> kBoolVars = {"b", "c"};
} // namespace

ProgramGen::ProgramGen(std::uint64_t seed, GenOptions opts)
    : state_(seed ^ 0xa5a5a5a5deadbeefULL), opts_(opts) {
  for (const auto &v : kIntVars)
    sorts_[v] = Sort::Int;
  for (const auto &v : kBoolVars)
    sorts_[v] = Sort::Bool;
}

std::uint64_t ProgramGen::nextRaw() { return mix(state_); }
std::uint64_t ProgramGen::below(std::uint64_t n) { return n ? nextRaw() % n : 0; }
std::int64_t ProgramGen::intIn(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
}
bool ProgramGen::coin(double p) {
  return (nextRaw() % 1000000) < static_cast<std::uint64_t>(p * 1000000);
}

ExprPtr ProgramGen::intExpr(int depth) {
  if (depth <= 0 || coin(0.45)) {
    if (coin(0.5))
      return mkIntLit(intIn(-opts_.domainBound, opts_.domainBound));
    return mkVar(kIntVars[below(kIntVars.size())]);
  }
  switch (below(4)) {
  case 0:
    return mkBinary(BinOp::Add, intExpr(depth - 1), intExpr(depth - 1));
  case 1:
    return mkBinary(BinOp::Sub, intExpr(depth - 1), intExpr(depth - 1));
  case 2:
    return mkBinary(BinOp::Mul, intExpr(depth - 1), intExpr(depth - 1));
  default: {
    ExprPtr arg = intExpr(depth - 1);
    if (as<IntLit>(arg))
      return arg; // negated literals fold in the parser
    return mkUnary(UnOp::Neg, arg);
  }
  }
}

ExprPtr ProgramGen::boolExpr(int depth) {
  if (depth <= 0 || coin(0.35)) {
    if (coin(0.3))
      return mkBoolLit(coin(0.5));
    return mkVar(kBoolVars[below(kBoolVars.size())]);
  }
  switch (below(5)) {
  case 0:
    return mkBinary(BinOp::And, boolExpr(depth - 1), boolExpr(depth - 1));
  case 1:
    return mkBinary(BinOp::Or, boolExpr(depth - 1), boolExpr(depth - 1));
  case 2:
    return mkUnary(UnOp::Not, boolExpr(depth - 1));
  case 3: {
    BinOp rel[] = {BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge};
    return mkBinary(rel[below(4)], intExpr(depth - 1), intExpr(depth - 1));
  }
  default: {
    BinOp rel[] = {BinOp::Eq, BinOp::Ne};
    if (coin(0.5))
      return mkBinary(rel[below(2)], intExpr(depth - 1), intExpr(depth - 1));
    return mkBinary(rel[below(2)], mkVar(kBoolVars[below(kBoolVars.size())]),
                    mkVar(kBoolVars[below(kBoolVars.size())]));
  }
  }
}

UpdateExpr ProgramGen::updateExpr() {
  switch (below(3)) {
  case 0:
    return mkUpdIncr(kIntVars[below(kIntVars.size())]);
  case 1:
    return mkUpdDecr(kIntVars[below(kIntVars.size())]);
  default:
    if (coin(0.3))
      return mkUpdAssign(kBoolVars[below(kBoolVars.size())], boolExpr(1));
    return mkUpdAssign(kIntVars[below(kIntVars.size())], intExpr(1));
  }
}

StmtPtr ProgramGen::abruptStmt() {
  std::vector<StmtPtr> options;
  if (loopDepth_ > 0) {
    options.push_back(mkBreak());
    options.push_back(mkContinue());
  }
  for (std::size_t k = 0; k < labelStack_.size(); ++k) {
    options.push_back(mkBreak(labelStack_[k]));
    if (labelIsLoop_[k] || loopDepth_ > 0)
      options.push_back(mkContinue(labelStack_[k]));
  }
  if (opts_.allowThrow)
    options.push_back(mkThrow(intExpr(0)));
  if (options.empty())
    options.push_back(mkSkip());
  return options[below(options.size())];
}

StmtPtr ProgramGen::loopStmt(int depth) {
  std::vector<std::string> labels;
  if (coin(0.5))
    labels.push_back("L" + std::to_string(labelCounter_++));
  for (const auto &l : labels) {
    labelStack_.push_back(l);
    labelIsLoop_.push_back(true);
  }
  ++loopDepth_;
  StmtPtr loop;
  if (coin(0.5)) {
    loop = mkWhile(boolExpr(1), stmt(depth - 1));
  } else {
    ForInit init;
    switch (below(3)) {
    case 0:
      break;
    case 1: {
      std::string name = "d" + std::to_string(declCounter_++);
      init = ForInit::ofDecls({{Sort::Int, name, intExpr(1)}});
      break;
    }
    default:
      init = ForInit::ofExprs({updateExpr()});
      break;
    }
    ExprPtr guard = coin(0.2) ? nullptr : boolExpr(1);
    std::vector<UpdateExpr> upd;
    if (coin(0.8))
      upd.push_back(updateExpr());
    StmtPtr body = stmt(depth - 1);
    if (!guard) // guardless loops need a guaranteed exit
      body = mkBlock({body, mkBreak()});
    loop = mkFor(std::move(init), std::move(guard), std::move(upd), body);
  }
  --loopDepth_;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    labelStack_.pop_back();
    labelIsLoop_.pop_back();
  }
  return labels.empty() ? loop : mkLabeled(labels, loop);
}

namespace {
// a trailing else-less if would capture an `else` on reparse
bool endsInOpenIf(const StmtPtr &s) {
  if (!s)
    return false;
  if (const auto *x = as<IfStmt>(s))
    return x->elseBranch ? endsInOpenIf(x->elseBranch) : true;
  if (const auto *x = as<LabeledStmt>(s))
    return endsInOpenIf(x->body);
  if (const auto *x = as<WhileStmt>(s))
    return endsInOpenIf(x->body);
  if (const auto *x = as<ForStmt>(s))
    return endsInOpenIf(x->body);
  return false;
}
} // namespace

StmtPtr ProgramGen::stmt(int depth) {
  if (depth <= 0) {
    switch (below(4)) {
    case 0:
      return mkAssign(kIntVars[below(kIntVars.size())], intExpr(1));
    case 1:
      return mkAssign(kBoolVars[below(kBoolVars.size())], boolExpr(1));
    case 2:
      return mkExprStmt(coin(0.5) ? mkUpdIncr(kIntVars[below(kIntVars.size())])
                                  : mkUpdDecr(kIntVars[below(kIntVars.size())]));
    default:
      return mkSkip();
    }
  }
  switch (below(10)) {
  case 0:
    return mkAssign(kIntVars[below(kIntVars.size())], intExpr(depth));
  case 1:
    return mkAssign(kBoolVars[below(kBoolVars.size())], boolExpr(depth));
  case 2:
    return mkExprStmt(coin(0.5) ? mkUpdIncr(kIntVars[below(kIntVars.size())])
                                : mkUpdDecr(kIntVars[below(kIntVars.size())]));
  case 3: {
    StmtList body;
    std::size_t n = below(3);
    for (std::size_t k = 0; k < n; ++k)
      body.push_back(stmt(depth - 1));
    return mkBlock(std::move(body));
  }
  case 4: {
    StmtPtr thenB = stmt(depth - 1);
    StmtPtr elseB = coin(0.4) ? stmt(depth - 1) : nullptr;
    if (elseB && endsInOpenIf(thenB))
      thenB = mkBlock({thenB});
    return mkIf(boolExpr(1), std::move(thenB), std::move(elseB));
  }
  case 5:
    if (opts_.allowLoops)
      return loopStmt(depth);
    return stmt(depth - 1);
  case 6: {
    std::string l = "L" + std::to_string(labelCounter_++);
    labelStack_.push_back(l);
    labelIsLoop_.push_back(false);
    StmtPtr body = stmt(depth - 1);
    labelStack_.pop_back();
    labelIsLoop_.pop_back();
    // the parser represents a whole label prefix as one node
    if (const auto *inner = as<LabeledStmt>(body)) {
      std::vector<std::string> labels{l};
      labels.insert(labels.end(), inner->labels.begin(), inner->labels.end());
      return mkLabeled(std::move(labels), inner->body);
    }
    return mkLabeled({l}, body);
  }
  case 7:
    return abruptStmt();
  case 8:
    if (opts_.allowTry && opts_.allowThrow) {
      StmtList tryBody{stmt(depth - 1)};
      if (coin(0.5))
        tryBody.push_back(stmt(depth - 1));
      std::string cv = "e" + std::to_string(declCounter_++);
      return mkTryCatch(std::move(tryBody), cv, {stmt(depth - 1)});
    }
    return stmt(depth - 1);
  default: {
    StmtList body{stmt(depth - 1)};
    if (coin(0.5))
      body.push_back(stmt(depth - 1));
    return mkBlock(std::move(body));
  }
  }
}

StmtList ProgramGen::program(std::size_t maxStmts) {
  StmtList out;
  std::size_t n = 1 + below(maxStmts);
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(stmt(opts_.maxDepth - 1));
  return out;
}

// ---------------------------------------------------------------------------
// Rule-directed fuzzing
// ---------------------------------------------------------------------------

namespace {

ExprPtr termToExpr(const TermPtr &t) {
  if (const auto *x = as<IntConst>(t))
    return mkIntLit(x->value);
  if (const auto *x = as<BoolConst>(t))
    return mkBoolLit(x->value);
  if (const auto *x = as<ProgVar>(t))
    return mkVar(x->name);
  if (const auto *x = as<Arith>(t)) {
    BinOp op = x->op == ArithKind::Add   ? BinOp::Add
               : x->op == ArithKind::Sub ? BinOp::Sub
                                         : BinOp::Mul;
    return mkBinary(op, termToExpr(x->lhs), termToExpr(x->rhs));
  }
  throw RuleError("fresh constant has no program-expression form");
}

/// Wraps core (plus followers) in 0..2 random container frames.
StmtList wrapInFrames(ProgramGen &gen, StmtList core) {
  std::size_t n = gen.below(3);
  for (std::size_t k = 0; k < n; ++k) {
    switch (gen.below(3)) {
    case 0:
      core = {mkBlock(std::move(core))};
      break;
    case 1:
      core = {mkLabeled({"W" + std::to_string(k)}, asSingleStmt(core))};
      break;
    default:
      core = {mkTryCatch(std::move(core), "ew" + std::to_string(k),
                         {gen.stmt(0)})};
      break;
    }
  }
  if (gen.coin(0.6))
    core.push_back(gen.stmt(1));
  return core;
}

Goal goalFor(const StmtList &program, const SortEnv &baseSorts) {
  Goal g;
  g.sequent.succedent.push_back(mkBox(program, mkTrue()));
  g.pool = std::make_shared<FreshNamePool>();
  g.pool->reserveAll(identifiersOfProgram(program));
  g.pool->reserveAll(labelsOfProgram(program));
  auto env = std::make_shared<SortEnv>(baseSorts);
  try {
    for (const auto &[k, v] : inferSorts(program))
      env->emplace(k, v);
  } catch (const ParseError &) {
  }
  g.sorts = env;
  return g;
}

/// A runnable form of one premise: its box program, prefixed by the
/// update extension the rule added (rendered back into statements).
struct PremiseRun {
  StmtList program;
};

PremiseRun premiseRunOf(const Goal &conclusion, const Goal &premise) {
  PremiseRun pr;
  auto gbC = selectBoxFormula(conclusion.sequent);
  auto gbP = selectBoxFormula(premise.sequent);
  if (!gbP)
    return pr;
  std::size_t nC = gbC ? gbC->update.elems.size() : 0;
  const auto &elems = gbP->update.elems;
  StmtList prefix;
  for (std::size_t k = nC; k < elems.size(); ++k)
    prefix.push_back(mkAssign(elems[k].var, termToExpr(elems[k].value)));
  pr.program = prefix;
  pr.program.insert(pr.program.end(), gbP->box->program.begin(),
                    gbP->box->program.end());
  return pr;
}

using StateFilter = std::function<bool(const std::map<std::string, Value> &)>;
using PremiseSelect =
    std::function<std::size_t(const std::map<std::string, Value> &)>;

const StateFilter kAnyState = [](const std::map<std::string, Value> &) {
  return true;
};
const PremiseSelect kFirstPremise =
    [](const std::map<std::string, Value> &) { return std::size_t{0}; };

struct FuzzCtx {
  const FuzzOptions &opts;
  FuzzReport &report;
  SortEnv baseSorts;

  bool matches(const std::string &rule) const {
    if (opts.rule.empty() || opts.rule == rule)
      return true;
    return rule.rfind(opts.rule + "[", 0) == 0;
  }

  SortEnv sortsFor(const StmtList &p1, const StmtList &p2) const {
    StmtList both = p1;
    both.insert(both.end(), p2.begin(), p2.end());
    SortEnv env = baseSorts;
    try {
      for (const auto &[k, v] : inferSorts(both))
        env.emplace(k, v);
    } catch (const ParseError &) {
    }
    return env;
  }

  /// nullopt if equivalent on all sampled states.
  std::optional<FuzzCounterexample>
  compareRuns(const std::string &rule, const StmtList &conclusion,
              const std::vector<PremiseRun> &premises, std::uint64_t seed,
              const StateFilter &condition, const PremiseSelect &select,
              std::size_t *skipped) {
    // compare on variables observable after the program: declared ones are
    // scope-local (the rules turn declarations into updates, so the premise
    // writes an ambient variable of the same name instead)
    std::set<std::string> vars = identifiersOfProgram(conclusion);
    for (const auto &d : declaredVars(conclusion))
      vars.erase(d);
    std::set<std::string> allVars = identifiersOfProgram(conclusion);
    StmtList allPremisePrograms;
    for (const auto &pr : premises) {
      for (const auto &v : identifiersOfProgram(pr.program))
        allVars.insert(v);
      allPremisePrograms.insert(allPremisePrograms.end(), pr.program.begin(),
                                pr.program.end());
    }
    SortEnv sorts = sortsFor(conclusion, allPremisePrograms);

    std::vector<std::string> names(allVars.begin(), allVars.end());
    std::uint64_t rng = seed;
    std::size_t tried = 0;
    for (std::size_t k = 0;
         k < opts.statesPerTrial * 4 && tried < opts.statesPerTrial; ++k) {
      std::map<std::string, Value> init;
      for (const auto &n : names) {
        auto it = sorts.find(n);
        Sort so = it == sorts.end() ? Sort::Int : it->second;
        std::uint64_t r = mix(rng);
        if (so == Sort::Int)
          init[n] = static_cast<std::int64_t>(
                        r % static_cast<std::uint64_t>(2 * opts.domainBound + 1)) -
                    opts.domainBound;
        else
          init[n] = (r & 1) != 0;
      }
      if (!condition(init))
        continue;
      ++tried;

      auto mkCex = [&](const std::string &o1, const std::string &o2,
                       const StmtList &pprog) {
        FuzzCounterexample cex;
        cex.rule = rule;
        cex.conclusionProgram = prettyPrint(conclusion);
        cex.premiseProgram = prettyPrint(pprog);
        std::ostringstream is;
        for (const auto &[k2, v2] : init)
          is << k2 << "=" << valueToString(v2) << " ";
        cex.initialState = is.str();
        cex.outcome1 = o1;
        cex.outcome2 = o2;
        return cex;
      };

      Outcome o1;
      try {
        o1 = run(conclusion, ConcreteState(init), 4096);
      } catch (const EvalError &e) {
        return mkCex(std::string("evaluation error: ") + e.what(), "", {});
      }

      if (premises.empty()) {
        // closing rule: the conclusion must terminate abruptly by exception
        if (o1.kind == Outcome::Kind::FuelExhausted) {
          if (skipped)
            ++*skipped;
          continue;
        }
        if (o1.kind != Outcome::Kind::Exception)
          return mkCex(outcomeToString(o1), "goal closed by rule", {});
        continue;
      }

      std::size_t which = select(init);
      if (which >= premises.size())
        continue;
      const PremiseRun &pr = premises[which];

      Outcome o2;
      try {
        o2 = run(pr.program, ConcreteState(init), 4096);
      } catch (const EvalError &e) {
        return mkCex(outcomeToString(o1),
                     std::string("evaluation error: ") + e.what(), pr.program);
      }
      if (o1.kind == Outcome::Kind::FuelExhausted ||
          o2.kind == Outcome::Kind::FuelExhausted) {
        if (skipped)
          ++*skipped;
        continue;
      }
      bool same = o1.kind == o2.kind && o1.label == o2.label &&
                  o1.thrown == o2.thrown;
      if (same) {
        auto f1 = o1.state.flatten();
        auto f2 = o2.state.flatten();
        for (const auto &v : vars) {
          auto i1 = f1.find(v);
          auto i2 = f2.find(v);
          if ((i1 == f1.end()) != (i2 == f2.end()) ||
              (i1 != f1.end() && i1->second != i2->second)) {
            same = false;
            break;
          }
        }
      }
      if (!same)
        return mkCex(outcomeToString(o1), outcomeToString(o2), pr.program);
    }
    return std::nullopt;
  }
};

void deletionVariantsInto(const StmtList &prog, std::vector<StmtList> &out) {
  for (std::size_t k = 0; k < prog.size(); ++k) {
    StmtList v = prog;
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(k));
    out.push_back(std::move(v));
  }
  for (std::size_t k = 0; k < prog.size(); ++k) {
    const StmtPtr &s = prog[k];
    auto withInner = [&](StmtPtr replacement) {
      StmtList v = prog;
      v[k] = std::move(replacement);
      out.push_back(std::move(v));
    };
    if (const auto *x = as<BlockStmt>(s)) {
      std::vector<StmtList> inner;
      deletionVariantsInto(x->body, inner);
      for (auto &b : inner)
        withInner(mkBlock(std::move(b)));
    } else if (const auto *x = as<LabeledStmt>(s)) {
      std::vector<StmtList> inner;
      deletionVariantsInto(stmtsOf(x->body), inner);
      for (auto &b : inner)
        withInner(mkLabeled(x->labels, asSingleStmt(b)));
    } else if (const auto *x = as<LoopScopeStmt>(s)) {
      std::vector<StmtList> inner;
      deletionVariantsInto(x->body, inner);
      for (auto &b : inner)
        withInner(mkLoopScope(x->index, std::move(b)));
    } else if (const auto *x = as<TryCatchStmt>(s)) {
      std::vector<StmtList> inner;
      deletionVariantsInto(x->tryBody, inner);
      for (auto &b : inner)
        withInner(mkTryCatch(std::move(b), x->catchVar, x->catchBody));
    } else if (const auto *x = as<IfStmt>(s)) {
      std::vector<StmtList> inner;
      deletionVariantsInto(stmtsOf(x->thenBranch), inner);
      for (auto &b : inner)
        withInner(mkIf(x->cond, asSingleStmt(b), x->elseBranch));
    }
  }
}

} // namespace

std::vector<StmtList> deletionVariants(const StmtList &program) {
  std::vector<StmtList> out;
  deletionVariantsInto(program, out);
  return out;
}

std::vector<std::string> fuzzableRules() {
  return {
      "applyBasicSE[skip]",       "applyBasicSE[assign]",
      "applyBasicSE[incrdecr]",   "applyBasicSE[boolsplit]",
      "applyBasicSE[vardecl]",    "applyBasicSE[if]",
      "applyBasicSE[emptyblock]", "applyBasicSE[break]",
      "applyBasicSE[continue]",   "applyBasicSE[throw]",
      "applyBasicSE[trycatch]",   rules::emptyIndexedLoopScope,
      rules::continueIndexedLoopScope, rules::breakIndexedLoopScope,
      rules::pullOutLoopInitializer,   rules::unwindWhileLoop,
      rules::unwindForLoop,
  };
}

FuzzReport fuzzRules(const FuzzOptions &opts) {
  if (!opts.rule.empty()) {
    bool known = opts.rule == "applyBasicSE";
    for (const auto &r : fuzzableRules())
      known = known || r == opts.rule;
    if (!known)
      throw std::invalid_argument("unknown rule '" + opts.rule + "'");
  }
  FuzzReport report;
  SortEnv baseSorts;
  for (const auto &v : kIntVars)
    baseSorts[v] = Sort::Int;
  for (const auto &v : kBoolVars)
    baseSorts[v] = Sort::Bool;
  baseSorts["x0"] = Sort::Bool;
  FuzzCtx ctx{opts, report, baseSorts};

  using Apply = std::function<RuleResult(const Goal &)>;

  // run one program through a rule and compare premise(s) vs conclusion
  auto tryProgram = [&](const std::string &rule, const StmtList &program,
                        const Apply &apply, const StateFilter &condition,
                        const PremiseSelect &select, std::uint64_t seed,
                        bool countSkips) -> std::optional<FuzzCounterexample> {
    Goal g = goalFor(program, ctx.baseSorts);
    RuleResult res;
    try {
      res = apply(g);
    } catch (const RuleError &e) {
      FuzzCounterexample cex;
      cex.rule = rule;
      cex.conclusionProgram = prettyPrint(program);
      cex.outcome2 = std::string("rule error: ") + e.what();
      return cex;
    }
    std::vector<PremiseRun> runs;
    try {
      for (const auto &p : res.premises)
        runs.push_back(premiseRunOf(g, p));
    } catch (const RuleError &e) {
      FuzzCounterexample cex;
      cex.rule = rule;
      cex.conclusionProgram = prettyPrint(program);
      cex.outcome2 = std::string("premise extraction: ") + e.what();
      return cex;
    }
    std::size_t skipped = 0;
    auto cex = ctx.compareRuns(rule, program, runs, seed, condition, select,
                               countSkips ? &skipped : nullptr);
    if (countSkips)
      report.skippedStates[rule] += skipped;
    return cex;
  };

  auto applyAndCompare = [&](const std::string &rule, StmtList program,
                             const Apply &apply, const StateFilter &condition,
                             const PremiseSelect &select,
                             std::uint64_t seed) -> bool {
    auto cex = tryProgram(rule, program, apply, condition, select, seed, true);
    if (!cex)
      return true;
    if (opts.minimize) {
      // greedy statement deletion while a semantic mismatch persists;
      // variants that break rule applicability are skipped
      auto isSemantic = [](const FuzzCounterexample &c) {
        return c.outcome2.rfind("rule error", 0) != 0 &&
               c.outcome2.rfind("premise extraction", 0) != 0;
      };
      bool shrunk = isSemantic(*cex);
      std::size_t attempts = 0;
      while (shrunk && attempts < 400) {
        shrunk = false;
        std::vector<StmtList> variants = deletionVariants(program);
        for (const auto &v : variants) {
          if (++attempts >= 400)
            break;
          auto c2 = tryProgram(rule, v, apply, condition, select, seed, false);
          if (c2 && isSemantic(*c2)) {
            program = v;
            cex = c2;
            shrunk = true;
            break;
          }
        }
      }
    }
    report.counterexamples.push_back(*cex);
    report.failed = true;
    return false;
  };

  auto runTrials = [&](const std::string &rule,
                       const std::function<bool(std::uint64_t)> &oneTrial) {
    if (!ctx.matches(rule))
      return;
    for (std::size_t t = 0; t < opts.trials; ++t) {
      report.trialsPerRule[rule] += 1;
      if (!oneTrial(opts.seed * 1000003ULL + t * 2654435761ULL))
        return;
    }
  };

  // ---- basic symbolic execution cases ------------------------------------

  runTrials("applyBasicSE[skip]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    StmtList prog = wrapInFrames(gen, {mkSkip(), gen.stmt(1)});
    return applyAndCompare("applyBasicSE[skip]", prog, applyBasicSE, kAnyState,
                           kFirstPremise, seed);
  });

  runTrials("applyBasicSE[assign]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    StmtPtr a = gen.coin(0.5) ? mkAssign("i", gen.intExpr(2))
                              : mkAssign("b", gen.coin(0.5) ? mkVar("c")
                                                            : mkBoolLit(true));
    StmtList prog = wrapInFrames(gen, {a, gen.stmt(1)});
    return applyAndCompare("applyBasicSE[assign]", prog, applyBasicSE,
                           kAnyState, kFirstPremise, seed);
  });

  runTrials("applyBasicSE[incrdecr]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    UpdateExpr e = gen.coin(0.5) ? mkUpdIncr("i") : mkUpdDecr("j");
    StmtList prog = wrapInFrames(gen, {mkExprStmt(e), gen.stmt(1)});
    return applyAndCompare("applyBasicSE[incrdecr]", prog, applyBasicSE,
                           kAnyState, kFirstPremise, seed);
  });

  runTrials("applyBasicSE[boolsplit]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    ExprPtr rhs = gen.boolExpr(2);
    if (exprToTerm(rhs)) // force a compound boolean right-hand side
      rhs = mkBinary(BinOp::Or, rhs, mkBinary(BinOp::Lt, mkVar("i"), mkVar("j")));
    StmtList prog = wrapInFrames(gen, {mkAssign("b", rhs), gen.stmt(1)});
    SortEnv sorts = ctx.baseSorts;
    PremiseSelect select = [rhs, sorts](const std::map<std::string, Value> &init) {
      return evalFormula(exprToFormula(rhs, sorts), init) ? std::size_t{0}
                                                          : std::size_t{1};
    };
    return applyAndCompare("applyBasicSE[boolsplit]", prog, applyBasicSE,
                           kAnyState, select, seed);
  });

  runTrials("applyBasicSE[vardecl]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    std::string name = "d" + std::to_string(gen.below(2) + 5);
    StmtPtr d = mkVarDecl(Sort::Int, name, gen.intExpr(2));
    StmtList prog = wrapInFrames(
        gen,
        {d, mkAssign(name, mkBinary(BinOp::Add, mkVar(name), mkIntLit(1))),
         mkAssign("s", mkVar(name))});
    return applyAndCompare("applyBasicSE[vardecl]", prog, applyBasicSE,
                           kAnyState, kFirstPremise, seed);
  });

  runTrials("applyBasicSE[if]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    ExprPtr cond = gen.boolExpr(2);
    StmtPtr elseB = gen.coin(0.5) ? gen.stmt(1) : nullptr;
    StmtList prog =
        wrapInFrames(gen, {mkIf(cond, gen.stmt(1), elseB), gen.stmt(1)});
    SortEnv sorts = ctx.baseSorts;
    PremiseSelect select = [cond, sorts](const std::map<std::string, Value> &init) {
      return evalFormula(exprToFormula(cond, sorts), init) ? std::size_t{0}
                                                           : std::size_t{1};
    };
    return applyAndCompare("applyBasicSE[if]", prog, applyBasicSE, kAnyState,
                           select, seed);
  });

  runTrials("applyBasicSE[emptyblock]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    StmtPtr empty =
        gen.coin(0.5) ? mkBlock({}) : mkLabeled({"LE"}, mkBlock({}));
    StmtList prog = wrapInFrames(gen, {empty, gen.stmt(1)});
    return applyAndCompare("applyBasicSE[emptyblock]", prog, applyBasicSE,
                           kAnyState, kFirstPremise, seed);
  });

  runTrials("applyBasicSE[break]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    std::string lbl = "LB";
    StmtPtr brk = gen.coin(0.5) ? mkBreak() : mkBreak(lbl);
    StmtList inner{brk, gen.stmt(1)};
    StmtPtr frame =
        gen.coin(0.5) ? mkBlock(inner) : mkTryCatch(inner, "e9", {gen.stmt(1)});
    StmtList prog{mkLoopScope(
        "x0", {mkLabeled({lbl}, mkBlock({frame, gen.stmt(1)})), gen.stmt(1)}),
        gen.stmt(1)};
    return applyAndCompare("applyBasicSE[break]", prog, applyBasicSE,
                           kAnyState, kFirstPremise, seed);
  });

  runTrials("applyBasicSE[continue]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    std::string lbl = "LC";
    StmtPtr cnt = gen.coin(0.5) ? mkContinue() : mkContinue(lbl);
    StmtList inner{cnt, gen.stmt(1)};
    StmtPtr frame =
        gen.coin(0.5) ? mkBlock(inner) : mkLabeled({lbl}, mkBlock(inner));
    StmtList prog{mkLoopScope("x0", {mkBlock({frame, gen.stmt(1)}), gen.stmt(1)}),
                  gen.stmt(1)};
    return applyAndCompare("applyBasicSE[continue]", prog, applyBasicSE,
                           kAnyState, kFirstPremise, seed);
  });

  runTrials("applyBasicSE[throw]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    switch (gen.below(3)) {
    case 0: {
      // top-level throw: the rule closes the goal
      StmtList prog{mkThrow(gen.intExpr(1)), gen.stmt(1)};
      return applyAndCompare("applyBasicSE[throw]", prog, applyBasicSE,
                             kAnyState, kFirstPremise, seed);
    }
    case 1: {
      // throw propagating out of one frame
      StmtList inner{mkThrow(gen.intExpr(1)), gen.stmt(1)};
      StmtPtr frame =
          gen.coin(0.5) ? mkBlock(inner) : mkLabeled({"LT"}, mkBlock(inner));
      StmtList prog{mkTryCatch({frame, gen.stmt(1)}, "e8", {gen.stmt(1)}),
                    gen.stmt(1)};
      return applyAndCompare("applyBasicSE[throw]", prog, applyBasicSE,
                             kAnyState, kFirstPremise, seed);
    }
    default: {
      // throw escaping a loop scope: the index stays untouched
      StmtList prog{
          mkLoopScope("x0", {mkThrow(gen.intExpr(1)), gen.stmt(1)}),
          gen.stmt(1)};
      prog = {mkTryCatch(prog, "e8", {mkAssign("s", mkVar("e8"))})};
      return applyAndCompare("applyBasicSE[throw]", prog, applyBasicSE,
                             kAnyState, kFirstPremise, seed);
    }
    }
  });

  runTrials("applyBasicSE[trycatch]", [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    StmtList prog = wrapInFrames(
        gen, {mkTryCatch({mkThrow(gen.intExpr(1)), gen.stmt(1)}, "e7",
                         {gen.stmt(1), mkAssign("s", mkVar("e7"))}),
              gen.stmt(1)});
    return applyAndCompare("applyBasicSE[trycatch]", prog, applyBasicSE,
                           kAnyState, kFirstPremise, seed);
  });

  // ---- loop scope rules ----------------------------------------------------

  runTrials(rules::emptyIndexedLoopScope, [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    StmtList prog = wrapInFrames(gen, {mkLoopScope("x0", {}), gen.stmt(1)});
    Goal g = goalFor(prog, ctx.baseSorts);
    RuleResult res;
    try {
      res = emptyIndexedLoopScope(g);
    } catch (const RuleError &e) {
      report.failed = true;
      report.counterexamples.push_back({rules::emptyIndexedLoopScope,
                                        prettyPrint(prog), "", "", "",
                                        std::string("rule error: ") + e.what()});
      return false;
    }
    // premise: {U}((x0 = TRUE -> [pi omega]post) & (x0 = FALSE -> post));
    // only the x0 = TRUE branch carries a program. The x0 = FALSE branch
    // discards the context by construction of the loop rules, so the
    // program comparison is conditioned on x0 = true.
    StmtList branchProg;
    const auto &pf = res.premises.at(0).sequent.succedent.at(0);
    const FormulaPtr target = as<UpdAppF>(pf) ? as<UpdAppF>(pf)->target : pf;
    if (const auto *conj = as<AndF>(target))
      if (const auto *imp = as<ImpF>(conj->lhs))
        if (const auto *bx = as<BoxF>(imp->rhs))
          branchProg = bx->program;
    PremiseRun pr;
    pr.program = branchProg;
    StateFilter condition = [](const std::map<std::string, Value> &init) {
      auto it = init.find("x0");
      return it != init.end() && std::get<bool>(it->second);
    };
    std::size_t skipped = 0;
    auto cex = ctx.compareRuns(rules::emptyIndexedLoopScope, prog, {pr}, seed,
                               condition, kFirstPremise, &skipped);
    report.skippedStates[rules::emptyIndexedLoopScope] += skipped;
    if (cex) {
      report.counterexamples.push_back(*cex);
      report.failed = true;
      return false;
    }
    return true;
  });

  runTrials(rules::continueIndexedLoopScope, [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    StmtList scopeBody{mkContinue()};
    std::size_t n = gen.below(3);
    for (std::size_t k = 0; k < n; ++k)
      scopeBody.push_back(gen.stmt(1));
    StmtList prog =
        wrapInFrames(gen, {mkLoopScope("x0", scopeBody), gen.stmt(1)});
    return applyAndCompare(rules::continueIndexedLoopScope, prog,
                           continueIndexedLoopScope, kAnyState, kFirstPremise,
                           seed);
  });

  runTrials(rules::breakIndexedLoopScope, [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    StmtList scopeBody{mkBreak()};
    std::size_t n = gen.below(3);
    for (std::size_t k = 0; k < n; ++k)
      scopeBody.push_back(gen.stmt(1));
    StmtList prog =
        wrapInFrames(gen, {mkLoopScope("x0", scopeBody), gen.stmt(1)});
    return applyAndCompare(rules::breakIndexedLoopScope, prog,
                           breakIndexedLoopScope, kAnyState, kFirstPremise,
                           seed);
  });

  // ---- loop rewriting rules -------------------------------------------------

  runTrials(rules::pullOutLoopInitializer, [&](std::uint64_t seed) {
    ProgramGen gen(seed);
    ForInit init =
        gen.coin(0.5)
            ? ForInit::ofDecls(
                  {{Sort::Int, "d" + std::to_string(gen.below(2)), gen.intExpr(1)}})
            : ForInit::ofExprs({gen.updateExpr()});
    ExprPtr guard = gen.coin(0.2) ? nullptr : gen.boolExpr(1);
    StmtPtr body = gen.stmt(2);
    if (!guard)
      body = mkBlock({body, mkBreak()});
    StmtPtr f = mkFor(init, guard, {gen.updateExpr()}, body);
    StmtPtr labeled = gen.coin(0.5) ? mkLabeled({"LP"}, f) : f;
    StmtList prog = wrapInFrames(gen, {labeled, gen.stmt(1)});
    return applyAndCompare(rules::pullOutLoopInitializer, prog,
                           pullOutLoopInitializer, kAnyState, kFirstPremise,
                           seed);
  });

  auto unwindTrial = [&](bool isFor, const std::string &rule,
                         std::uint64_t seed) {
    ProgramGen gen(seed);
    StmtPtr loop;
    {
      ProgramGen bodyGen(seed ^ 0x5151);
      StmtList body = stmtsOf(bodyGen.stmt(2));
      if (bodyGen.coin(0.6)) {
        switch (bodyGen.below(3)) {
        case 0:
          body.push_back(mkIf(bodyGen.boolExpr(1), mkBreak()));
          break;
        case 1:
          body.push_back(mkIf(bodyGen.boolExpr(1), mkContinue()));
          break;
        default:
          body.push_back(
              mkIf(bodyGen.boolExpr(1), mkThrow(bodyGen.intExpr(0))));
          break;
        }
      }
      if (isFor) {
        ExprPtr guard = bodyGen.coin(0.25) ? nullptr : bodyGen.boolExpr(1);
        std::vector<UpdateExpr> upd{bodyGen.updateExpr()};
        if (!guard)
          body.push_back(mkBreak());
        loop = mkFor(ForInit::empty(), guard, upd, mkBlock(body));
      } else {
        loop = mkWhile(bodyGen.boolExpr(1), mkBlock(body));
      }
    }
    StmtPtr labeled = gen.coin(0.5) ? mkLabeled({"LU"}, loop) : loop;
    StmtList prog = wrapInFrames(gen, {labeled, gen.stmt(1)});
    Apply apply = [isFor](const Goal &g) {
      return isFor ? unwindForLoop(g) : unwindWhileLoop(g);
    };
    return applyAndCompare(rule, prog, apply, kAnyState, kFirstPremise, seed);
  };

  runTrials(rules::unwindWhileLoop, [&](std::uint64_t seed) {
    return unwindTrial(false, rules::unwindWhileLoop, seed);
  });
  runTrials(rules::unwindForLoop, [&](std::uint64_t seed) {
    return unwindTrial(true, rules::unwindForLoop, seed);
  });

  return report;
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

VerdictReport FuzzReport::toVerdictReport() const {
  VerdictReport r;
  r.verdict = failed ? Verdict::Refuted : Verdict::Proved;
  for (const auto &[k, v] : trialsPerRule)
    r.ruleApplications[k] = v;
  r.refutedLeaves = counterexamples.size();
  return r;
}

std::string FuzzReport::render() const {
  std::ostringstream os;
  os << "verdict: " << (failed ? "counterexample" : "ok") << "\n";
  for (const auto &[k, v] : trialsPerRule) {
    os << "rule." << k << ".trials: " << v << "\n";
    auto it = skippedStates.find(k);
    if (it != skippedStates.end())
      os << "rule." << k << ".skipped-states: " << it->second << "\n";
  }
  os << "counterexamples: " << counterexamples.size() << "\n";
  for (const auto &c : counterexamples) {
    os << "cex.rule: " << c.rule << "\n";
    os << "cex.conclusion: " << c.conclusionProgram << "\n";
    os << "cex.premise: " << c.premiseProgram << "\n";
    os << "cex.state: " << c.initialState << "\n";
    os << "cex.outcome.conclusion: " << c.outcome1 << "\n";
    os << "cex.outcome.premise: " << c.outcome2 << "\n";
  }
  return os.str();
}

} // namespace lsv
