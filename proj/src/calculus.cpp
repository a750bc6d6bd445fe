#include "lsv/calculus.hpp"

#include <algorithm>
#include <cassert>

namespace lsv {

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

StmtList Frame::wrap(StmtList inner) const {
  switch (kind) {
  case Kind::Block:
    if (inner.empty())
      return {};
    return {mkBlock(std::move(inner))};
  case Kind::Labeled:
    if (inner.empty())
      return {};
    return {mkLabeled(labels, asSingleStmt(inner))};
  case Kind::Try:
    if (inner.empty())
      return {};
    return {mkTryCatch(std::move(inner), catchVar, catchBody)};
  case Kind::LoopScope:
    // a loop scope is kept even when empty: emptiness carries meaning
    return {mkLoopScope(scopeIndex, std::move(inner))};
  }
  return {};
}

namespace {

void decomposeInto(const StmtList &seq, ActiveDecomposition &out) {
  assert(!seq.empty());
  const StmtPtr head = seq.front();
  StmtList tail(seq.begin() + 1, seq.end());
  if (const auto *b = as<BlockStmt>(head)) {
    if (!b->body.empty()) {
      Frame f;
      f.kind = Frame::Kind::Block;
      f.followers = std::move(tail);
      out.prefix.push_back(std::move(f));
      decomposeInto(b->body, out);
      return;
    }
  } else if (const auto *l = as<LabeledStmt>(head)) {
    Frame f;
    f.kind = Frame::Kind::Labeled;
    f.labels = l->labels;
    f.followers = std::move(tail);
    out.prefix.push_back(std::move(f));
    decomposeInto({l->body}, out);
    return;
  } else if (const auto *t = as<TryCatchStmt>(head)) {
    if (!t->tryBody.empty()) {
      Frame f;
      f.kind = Frame::Kind::Try;
      f.catchVar = t->catchVar;
      f.catchBody = t->catchBody;
      f.followers = std::move(tail);
      out.prefix.push_back(std::move(f));
      decomposeInto(t->tryBody, out);
      return;
    }
  } else if (const auto *ls = as<LoopScopeStmt>(head)) {
    if (!ls->body.empty()) {
      Frame f;
      f.kind = Frame::Kind::LoopScope;
      f.scopeIndex = ls->index;
      f.followers = std::move(tail);
      out.prefix.push_back(std::move(f));
      decomposeInto(ls->body, out);
      return;
    }
  }
  out.active = head;
  out.rest = std::move(tail);
}

StmtList concat(StmtList a, const StmtList &b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

} // namespace

ActiveDecomposition locateActiveStatement(const StmtList &program) {
  if (program.empty())
    throw RuleError("empty program has no active statement");
  ActiveDecomposition out;
  decomposeInto(program, out);
  return out;
}

StmtList ActiveDecomposition::rebuild(StmtList innerSeq) const {
  StmtList seq = std::move(innerSeq);
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
    seq = concat(it->wrap(std::move(seq)), it->followers);
  return seq;
}

StmtList ActiveDecomposition::rebuildDropFrames(std::size_t drop,
                                                StmtList seq) const {
  assert(drop <= prefix.size());
  for (std::size_t k = prefix.size() - drop; k-- > 0;)
    seq = concat(prefix[k].wrap(std::move(seq)), prefix[k].followers);
  return seq;
}

std::size_t ActiveDecomposition::activeLabelFrames() const {
  std::size_t k = 0;
  while (k < prefix.size() &&
         prefix[prefix.size() - 1 - k].kind == Frame::Kind::Labeled)
    ++k;
  return k;
}

std::vector<std::string> ActiveDecomposition::activeLabels() const {
  std::vector<std::string> out;
  std::size_t k = activeLabelFrames();
  for (std::size_t i = prefix.size() - k; i < prefix.size(); ++i)
    out.insert(out.end(), prefix[i].labels.begin(), prefix[i].labels.end());
  return out;
}

StmtList ActiveDecomposition::rebuildReplacingLabeledActive(StmtList seq) const {
  std::size_t k = activeLabelFrames();
  if (k == 0)
    return rebuild(concat(std::move(seq), rest));
  assert(rest.empty()); // label wrappers hold a single statement
  const Frame &outermostConsumed = prefix[prefix.size() - k];
  return rebuildDropFrames(k, concat(std::move(seq), outermostConsumed.followers));
}

ActiveKind classifyActive(const ActiveDecomposition &dec) {
  const StmtPtr &a = dec.active;
  // a loop scope can only be active when its body is empty
  if (is<LoopScopeStmt>(a))
    return ActiveKind::EmptyLoopScope;
  const Frame *inner = dec.innermostFrame();
  bool innerIsScope = inner && inner->kind == Frame::Kind::LoopScope;
  if (const auto *c = as<ContinueStmt>(a); c && !c->label && innerIsScope)
    return ActiveKind::ContinueLoopScope;
  if (const auto *b = as<BreakStmt>(a); b && !b->label && innerIsScope)
    return ActiveKind::BreakLoopScope;
  if (is<WhileStmt>(a))
    return ActiveKind::AtWhile;
  if (is<ForStmt>(a))
    return ActiveKind::AtFor;
  return ActiveKind::BasicSE;
}

// ---------------------------------------------------------------------------
// Goal plumbing
// ---------------------------------------------------------------------------

std::optional<GoalBox> selectBoxFormula(const Sequent &s) {
  for (std::size_t i = 0; i < s.succedent.size(); ++i) {
    const FormulaPtr &f = s.succedent[i];
    if (const auto *b = as<BoxF>(f))
      return GoalBox{i, Update{}, b};
    if (const auto *ua = as<UpdAppF>(f))
      if (const auto *b = as<BoxF>(ua->target))
        return GoalBox{i, ua->update, b};
  }
  return std::nullopt;
}

bool sequentContainsBox(const Sequent &s) {
  for (const auto &f : s.succedent)
    if (containsBox(f))
      return true;
  for (const auto &f : s.antecedent)
    if (containsBox(f))
      return true;
  return false;
}

namespace {

Goal premise(const Goal &g, const char *rule) {
  Goal p = g;
  p.trace.push_back(rule);
  return p;
}

void setSucc(Goal &g, std::size_t idx, FormulaPtr f) {
  g.sequent.succedent[idx] = std::move(f);
}

void addAnte(Goal &g, FormulaPtr f) {
  g.sequent.antecedent.push_back(std::move(f));
}

GoalBox needBox(const Goal &g) {
  auto gb = selectBoxFormula(g.sequent);
  if (!gb)
    throw RuleError("goal has no modality to execute");
  return *gb;
}

FormulaPtr atomIs(const std::string &var, bool v) {
  return mkAtom(RelOp::Eq, mkProgVar(var), v ? trueConst() : falseConst());
}

std::shared_ptr<const SortEnv>
withBoolSorts(const std::shared_ptr<const SortEnv> &base,
              std::initializer_list<std::string> names) {
  auto next = std::make_shared<SortEnv>(base ? *base : SortEnv{});
  for (const auto &n : names)
    (*next)[n] = Sort::Bool;
  return next;
}

const SortEnv &sortsOf(const Goal &g) {
  static const SortEnv empty;
  return g.sorts ? *g.sorts : empty;
}

} // namespace

// ---------------------------------------------------------------------------
// Premise program builders
// ---------------------------------------------------------------------------

StmtPtr scopedIterationIf(const ExprPtr &guard,
                          const std::vector<std::string> &labels,
                          const StmtPtr &body, const std::string &x) {
  StmtList wrapped = stmtsOf(body);
  wrapped.push_back(mkAssign(x, mkBoolLit(false)));
  StmtPtr blk = mkBlock(std::move(wrapped));
  StmtPtr thenS = labels.empty() ? blk : mkLabeled(labels, blk);
  return mkIf(guard, std::move(thenS));
}

StmtPtr invariantForUpdateIf(const StmtList &updStmts, const std::string &x) {
  StmtList blk;
  blk.push_back(mkAssign(x, mkBoolLit(true)));
  blk.insert(blk.end(), updStmts.begin(), updStmts.end());
  blk.push_back(mkAssign(x, mkBoolLit(false)));
  return mkIf(mkUnary(UnOp::Not, mkVar(x)), mkBlock(std::move(blk)));
}

StmtPtr unwindWhileContinuationIf(const std::string &x,
                                  const std::string &cont) {
  StmtList blk;
  blk.push_back(mkAssign(x, mkBoolLit(true)));
  blk.push_back(mkAssign(cont, mkBoolLit(true)));
  return mkIf(mkUnary(UnOp::Not, mkVar(x)), mkBlock(std::move(blk)));
}

StmtPtr unwindForContinuationIf(const StmtList &updStmts, const std::string &x,
                                const std::string &cont) {
  StmtList blk;
  blk.push_back(mkAssign(x, mkBoolLit(true)));
  blk.insert(blk.end(), updStmts.begin(), updStmts.end());
  // cont is set last: an exception in the update list leaves x true and
  // cont false
  blk.push_back(mkAssign(cont, mkBoolLit(true)));
  return mkIf(mkUnary(UnOp::Not, mkVar(x)), mkBlock(std::move(blk)));
}

// ---------------------------------------------------------------------------
// Basic symbolic execution
// ---------------------------------------------------------------------------

namespace {

/// premise with the box program replaced, update unchanged
Goal withProgram(const Goal &g, const GoalBox &gb, StmtList newProg,
                 const char *rule) {
  Goal p = premise(g, rule);
  setSucc(p, gb.succIndex, mkUpdApp(gb.update, mkBox(std::move(newProg), gb.box->post)));
  return p;
}

/// premise with the pending update extended by `var := value-under-U`
Goal withUpdateExtension(const Goal &g, const GoalBox &gb, StmtList newProg,
                         const std::string &var, const TermPtr &value,
                         const char *rule) {
  Goal p = premise(g, rule);
  Update next =
      parallelCompose(gb.update, Update::elem(var, applyUpdate(gb.update, value)));
  setSucc(p, gb.succIndex,
          mkUpdApp(std::move(next), mkBox(std::move(newProg), gb.box->post)));
  return p;
}

} // namespace

RuleResult applyBasicSE(const Goal &g) {
  GoalBox gb = needBox(g);
  ActiveDecomposition dec = locateActiveStatement(gb.box->program);
  const StmtPtr &a = dec.active;
  RuleResult res;
  res.ruleName = rules::applyBasicSE;

  switch (classifyActive(dec)) {
  case ActiveKind::BasicSE:
    break;
  case ActiveKind::EmptyLoopScope:
    throw RuleError("emptyIndexedLoopScope applies here");
  case ActiveKind::ContinueLoopScope:
    throw RuleError("continueIndexedLoopScope applies here");
  case ActiveKind::BreakLoopScope:
    throw RuleError("breakIndexedLoopScope applies here");
  case ActiveKind::AtWhile:
  case ActiveKind::AtFor:
    throw RuleError("a loop rule applies here");
  }

  if (is<SkipStmt>(a) || (is<BlockStmt>(a)) || is<TryCatchStmt>(a)) {
    // skip, empty block, or empty try-catch: dissolve
    res.premises.push_back(
        withProgram(g, gb, dec.rebuild(dec.rest), rules::applyBasicSE));
    return res;
  }

  if (const auto *x = as<VarDeclStmt>(a)) {
    TermPtr t = exprToTerm(x->init);
    if (t) {
      res.premises.push_back(withUpdateExtension(
          g, gb, dec.rebuild(dec.rest), x->name, t, rules::applyBasicSE));
      return res;
    }
    // compound boolean initializer: split on its value
    FormulaPtr cond = exprToFormula(x->init, sortsOf(g));
    Goal pT = withUpdateExtension(g, gb, dec.rebuild(dec.rest), x->name,
                                  trueConst(), rules::applyBasicSE);
    addAnte(pT, applyUpdate(gb.update, cond));
    Goal pF = withUpdateExtension(g, gb, dec.rebuild(dec.rest), x->name,
                                  falseConst(), rules::applyBasicSE);
    addAnte(pF, applyUpdate(gb.update, mkNot(cond)));
    res.premises = {std::move(pT), std::move(pF)};
    return res;
  }

  auto assignLike = [&](const std::string &target, const ExprPtr &rhs) {
    TermPtr t = exprToTerm(rhs);
    if (t) {
      res.premises.push_back(withUpdateExtension(
          g, gb, dec.rebuild(dec.rest), target, t, rules::applyBasicSE));
      return;
    }
    FormulaPtr cond = exprToFormula(rhs, sortsOf(g));
    Goal pT = withUpdateExtension(g, gb, dec.rebuild(dec.rest), target,
                                  trueConst(), rules::applyBasicSE);
    addAnte(pT, applyUpdate(gb.update, cond));
    Goal pF = withUpdateExtension(g, gb, dec.rebuild(dec.rest), target,
                                  falseConst(), rules::applyBasicSE);
    addAnte(pF, applyUpdate(gb.update, mkNot(cond)));
    res.premises = {std::move(pT), std::move(pF)};
  };

  if (const auto *x = as<AssignStmt>(a)) {
    assignLike(x->target, x->rhs);
    return res;
  }

  if (const auto *x = as<ExprStmt>(a)) {
    if (const auto *asg = std::get_if<UpdAssign>(&x->expr.node)) {
      assignLike(asg->target, asg->rhs);
      return res;
    }
    const bool incr = std::holds_alternative<UpdIncr>(x->expr.node);
    const std::string &target = incr ? std::get<UpdIncr>(x->expr.node).target
                                     : std::get<UpdDecr>(x->expr.node).target;
    TermPtr t = mkArith(incr ? ArithKind::Add : ArithKind::Sub,
                        mkProgVar(target), mkIntConst(1));
    res.premises.push_back(withUpdateExtension(
        g, gb, dec.rebuild(dec.rest), target, t, rules::applyBasicSE));
    return res;
  }

  if (const auto *x = as<IfStmt>(a)) {
    FormulaPtr cond = exprToFormula(x->cond, sortsOf(g));
    StmtList thenProg = dec.rebuild(concat({x->thenBranch}, dec.rest));
    StmtList elseProg = dec.rebuild(
        x->elseBranch ? concat({x->elseBranch}, dec.rest) : dec.rest);
    Goal pT = withProgram(g, gb, std::move(thenProg), rules::applyBasicSE);
    addAnte(pT, applyUpdate(gb.update, cond));
    Goal pF = withProgram(g, gb, std::move(elseProg), rules::applyBasicSE);
    addAnte(pF, applyUpdate(gb.update, mkNot(cond)));
    res.premises = {std::move(pT), std::move(pF)};
    return res;
  }

  const Frame *inner = dec.innermostFrame();

  if (const auto *x = as<BreakStmt>(a)) {
    if (!inner)
      throw RuleError("break with no enclosing frame");
    if (x->label && inner->kind == Frame::Kind::Labeled &&
        std::count(inner->labels.begin(), inner->labels.end(), *x->label)) {
      // the labeled statement completes normally
      res.premises.push_back(withProgram(
          g, gb, dec.rebuildDropFrames(1, inner->followers), rules::applyBasicSE));
      return res;
    }
    // propagate one frame outward, discarding the rest of this sequence
    res.premises.push_back(withProgram(
        g, gb, dec.rebuildDropFrames(1, concat({a}, inner->followers)),
        rules::applyBasicSE));
    return res;
  }

  if (const auto *x = as<ContinueStmt>(a)) {
    if (!inner)
      throw RuleError("continue with no enclosing frame");
    if (x->label && inner->kind == Frame::Kind::Labeled &&
        std::count(inner->labels.begin(), inner->labels.end(), *x->label)) {
      // matching label: becomes an unlabeled continue and keeps going, so
      // it can reach the enclosing loop scope
      res.premises.push_back(withProgram(
          g, gb, dec.rebuildDropFrames(1, concat({mkContinue()}, inner->followers)),
          rules::applyBasicSE));
      return res;
    }
    res.premises.push_back(withProgram(
        g, gb, dec.rebuildDropFrames(1, concat({a}, inner->followers)),
        rules::applyBasicSE));
    return res;
  }

  if (const auto *x = as<ThrowStmt>(a)) {
    if (!inner) {
      // abrupt termination of the whole modality satisfies the box
      return res; // no premises: goal closed
    }
    if (inner->kind == Frame::Kind::Try) {
      Sort s = exprSort(x->value, sortsOf(g));
      StmtList catchSeq;
      catchSeq.push_back(mkVarDecl(s, inner->catchVar, x->value));
      catchSeq.insert(catchSeq.end(), inner->catchBody.begin(),
                      inner->catchBody.end());
      res.premises.push_back(withProgram(
          g, gb,
          dec.rebuildDropFrames(1, concat({mkBlock(std::move(catchSeq))},
                                          inner->followers)),
          rules::applyBasicSE));
      return res;
    }
    res.premises.push_back(withProgram(
        g, gb, dec.rebuildDropFrames(1, concat({a}, inner->followers)),
        rules::applyBasicSE));
    return res;
  }

  throw RuleError("no basic symbolic execution rule for active statement");
}

// ---------------------------------------------------------------------------
// Loop scope rules
// ---------------------------------------------------------------------------

RuleResult emptyIndexedLoopScope(const Goal &g) {
  GoalBox gb = needBox(g);
  ActiveDecomposition dec = locateActiveStatement(gb.box->program);
  const auto *ls = as<LoopScopeStmt>(dec.active);
  if (!ls || !ls->body.empty())
    throw RuleError("active statement is not an empty loop scope");

  StmtList after = dec.rebuild(dec.rest); // scope removed, context kept
  FormulaPtr post = gb.box->post;
  FormulaPtr cont = after.empty() ? post : mkBox(std::move(after), post);
  FormulaPtr f = mkAnd(mkImp(atomIs(ls->index, true), std::move(cont)),
                       mkImp(atomIs(ls->index, false), post));

  RuleResult res;
  res.ruleName = rules::emptyIndexedLoopScope;
  Goal p = premise(g, rules::emptyIndexedLoopScope);
  setSucc(p, gb.succIndex, mkUpdApp(gb.update, std::move(f)));
  res.premises.push_back(std::move(p));
  return res;
}

RuleResult continueIndexedLoopScope(const Goal &g) {
  GoalBox gb = needBox(g);
  ActiveDecomposition dec = locateActiveStatement(gb.box->program);
  const auto *c = as<ContinueStmt>(dec.active);
  const Frame *inner = dec.innermostFrame();
  if (!c || c->label || !inner || inner->kind != Frame::Kind::LoopScope)
    throw RuleError("active statement is not `continue;` inside a loop scope");

  // continue; p  ~>  x = false; p   (trailing statements kept)
  StmtList seq;
  seq.push_back(mkAssign(inner->scopeIndex, mkBoolLit(false)));
  seq = concat(std::move(seq), dec.rest);

  RuleResult res;
  res.ruleName = rules::continueIndexedLoopScope;
  res.premises.push_back(
      withProgram(g, gb, dec.rebuild(std::move(seq)), rules::continueIndexedLoopScope));
  return res;
}

RuleResult breakIndexedLoopScope(const Goal &g) {
  GoalBox gb = needBox(g);
  ActiveDecomposition dec = locateActiveStatement(gb.box->program);
  const auto *b = as<BreakStmt>(dec.active);
  const Frame *inner = dec.innermostFrame();
  if (!b || b->label || !inner || inner->kind != Frame::Kind::LoopScope)
    throw RuleError("active statement is not `break;` inside a loop scope");

  // the whole scope and its remaining body are discarded; x is untouched
  RuleResult res;
  res.ruleName = rules::breakIndexedLoopScope;
  res.premises.push_back(withProgram(
      g, gb, dec.rebuildDropFrames(1, inner->followers), rules::breakIndexedLoopScope));
  return res;
}

// ---------------------------------------------------------------------------
// Loop rules
// ---------------------------------------------------------------------------

RuleResult pullOutLoopInitializer(const Goal &g) {
  GoalBox gb = needBox(g);
  ActiveDecomposition dec = locateActiveStatement(gb.box->program);
  const auto *f = as<ForStmt>(dec.active);
  if (!f || f->init.kind == ForInit::Kind::Empty)
    throw RuleError("active statement is not a for-loop with an initializer");

  std::vector<std::string> labels = dec.activeLabels();
  StmtPtr newFor = mkFor(ForInit::empty(), f->guard, f->update, f->body);
  StmtPtr labeled = labels.empty() ? newFor : mkLabeled(labels, newFor);
  StmtList blk = initToStmtList(f->init);
  blk.push_back(std::move(labeled));
  StmtList prog = dec.rebuildReplacingLabeledActive({mkBlock(std::move(blk))});

  RuleResult res;
  res.ruleName = rules::pullOutLoopInitializer;
  res.replacedLoop = dec.active;
  res.newLoop = newFor;
  res.premises.push_back(
      withProgram(g, gb, std::move(prog), rules::pullOutLoopInitializer));
  return res;
}

namespace {

struct LoopParts {
  GoalBox gb;
  ActiveDecomposition dec;
  std::vector<std::string> labels;
  ExprPtr guard;
  StmtPtr body;
  StmtList updStmts; // for-loops only
};

LoopParts loopPartsOf(const Goal &g, bool wantFor, const char *rule) {
  LoopParts lp{needBox(g), {}, {}, nullptr, nullptr, {}};
  lp.dec = locateActiveStatement(lp.gb.box->program);
  lp.labels = lp.dec.activeLabels();
  if (wantFor) {
    const auto *f = as<ForStmt>(lp.dec.active);
    if (!f)
      throw RuleError(std::string(rule) + ": active statement is not a for-loop");
    if (f->init.kind != ForInit::Kind::Empty)
      throw RuleError(std::string(rule) +
                      ": loop initializer present, apply pullOutLoopInitializer first");
    lp.guard = guardOrTrue(f->guard);
    lp.body = f->body;
    lp.updStmts = exprListToStmtList(f->update);
  } else {
    const auto *w = as<WhileStmt>(lp.dec.active);
    if (!w)
      throw RuleError(std::string(rule) + ": active statement is not a while-loop");
    lp.guard = w->cond;
    lp.body = w->body;
  }
  return lp;
}

/// conditional postcondition (x = TRUE -> phi) & (x = FALSE -> Inv)
FormulaPtr invariantConditional(const std::string &x, const FormulaPtr &phi,
                                const FormulaPtr &inv) {
  return mkAnd(mkImp(atomIs(x, true), phi), mkImp(atomIs(x, false), inv));
}

RuleResult invariantRule(const Goal &g, const FormulaPtr &inv, bool isFor,
                         const char *ruleName) {
  LoopParts lp = loopPartsOf(g, isFor, ruleName);
  const Update &u = lp.gb.update;

  std::set<std::string> vars = assignedVars(lp.dec.active);
  Update uPrime = anonymizingUpdate(u, vars, *g.pool);
  std::string x = g.pool->freshVar("x");
  auto sorts = withBoolSorts(g.sorts, {x});

  StmtList scopeBody;
  scopeBody.push_back(scopedIterationIf(lp.guard, lp.labels, lp.body, x));
  if (isFor)
    scopeBody.push_back(invariantForUpdateIf(lp.updStmts, x));
  StmtPtr scope = mkLoopScope(x, std::move(scopeBody));
  StmtList prog = lp.dec.rebuildReplacingLabeledActive({std::move(scope)});

  RuleResult res;
  res.ruleName = ruleName;

  // premise 1: the invariant holds initially
  Goal p1 = premise(g, ruleName);
  setSucc(p1, lp.gb.succIndex, mkUpdApp(u, inv));
  res.premises.push_back(std::move(p1));

  // premise 2: an arbitrary iteration preserves the invariant / implies post
  Goal p2 = premise(g, ruleName);
  p2.sorts = sorts;
  addAnte(p2, applyUpdate(uPrime, inv));
  FormulaPtr psi = invariantConditional(x, lp.gb.box->post, inv);
  Update u2 = parallelCompose(uPrime, Update::elem(x, trueConst()));
  setSucc(p2, lp.gb.succIndex,
          mkUpdApp(std::move(u2), mkBox(std::move(prog), std::move(psi))));
  res.premises.push_back(std::move(p2));
  return res;
}

RuleResult unwindRule(const Goal &g, bool isFor, const char *ruleName) {
  LoopParts lp = loopPartsOf(g, isFor, ruleName);
  const Update &u = lp.gb.update;

  std::string x = g.pool->freshVar("x");
  std::string cont = g.pool->freshVar("cont");
  auto sorts = withBoolSorts(g.sorts, {x, cont});

  StmtList scopeBody;
  scopeBody.push_back(scopedIterationIf(lp.guard, lp.labels, lp.body, x));
  scopeBody.push_back(isFor ? unwindForContinuationIf(lp.updStmts, x, cont)
                            : unwindWhileContinuationIf(x, cont));
  StmtPtr scope = mkLoopScope(x, std::move(scopeBody));

  // trailing loop: the original statement, labels re-attached
  StmtPtr trailingLoop = lp.labels.empty()
                             ? lp.dec.active
                             : mkLabeled(lp.labels, lp.dec.active);
  StmtPtr trailer = mkIf(mkVar(cont), std::move(trailingLoop));

  StmtList prog =
      lp.dec.rebuildReplacingLabeledActive({std::move(scope), std::move(trailer)});

  Update u2 = parallelCompose(
      u, parallelCompose(Update::elem(x, trueConst()),
                         Update::elem(cont, falseConst())));

  RuleResult res;
  res.ruleName = ruleName;
  Goal p = premise(g, ruleName);
  p.sorts = sorts;
  setSucc(p, lp.gb.succIndex,
          mkUpdApp(std::move(u2), mkBox(std::move(prog), lp.gb.box->post)));
  res.premises.push_back(std::move(p));
  return res;
}

} // namespace

RuleResult loopInvariantWhile(const Goal &g, const FormulaPtr &inv) {
  return invariantRule(g, inv, false, rules::loopInvariantWhile);
}

RuleResult loopInvariantFor(const Goal &g, const FormulaPtr &inv) {
  return invariantRule(g, inv, true, rules::loopInvariantFor);
}

RuleResult unwindWhileLoop(const Goal &g) {
  return unwindRule(g, false, rules::unwindWhileLoop);
}

RuleResult unwindForLoop(const Goal &g) {
  return unwindRule(g, true, rules::unwindForLoop);
}

RuleResult unwindExit(const Goal &g) {
  GoalBox gb = needBox(g);
  ActiveDecomposition dec = locateActiveStatement(gb.box->program);
  ExprPtr guard;
  if (const auto *w = as<WhileStmt>(dec.active))
    guard = w->cond;
  else if (const auto *f = as<ForStmt>(dec.active))
    guard = guardOrTrue(f->guard);
  else
    throw RuleError("unwindExit: active statement is not a loop");

  FormulaPtr gf = exprToFormula(guard, sortsOf(g));

  RuleResult res;
  res.ruleName = rules::unwindExit;

  // premise 1: after the allotted unwindings the guard must be refutable
  Goal p1 = premise(g, rules::unwindExit);
  addAnte(p1, applyUpdate(gb.update, gf));
  p1.sequent.succedent.erase(p1.sequent.succedent.begin() +
                             static_cast<std::ptrdiff_t>(gb.succIndex));
  res.premises.push_back(std::move(p1));

  // premise 2: the loop exits without another iteration
  StmtList prog = dec.rebuildReplacingLabeledActive({});
  Goal p2 = premise(g, rules::unwindExit);
  addAnte(p2, applyUpdate(gb.update, mkNot(gf)));
  setSucc(p2, gb.succIndex,
          mkUpdApp(gb.update, mkBox(std::move(prog), gb.box->post)));
  res.premises.push_back(std::move(p2));
  return res;
}

RuleResult propositionalRight(const Goal &g, std::size_t succIndex) {
  const FormulaPtr &f = g.sequent.succedent.at(succIndex);
  RuleResult res;
  if (const auto *x = as<AndF>(f)) {
    res.ruleName = rules::andRight;
    Goal pL = premise(g, rules::andRight);
    setSucc(pL, succIndex, x->lhs);
    Goal pR = premise(g, rules::andRight);
    setSucc(pR, succIndex, x->rhs);
    res.premises = {std::move(pL), std::move(pR)};
    return res;
  }
  if (const auto *x = as<ImpF>(f)) {
    res.ruleName = rules::impRight;
    Goal p = premise(g, rules::impRight);
    addAnte(p, x->lhs);
    setSucc(p, succIndex, x->rhs);
    res.premises.push_back(std::move(p));
    return res;
  }
  if (const auto *x = as<OrF>(f)) {
    res.ruleName = rules::orRight;
    Goal p = premise(g, rules::orRight);
    setSucc(p, succIndex, x->lhs);
    p.sequent.succedent.insert(
        p.sequent.succedent.begin() + static_cast<std::ptrdiff_t>(succIndex) + 1,
        x->rhs);
    res.premises.push_back(std::move(p));
    return res;
  }
  if (const auto *x = as<NotF>(f)) {
    res.ruleName = rules::notRight;
    Goal p = premise(g, rules::notRight);
    addAnte(p, x->f);
    p.sequent.succedent.erase(p.sequent.succedent.begin() +
                              static_cast<std::ptrdiff_t>(succIndex));
    res.premises.push_back(std::move(p));
    return res;
  }
  throw RuleError("no propositional right rule for this formula");
}

} // namespace lsv
