#include "lsv/dl.hpp"

#include <stdexcept>

namespace lsv {

TermPtr mkIntConst(std::int64_t v) {
  return std::make_shared<Term>(Term{IntConst{v}});
}
TermPtr mkBoolConst(bool v) {
  return std::make_shared<Term>(Term{BoolConst{v}});
}
TermPtr trueConst() {
  static const TermPtr t = mkBoolConst(true);
  return t;
}
TermPtr falseConst() {
  static const TermPtr f = mkBoolConst(false);
  return f;
}
TermPtr mkProgVar(std::string name) {
  return std::make_shared<Term>(Term{ProgVar{std::move(name)}});
}
TermPtr mkFreshConst(std::string name) {
  return std::make_shared<Term>(Term{FreshConst{std::move(name)}});
}
TermPtr mkArith(ArithKind op, TermPtr lhs, TermPtr rhs) {
  return std::make_shared<Term>(Term{Arith{op, std::move(lhs), std::move(rhs)}});
}

bool equal(const TermPtr &a, const TermPtr &b) {
  if (a == b)
    return true;
  if (!a || !b)
    return false;
  if (a->node.index() != b->node.index())
    return false;
  if (const auto *x = std::get_if<IntConst>(&a->node))
    return x->value == std::get<IntConst>(b->node).value;
  if (const auto *x = std::get_if<BoolConst>(&a->node))
    return x->value == std::get<BoolConst>(b->node).value;
  if (const auto *x = std::get_if<ProgVar>(&a->node))
    return x->name == std::get<ProgVar>(b->node).name;
  if (const auto *x = std::get_if<FreshConst>(&a->node))
    return x->name == std::get<FreshConst>(b->node).name;
  const auto &x = std::get<Arith>(a->node);
  const auto &y = std::get<Arith>(b->node);
  return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
}

// --- updates ---------------------------------------------------------------

std::map<std::string, TermPtr> Update::bindingMap() const {
  std::map<std::string, TermPtr> m;
  for (const auto &e : elems)
    m[e.var] = e.value; // later elems override
  return m;
}

Update Update::normalized() const {
  auto winners = bindingMap();
  Update out;
  std::set<std::string> seen;
  for (const auto &e : elems) {
    if (seen.insert(e.var).second)
      out.elems.push_back({e.var, winners.at(e.var)});
  }
  return out;
}

Update Update::elem(std::string var, TermPtr value) {
  Update u;
  u.elems.push_back({std::move(var), std::move(value)});
  return u;
}

bool equal(const Update &a, const Update &b) {
  if (a.elems.size() != b.elems.size())
    return false;
  for (std::size_t k = 0; k < a.elems.size(); ++k)
    if (a.elems[k].var != b.elems[k].var ||
        !equal(a.elems[k].value, b.elems[k].value))
      return false;
  return true;
}

Update parallelCompose(const Update &u1, const Update &u2) {
  Update out = u1;
  out.elems.insert(out.elems.end(), u2.elems.begin(), u2.elems.end());
  return out;
}

Update sequentialCompose(const Update &u, const Update &v) {
  Update rewritten;
  for (const auto &e : v.elems)
    rewritten.elems.push_back({e.var, applyUpdate(u, e.value)});
  return parallelCompose(u, rewritten);
}

// --- formulas ----------------------------------------------------------------

FormulaPtr mkAtom(RelOp rel, TermPtr lhs, TermPtr rhs) {
  return std::make_shared<Formula>(Formula{AtomF{rel, std::move(lhs), std::move(rhs)}});
}
FormulaPtr mkNot(FormulaPtr f) {
  return std::make_shared<Formula>(Formula{NotF{std::move(f)}});
}
FormulaPtr mkAnd(FormulaPtr lhs, FormulaPtr rhs) {
  return std::make_shared<Formula>(Formula{AndF{std::move(lhs), std::move(rhs)}});
}
FormulaPtr mkOr(FormulaPtr lhs, FormulaPtr rhs) {
  return std::make_shared<Formula>(Formula{OrF{std::move(lhs), std::move(rhs)}});
}
FormulaPtr mkImp(FormulaPtr lhs, FormulaPtr rhs) {
  return std::make_shared<Formula>(Formula{ImpF{std::move(lhs), std::move(rhs)}});
}
FormulaPtr mkTrue() {
  static const FormulaPtr t = std::make_shared<Formula>(Formula{TrueFm{}});
  return t;
}
FormulaPtr mkFalse() {
  static const FormulaPtr f = std::make_shared<Formula>(Formula{FalseFm{}});
  return f;
}
FormulaPtr mkBox(StmtList program, FormulaPtr post) {
  return std::make_shared<Formula>(Formula{BoxF{std::move(program), std::move(post)}});
}
FormulaPtr mkUpdApp(Update u, FormulaPtr target) {
  if (u.empty())
    return target;
  if (const auto *inner = as<UpdAppF>(target))
    return std::make_shared<Formula>(
        Formula{UpdAppF{sequentialCompose(u, inner->update), inner->target}});
  return std::make_shared<Formula>(Formula{UpdAppF{std::move(u), std::move(target)}});
}

bool equal(const FormulaPtr &a, const FormulaPtr &b) {
  if (a == b)
    return true;
  if (!a || !b)
    return false;
  if (a->node.index() != b->node.index())
    return false;
  if (const auto *x = std::get_if<AtomF>(&a->node)) {
    const auto &y = std::get<AtomF>(b->node);
    return x->rel == y.rel && equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (const auto *x = std::get_if<NotF>(&a->node))
    return equal(x->f, std::get<NotF>(b->node).f);
  if (const auto *x = std::get_if<AndF>(&a->node)) {
    const auto &y = std::get<AndF>(b->node);
    return equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (const auto *x = std::get_if<OrF>(&a->node)) {
    const auto &y = std::get<OrF>(b->node);
    return equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (const auto *x = std::get_if<ImpF>(&a->node)) {
    const auto &y = std::get<ImpF>(b->node);
    return equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (std::get_if<TrueFm>(&a->node) || std::get_if<FalseFm>(&a->node))
    return true;
  if (const auto *x = std::get_if<BoxF>(&a->node)) {
    const auto &y = std::get<BoxF>(b->node);
    return equal(x->program, y.program) && equal(x->post, y.post);
  }
  const auto &x = std::get<UpdAppF>(a->node);
  const auto &y = std::get<UpdAppF>(b->node);
  return equal(x.update, y.update) && equal(x.target, y.target);
}

bool containsBox(const FormulaPtr &f) {
  if (!f)
    return false;
  if (std::get_if<BoxF>(&f->node))
    return true;
  if (const auto *x = std::get_if<NotF>(&f->node))
    return containsBox(x->f);
  if (const auto *x = std::get_if<AndF>(&f->node))
    return containsBox(x->lhs) || containsBox(x->rhs);
  if (const auto *x = std::get_if<OrF>(&f->node))
    return containsBox(x->lhs) || containsBox(x->rhs);
  if (const auto *x = std::get_if<ImpF>(&f->node))
    return containsBox(x->lhs) || containsBox(x->rhs);
  if (const auto *x = std::get_if<UpdAppF>(&f->node))
    return containsBox(x->target);
  return false;
}

bool equal(const Sequent &a, const Sequent &b) {
  if (a.antecedent.size() != b.antecedent.size() ||
      a.succedent.size() != b.succedent.size())
    return false;
  for (std::size_t k = 0; k < a.antecedent.size(); ++k)
    if (!equal(a.antecedent[k], b.antecedent[k]))
      return false;
  for (std::size_t k = 0; k < a.succedent.size(); ++k)
    if (!equal(a.succedent[k], b.succedent[k]))
      return false;
  return true;
}

// --- update application ------------------------------------------------------

TermPtr applyUpdate(const Update &u, const TermPtr &t) {
  if (u.empty() || !t)
    return t;
  if (const auto *v = std::get_if<ProgVar>(&t->node)) {
    auto m = u.bindingMap();
    auto it = m.find(v->name);
    return it == m.end() ? t : it->second;
  }
  if (const auto *a = std::get_if<Arith>(&t->node)) {
    TermPtr l = applyUpdate(u, a->lhs);
    TermPtr r = applyUpdate(u, a->rhs);
    if (l == a->lhs && r == a->rhs)
      return t;
    return mkArith(a->op, std::move(l), std::move(r));
  }
  return t; // constants and fresh constants are rigid
}

FormulaPtr applyUpdate(const Update &u, const FormulaPtr &f) {
  if (u.empty() || !f)
    return f;
  if (const auto *x = std::get_if<AtomF>(&f->node))
    return mkAtom(x->rel, applyUpdate(u, x->lhs), applyUpdate(u, x->rhs));
  if (const auto *x = std::get_if<NotF>(&f->node))
    return mkNot(applyUpdate(u, x->f));
  if (const auto *x = std::get_if<AndF>(&f->node))
    return mkAnd(applyUpdate(u, x->lhs), applyUpdate(u, x->rhs));
  if (const auto *x = std::get_if<OrF>(&f->node))
    return mkOr(applyUpdate(u, x->lhs), applyUpdate(u, x->rhs));
  if (const auto *x = std::get_if<ImpF>(&f->node))
    return mkImp(applyUpdate(u, x->lhs), applyUpdate(u, x->rhs));
  if (std::get_if<TrueFm>(&f->node) || std::get_if<FalseFm>(&f->node))
    return f;
  if (std::get_if<BoxF>(&f->node))
    return mkUpdApp(u, f); // pending in front of the modality
  const auto &x = std::get<UpdAppF>(f->node);
  return mkUpdApp(sequentialCompose(u, x.update), x.target);
}

// --- variable collection ------------------------------------------------------

namespace {

void collectTermVars(const TermPtr &t, std::set<std::string> &out) {
  if (!t)
    return;
  if (const auto *v = std::get_if<ProgVar>(&t->node)) {
    out.insert(v->name);
    return;
  }
  if (const auto *a = std::get_if<Arith>(&t->node)) {
    collectTermVars(a->lhs, out);
    collectTermVars(a->rhs, out);
  }
}

void collectExprVars(const ExprPtr &e, std::set<std::string> &out) {
  if (!e)
    return;
  if (const auto *v = std::get_if<VarRef>(&e->node)) {
    out.insert(v->name);
    return;
  }
  if (const auto *u = std::get_if<Unary>(&e->node)) {
    collectExprVars(u->arg, out);
    return;
  }
  if (const auto *b = std::get_if<Binary>(&e->node)) {
    collectExprVars(b->lhs, out);
    collectExprVars(b->rhs, out);
  }
}

void collectUpdateExprVars(const UpdateExpr &e, std::set<std::string> &out) {
  if (const auto *a = std::get_if<UpdAssign>(&e.node)) {
    out.insert(a->target);
    collectExprVars(a->rhs, out);
  } else if (const auto *i = std::get_if<UpdIncr>(&e.node)) {
    out.insert(i->target);
  } else {
    out.insert(std::get<UpdDecr>(e.node).target);
  }
}

void collectStmtVars(const StmtPtr &s, std::set<std::string> &out) {
  if (!s)
    return;
  if (const auto *x = std::get_if<VarDeclStmt>(&s->node)) {
    out.insert(x->name);
    collectExprVars(x->init, out);
  } else if (const auto *x = std::get_if<AssignStmt>(&s->node)) {
    out.insert(x->target);
    collectExprVars(x->rhs, out);
  } else if (const auto *x = std::get_if<ExprStmt>(&s->node)) {
    collectUpdateExprVars(x->expr, out);
  } else if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
    for (const auto &t : x->body)
      collectStmtVars(t, out);
  } else if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
    collectStmtVars(x->body, out);
  } else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
    collectExprVars(x->cond, out);
    collectStmtVars(x->thenBranch, out);
    collectStmtVars(x->elseBranch, out);
  } else if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
    collectExprVars(x->cond, out);
    collectStmtVars(x->body, out);
  } else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
    if (x->init.kind == ForInit::Kind::Decls) {
      for (const auto &d : x->init.decls) {
        out.insert(d.name);
        collectExprVars(d.init, out);
      }
    } else if (x->init.kind == ForInit::Kind::Exprs) {
      for (const auto &e : x->init.exprs)
        collectUpdateExprVars(e, out);
    }
    collectExprVars(x->guard, out);
    for (const auto &e : x->update)
      collectUpdateExprVars(e, out);
    collectStmtVars(x->body, out);
  } else if (const auto *x = std::get_if<ThrowStmt>(&s->node)) {
    collectExprVars(x->value, out);
  } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
    for (const auto &t : x->tryBody)
      collectStmtVars(t, out);
    out.insert(x->catchVar);
    for (const auto &t : x->catchBody)
      collectStmtVars(t, out);
  } else if (const auto *x = std::get_if<LoopScopeStmt>(&s->node)) {
    out.insert(x->index);
    for (const auto &t : x->body)
      collectStmtVars(t, out);
  }
}

void collectFormulaVars(const FormulaPtr &f, std::set<std::string> &out) {
  if (!f)
    return;
  if (const auto *x = std::get_if<AtomF>(&f->node)) {
    collectTermVars(x->lhs, out);
    collectTermVars(x->rhs, out);
  } else if (const auto *x = std::get_if<NotF>(&f->node)) {
    collectFormulaVars(x->f, out);
  } else if (const auto *x = std::get_if<AndF>(&f->node)) {
    collectFormulaVars(x->lhs, out);
    collectFormulaVars(x->rhs, out);
  } else if (const auto *x = std::get_if<OrF>(&f->node)) {
    collectFormulaVars(x->lhs, out);
    collectFormulaVars(x->rhs, out);
  } else if (const auto *x = std::get_if<ImpF>(&f->node)) {
    collectFormulaVars(x->lhs, out);
    collectFormulaVars(x->rhs, out);
  } else if (const auto *x = std::get_if<BoxF>(&f->node)) {
    for (const auto &s : x->program)
      collectStmtVars(s, out);
    collectFormulaVars(x->post, out);
  } else if (const auto *x = std::get_if<UpdAppF>(&f->node)) {
    for (const auto &e : x->update.elems) {
      out.insert(e.var);
      collectTermVars(e.value, out);
    }
    collectFormulaVars(x->target, out);
  }
}

} // namespace

std::set<std::string> freeProgVars(const FormulaPtr &f) {
  std::set<std::string> out;
  collectFormulaVars(f, out);
  return out;
}

std::set<std::string> progVarsOfExpr(const ExprPtr &e) {
  std::set<std::string> out;
  collectExprVars(e, out);
  return out;
}

std::set<std::string> progVarsOfProgram(const StmtList &program) {
  std::set<std::string> out;
  for (const auto &s : program)
    collectStmtVars(s, out);
  return out;
}

// --- expression bridging ------------------------------------------------------

Sort exprSort(const ExprPtr &e, const SortEnv &sorts) {
  if (as<IntLit>(e))
    return Sort::Int;
  if (as<BoolLit>(e))
    return Sort::Bool;
  if (const auto *v = as<VarRef>(e)) {
    auto it = sorts.find(v->name);
    return it == sorts.end() ? Sort::Int : it->second;
  }
  if (const auto *u = as<Unary>(e))
    return u->op == UnOp::Neg ? Sort::Int : Sort::Bool;
  const auto *b = as<Binary>(e);
  switch (b->op) {
  case BinOp::Add:
  case BinOp::Sub:
  case BinOp::Mul:
    return Sort::Int;
  default:
    return Sort::Bool;
  }
}

TermPtr exprToTerm(const ExprPtr &e) {
  if (const auto *x = as<IntLit>(e))
    return mkIntConst(x->value);
  if (const auto *x = as<BoolLit>(e))
    return mkBoolConst(x->value);
  if (const auto *x = as<VarRef>(e))
    return mkProgVar(x->name);
  if (const auto *x = as<Unary>(e)) {
    if (x->op == UnOp::Neg) {
      TermPtr a = exprToTerm(x->arg);
      return a ? mkArith(ArithKind::Sub, mkIntConst(0), a) : nullptr;
    }
    return nullptr; // boolean negation has no term form
  }
  const auto *b = as<Binary>(e);
  ArithKind k;
  switch (b->op) {
  case BinOp::Add:
    k = ArithKind::Add;
    break;
  case BinOp::Sub:
    k = ArithKind::Sub;
    break;
  case BinOp::Mul:
    k = ArithKind::Mul;
    break;
  default:
    return nullptr; // comparisons/connectives have no term form
  }
  TermPtr l = exprToTerm(b->lhs);
  TermPtr r = exprToTerm(b->rhs);
  return (l && r) ? mkArith(k, std::move(l), std::move(r)) : nullptr;
}

FormulaPtr exprToFormula(const ExprPtr &e, const SortEnv &sorts) {
  if (const auto *x = as<BoolLit>(e))
    return x->value ? mkTrue() : mkFalse();
  if (const auto *x = as<VarRef>(e))
    return mkAtom(RelOp::Eq, mkProgVar(x->name), trueConst());
  if (const auto *x = as<Unary>(e)) {
    if (x->op == UnOp::Not)
      return mkNot(exprToFormula(x->arg, sorts));
    throw std::logic_error("integer expression in formula position");
  }
  const auto *b = as<Binary>(e);
  if (!b)
    throw std::logic_error("integer expression in formula position");
  switch (b->op) {
  case BinOp::And:
    return mkAnd(exprToFormula(b->lhs, sorts), exprToFormula(b->rhs, sorts));
  case BinOp::Or:
    return mkOr(exprToFormula(b->lhs, sorts), exprToFormula(b->rhs, sorts));
  case BinOp::Lt:
    return mkAtom(RelOp::Lt, exprToTerm(b->lhs), exprToTerm(b->rhs));
  case BinOp::Le:
    return mkAtom(RelOp::Le, exprToTerm(b->lhs), exprToTerm(b->rhs));
  case BinOp::Gt:
    return mkAtom(RelOp::Lt, exprToTerm(b->rhs), exprToTerm(b->lhs));
  case BinOp::Ge:
    return mkAtom(RelOp::Le, exprToTerm(b->rhs), exprToTerm(b->lhs));
  case BinOp::Eq:
  case BinOp::Ne: {
    FormulaPtr eq;
    if (exprSort(b->lhs, sorts) == Sort::Int) {
      eq = mkAtom(RelOp::Eq, exprToTerm(b->lhs), exprToTerm(b->rhs));
    } else {
      TermPtr lt = exprToTerm(b->lhs);
      TermPtr rt = exprToTerm(b->rhs);
      if (lt && rt) {
        eq = mkAtom(RelOp::Eq, lt, rt);
      } else {
        // compound boolean operand: mutual implication
        FormulaPtr lf = exprToFormula(b->lhs, sorts);
        FormulaPtr rf = exprToFormula(b->rhs, sorts);
        eq = mkAnd(mkImp(lf, rf), mkImp(rf, lf));
      }
    }
    return b->op == BinOp::Eq ? eq : mkNot(eq);
  }
  default:
    throw std::logic_error("integer expression in formula position");
  }
}

} // namespace lsv
