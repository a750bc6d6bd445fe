#include "lsv/ast.hpp"

namespace lsv {

const char *sortName(Sort s) { return s == Sort::Int ? "int" : "boolean"; }

ExprPtr mkIntLit(std::int64_t v) {
  return std::make_shared<Expr>(Expr{IntLit{v}});
}
ExprPtr mkBoolLit(bool v) { return std::make_shared<Expr>(Expr{BoolLit{v}}); }
ExprPtr mkVar(std::string name) {
  return std::make_shared<Expr>(Expr{VarRef{std::move(name)}});
}
ExprPtr mkUnary(UnOp op, ExprPtr arg) {
  return std::make_shared<Expr>(Expr{Unary{op, std::move(arg)}});
}
ExprPtr mkBinary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}

bool equal(const ExprPtr &a, const ExprPtr &b) {
  if (a == b)
    return true;
  if (!a || !b)
    return false;
  if (a->node.index() != b->node.index())
    return false;
  if (const auto *x = std::get_if<IntLit>(&a->node))
    return x->value == std::get<IntLit>(b->node).value;
  if (const auto *x = std::get_if<BoolLit>(&a->node))
    return x->value == std::get<BoolLit>(b->node).value;
  if (const auto *x = std::get_if<VarRef>(&a->node))
    return x->name == std::get<VarRef>(b->node).name;
  if (const auto *x = std::get_if<Unary>(&a->node)) {
    const auto &y = std::get<Unary>(b->node);
    return x->op == y.op && equal(x->arg, y.arg);
  }
  const auto &x = std::get<Binary>(a->node);
  const auto &y = std::get<Binary>(b->node);
  return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
}

UpdateExpr mkUpdAssign(std::string target, ExprPtr rhs) {
  return UpdateExpr{UpdAssign{std::move(target), std::move(rhs)}};
}
UpdateExpr mkUpdIncr(std::string target) {
  return UpdateExpr{UpdIncr{std::move(target)}};
}
UpdateExpr mkUpdDecr(std::string target) {
  return UpdateExpr{UpdDecr{std::move(target)}};
}

bool equal(const UpdateExpr &a, const UpdateExpr &b) {
  if (a.node.index() != b.node.index())
    return false;
  if (const auto *x = std::get_if<UpdAssign>(&a.node)) {
    const auto &y = std::get<UpdAssign>(b.node);
    return x->target == y.target && equal(x->rhs, y.rhs);
  }
  if (const auto *x = std::get_if<UpdIncr>(&a.node))
    return x->target == std::get<UpdIncr>(b.node).target;
  return std::get<UpdDecr>(a.node).target == std::get<UpdDecr>(b.node).target;
}

ForInit ForInit::ofDecls(std::vector<VarDeclItem> ds) {
  ForInit i;
  i.kind = Kind::Decls;
  i.decls = std::move(ds);
  return i;
}
ForInit ForInit::ofExprs(std::vector<UpdateExpr> es) {
  ForInit i;
  i.kind = Kind::Exprs;
  i.exprs = std::move(es);
  return i;
}

bool equal(const ForInit &a, const ForInit &b) {
  if (a.kind != b.kind)
    return false;
  if (a.kind == ForInit::Kind::Decls) {
    if (a.decls.size() != b.decls.size())
      return false;
    for (std::size_t k = 0; k < a.decls.size(); ++k)
      if (a.decls[k].sort != b.decls[k].sort ||
          a.decls[k].name != b.decls[k].name ||
          !equal(a.decls[k].init, b.decls[k].init))
        return false;
    return true;
  }
  if (a.kind == ForInit::Kind::Exprs) {
    if (a.exprs.size() != b.exprs.size())
      return false;
    for (std::size_t k = 0; k < a.exprs.size(); ++k)
      if (!equal(a.exprs[k], b.exprs[k]))
        return false;
  }
  return true;
}

namespace {
template <class T> StmtPtr stmtOf(T &&n) {
  return std::make_shared<Stmt>(Stmt{std::forward<T>(n)});
}
} // namespace

StmtPtr mkSkip() { return stmtOf(SkipStmt{}); }
StmtPtr mkVarDecl(Sort sort, std::string name, ExprPtr init) {
  return stmtOf(VarDeclStmt{sort, std::move(name), std::move(init)});
}
StmtPtr mkAssign(std::string target, ExprPtr rhs) {
  return stmtOf(AssignStmt{std::move(target), std::move(rhs)});
}
StmtPtr mkExprStmt(UpdateExpr e) { return stmtOf(ExprStmt{std::move(e)}); }
StmtPtr mkBlock(StmtList body) { return stmtOf(BlockStmt{std::move(body)}); }
StmtPtr mkLabeled(std::vector<std::string> labels, StmtPtr body) {
  return stmtOf(LabeledStmt{std::move(labels), std::move(body)});
}
StmtPtr mkIf(ExprPtr cond, StmtPtr thenBranch, StmtPtr elseBranch) {
  return stmtOf(IfStmt{std::move(cond), std::move(thenBranch), std::move(elseBranch)});
}
StmtPtr mkWhile(ExprPtr cond, StmtPtr body) {
  return stmtOf(WhileStmt{std::move(cond), std::move(body)});
}
StmtPtr mkFor(ForInit init, ExprPtr guard, std::vector<UpdateExpr> update,
              StmtPtr body) {
  return stmtOf(ForStmt{std::move(init), std::move(guard), std::move(update),
                        std::move(body)});
}
StmtPtr mkBreak(std::optional<std::string> label) {
  return stmtOf(BreakStmt{std::move(label)});
}
StmtPtr mkContinue(std::optional<std::string> label) {
  return stmtOf(ContinueStmt{std::move(label)});
}
StmtPtr mkThrow(ExprPtr value) { return stmtOf(ThrowStmt{std::move(value)}); }
StmtPtr mkTryCatch(StmtList tryBody, std::string catchVar,
                   StmtList catchBody) {
  return stmtOf(TryCatchStmt{std::move(tryBody), std::move(catchVar),
                             std::move(catchBody)});
}
StmtPtr mkLoopScope(std::string index, StmtList body) {
  return stmtOf(LoopScopeStmt{std::move(index), std::move(body)});
}

bool equal(const StmtList &a, const StmtList &b) {
  if (a.size() != b.size())
    return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!equal(a[k], b[k]))
      return false;
  return true;
}

bool equal(const StmtPtr &a, const StmtPtr &b) {
  if (a == b)
    return true;
  if (!a || !b)
    return false;
  if (a->node.index() != b->node.index())
    return false;
  if (std::get_if<SkipStmt>(&a->node))
    return true;
  if (const auto *x = std::get_if<VarDeclStmt>(&a->node)) {
    const auto &y = std::get<VarDeclStmt>(b->node);
    return x->sort == y.sort && x->name == y.name && equal(x->init, y.init);
  }
  if (const auto *x = std::get_if<AssignStmt>(&a->node)) {
    const auto &y = std::get<AssignStmt>(b->node);
    return x->target == y.target && equal(x->rhs, y.rhs);
  }
  if (const auto *x = std::get_if<ExprStmt>(&a->node))
    return equal(x->expr, std::get<ExprStmt>(b->node).expr);
  if (const auto *x = std::get_if<BlockStmt>(&a->node))
    return equal(x->body, std::get<BlockStmt>(b->node).body);
  if (const auto *x = std::get_if<LabeledStmt>(&a->node)) {
    const auto &y = std::get<LabeledStmt>(b->node);
    return x->labels == y.labels && equal(x->body, y.body);
  }
  if (const auto *x = std::get_if<IfStmt>(&a->node)) {
    const auto &y = std::get<IfStmt>(b->node);
    return equal(x->cond, y.cond) && equal(x->thenBranch, y.thenBranch) &&
           ((!x->elseBranch && !y.elseBranch) ||
            (x->elseBranch && y.elseBranch && equal(x->elseBranch, y.elseBranch)));
  }
  if (const auto *x = std::get_if<WhileStmt>(&a->node)) {
    const auto &y = std::get<WhileStmt>(b->node);
    return equal(x->cond, y.cond) && equal(x->body, y.body);
  }
  if (const auto *x = std::get_if<ForStmt>(&a->node)) {
    const auto &y = std::get<ForStmt>(b->node);
    if (!equal(x->init, y.init) || x->update.size() != y.update.size())
      return false;
    if ((x->guard == nullptr) != (y.guard == nullptr))
      return false;
    if (x->guard && !equal(x->guard, y.guard))
      return false;
    for (std::size_t k = 0; k < x->update.size(); ++k)
      if (!equal(x->update[k], y.update[k]))
        return false;
    return equal(x->body, y.body);
  }
  if (const auto *x = std::get_if<BreakStmt>(&a->node))
    return x->label == std::get<BreakStmt>(b->node).label;
  if (const auto *x = std::get_if<ContinueStmt>(&a->node))
    return x->label == std::get<ContinueStmt>(b->node).label;
  if (const auto *x = std::get_if<ThrowStmt>(&a->node))
    return equal(x->value, std::get<ThrowStmt>(b->node).value);
  if (const auto *x = std::get_if<TryCatchStmt>(&a->node)) {
    const auto &y = std::get<TryCatchStmt>(b->node);
    return x->catchVar == y.catchVar && equal(x->tryBody, y.tryBody) &&
           equal(x->catchBody, y.catchBody);
  }
  const auto &x = std::get<LoopScopeStmt>(a->node);
  const auto &y = std::get<LoopScopeStmt>(b->node);
  return x.index == y.index && equal(x.body, y.body);
}

StmtList stmtsOf(const StmtPtr &s) {
  if (const auto *b = as<BlockStmt>(s))
    return b->body;
  return {s};
}

StmtPtr asSingleStmt(const StmtList &ss) {
  if (ss.size() == 1)
    return ss.front();
  return mkBlock(ss);
}

} // namespace lsv
