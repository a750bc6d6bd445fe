#include "lsv/analysis.hpp"

namespace lsv {

void FreshNamePool::reserveAll(const std::set<std::string> &names) {
  usedNames.insert(names.begin(), names.end());
}

std::string FreshNamePool::freshVar(const std::string &base) {
  if (!usedNames.count(base)) {
    usedNames.insert(base);
    return base;
  }
  for (unsigned k = 1;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (!usedNames.count(cand)) {
      usedNames.insert(cand);
      return cand;
    }
  }
}

std::string FreshNamePool::freshConstName(const std::string &base) {
  for (;;) {
    std::string cand = base + "#" + std::to_string(counter++);
    if (!usedNames.count(cand)) {
      usedNames.insert(cand);
      return cand;
    }
  }
}

namespace {

void assignedVarsRec(const StmtPtr &s, std::set<std::string> &out) {
  if (!s)
    return;
  if (const auto *x = std::get_if<VarDeclStmt>(&s->node)) {
    out.insert(x->name);
  } else if (const auto *x = std::get_if<AssignStmt>(&s->node)) {
    out.insert(x->target);
  } else if (const auto *x = std::get_if<ExprStmt>(&s->node)) {
    if (const auto *a = std::get_if<UpdAssign>(&x->expr.node))
      out.insert(a->target);
    else if (const auto *i = std::get_if<UpdIncr>(&x->expr.node))
      out.insert(i->target);
    else
      out.insert(std::get<UpdDecr>(x->expr.node).target);
  } else if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
    for (const auto &t : x->body)
      assignedVarsRec(t, out);
  } else if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
    assignedVarsRec(x->body, out);
  } else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
    assignedVarsRec(x->thenBranch, out);
    assignedVarsRec(x->elseBranch, out);
  } else if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
    assignedVarsRec(x->body, out);
  } else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
    if (x->init.kind == ForInit::Kind::Decls) {
      for (const auto &d : x->init.decls)
        out.insert(d.name);
    } else if (x->init.kind == ForInit::Kind::Exprs) {
      for (const auto &e : x->init.exprs) {
        if (const auto *a = std::get_if<UpdAssign>(&e.node))
          out.insert(a->target);
        else if (const auto *i = std::get_if<UpdIncr>(&e.node))
          out.insert(i->target);
        else
          out.insert(std::get<UpdDecr>(e.node).target);
      }
    }
    for (const auto &e : x->update) {
      if (const auto *a = std::get_if<UpdAssign>(&e.node))
        out.insert(a->target);
      else if (const auto *i = std::get_if<UpdIncr>(&e.node))
        out.insert(i->target);
      else
        out.insert(std::get<UpdDecr>(e.node).target);
    }
    assignedVarsRec(x->body, out);
  } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
    for (const auto &t : x->tryBody)
      assignedVarsRec(t, out);
    out.insert(x->catchVar);
    for (const auto &t : x->catchBody)
      assignedVarsRec(t, out);
  } else if (const auto *x = std::get_if<LoopScopeStmt>(&s->node)) {
    // the index is written when the scope intercepts a continue
    out.insert(x->index);
    for (const auto &t : x->body)
      assignedVarsRec(t, out);
  }
}

} // namespace

std::set<std::string> assignedVars(const StmtPtr &s) {
  std::set<std::string> out;
  assignedVarsRec(s, out);
  return out;
}

std::set<std::string> assignedVars(const StmtList &ss) {
  std::set<std::string> out;
  for (const auto &s : ss)
    assignedVarsRec(s, out);
  return out;
}

Update anonymizingUpdate(const Update &base, const std::set<std::string> &vars,
                         FreshNamePool &pool) {
  Update havoc;
  for (const auto &v : vars)
    havoc.elems.push_back({v, mkFreshConst(pool.freshConstName(v))});
  return parallelCompose(base, havoc);
}

StmtList initToStmtList(const ForInit &init) {
  StmtList out;
  if (init.kind == ForInit::Kind::Decls) {
    for (const auto &d : init.decls)
      out.push_back(mkVarDecl(d.sort, d.name, d.init));
  } else if (init.kind == ForInit::Kind::Exprs) {
    for (const auto &e : init.exprs)
      out.push_back(mkExprStmt(e));
  }
  return out;
}

StmtList exprListToStmtList(const std::vector<UpdateExpr> &upd) {
  StmtList out;
  out.reserve(upd.size());
  for (const auto &e : upd)
    out.push_back(mkExprStmt(e));
  return out;
}

ExprPtr guardOrTrue(const ExprPtr &guard) {
  return guard ? guard : mkBoolLit(true);
}

std::set<std::string> identifiersOfProgram(const StmtList &program) {
  return progVarsOfProgram(program);
}

namespace {
void labelsRec(const StmtPtr &s, std::set<std::string> &out) {
  if (!s)
    return;
  if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
    out.insert(x->labels.begin(), x->labels.end());
    labelsRec(x->body, out);
  } else if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
    for (const auto &t : x->body)
      labelsRec(t, out);
  } else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
    labelsRec(x->thenBranch, out);
    labelsRec(x->elseBranch, out);
  } else if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
    labelsRec(x->body, out);
  } else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
    labelsRec(x->body, out);
  } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
    for (const auto &t : x->tryBody)
      labelsRec(t, out);
    for (const auto &t : x->catchBody)
      labelsRec(t, out);
  } else if (const auto *x = std::get_if<LoopScopeStmt>(&s->node)) {
    for (const auto &t : x->body)
      labelsRec(t, out);
  }
}
} // namespace

std::set<std::string> labelsOfProgram(const StmtList &program) {
  std::set<std::string> out;
  for (const auto &s : program)
    labelsRec(s, out);
  return out;
}

namespace {
void declaredRec(const StmtPtr &s, std::set<std::string> &out) {
  if (!s)
    return;
  if (const auto *x = std::get_if<VarDeclStmt>(&s->node)) {
    out.insert(x->name);
  } else if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
    for (const auto &t : x->body)
      declaredRec(t, out);
  } else if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
    declaredRec(x->body, out);
  } else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
    declaredRec(x->thenBranch, out);
    declaredRec(x->elseBranch, out);
  } else if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
    declaredRec(x->body, out);
  } else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
    if (x->init.kind == ForInit::Kind::Decls)
      for (const auto &d : x->init.decls)
        out.insert(d.name);
    declaredRec(x->body, out);
  } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
    for (const auto &t : x->tryBody)
      declaredRec(t, out);
    out.insert(x->catchVar);
    for (const auto &t : x->catchBody)
      declaredRec(t, out);
  } else if (const auto *x = std::get_if<LoopScopeStmt>(&s->node)) {
    for (const auto &t : x->body)
      declaredRec(t, out);
  }
}
} // namespace

std::set<std::string> declaredVars(const StmtList &program) {
  std::set<std::string> out;
  for (const auto &s : program)
    declaredRec(s, out);
  return out;
}

} // namespace lsv
