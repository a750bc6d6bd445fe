#include "testutil.hpp"

#include <fstream>
#include <stdexcept>

namespace lsvtest {

namespace {

void dumpExprRec(const ExprPtr &e, std::ostream &os) {
  if (const auto *x = as<IntLit>(e)) {
    os << x->value;
  } else if (const auto *x = as<BoolLit>(e)) {
    os << (x->value ? "true" : "false");
  } else if (const auto *x = as<VarRef>(e)) {
    os << x->name;
  } else if (const auto *x = as<Unary>(e)) {
    os << "(" << (x->op == UnOp::Neg ? "neg " : "not ");
    dumpExprRec(x->arg, os);
    os << ")";
  } else {
    const auto *bexp = as<Binary>(e);
    static const char *names[] = {"add", "sub", "mul", "eq", "ne",
                                  "lt",  "le",  "gt",  "ge", "and", "or"};
    os << "(" << names[static_cast<int>(bexp->op)] << " ";
    dumpExprRec(bexp->lhs, os);
    os << " ";
    dumpExprRec(bexp->rhs, os);
    os << ")";
  }
}

void dumpUpdateExpr(const UpdateExpr &e, std::ostream &os) {
  if (const auto *a = std::get_if<UpdAssign>(&e.node)) {
    os << "(assign " << a->target << " ";
    dumpExprRec(a->rhs, os);
    os << ")";
  } else if (const auto *i = std::get_if<UpdIncr>(&e.node)) {
    os << "(incr " << i->target << ")";
  } else {
    os << "(decr " << std::get<UpdDecr>(e.node).target << ")";
  }
}

void dumpStmtRec(const StmtPtr &s, std::ostream &os) {
  if (std::get_if<SkipStmt>(&s->node)) {
    os << "(skip)";
  } else if (const auto *x = std::get_if<VarDeclStmt>(&s->node)) {
    os << "(decl " << sortName(x->sort) << " " << x->name << " ";
    dumpExprRec(x->init, os);
    os << ")";
  } else if (const auto *x = std::get_if<AssignStmt>(&s->node)) {
    os << "(= " << x->target << " ";
    dumpExprRec(x->rhs, os);
    os << ")";
  } else if (const auto *x = std::get_if<ExprStmt>(&s->node)) {
    os << "(expr ";
    dumpUpdateExpr(x->expr, os);
    os << ")";
  } else if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
    os << "(block";
    for (const auto &t : x->body) {
      os << " ";
      dumpStmtRec(t, os);
    }
    os << ")";
  } else if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
    os << "(labeled (";
    for (std::size_t k = 0; k < x->labels.size(); ++k)
      os << (k ? " " : "") << x->labels[k];
    os << ") ";
    dumpStmtRec(x->body, os);
    os << ")";
  } else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
    os << "(if ";
    dumpExprRec(x->cond, os);
    os << " ";
    dumpStmtRec(x->thenBranch, os);
    if (x->elseBranch) {
      os << " ";
      dumpStmtRec(x->elseBranch, os);
    }
    os << ")";
  } else if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
    os << "(while ";
    dumpExprRec(x->cond, os);
    os << " ";
    dumpStmtRec(x->body, os);
    os << ")";
  } else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
    os << "(for ";
    if (x->init.kind == ForInit::Kind::Empty) {
      os << "()";
    } else if (x->init.kind == ForInit::Kind::Decls) {
      os << "(decls";
      for (const auto &d : x->init.decls) {
        os << " (" << sortName(d.sort) << " " << d.name << " ";
        dumpExprRec(d.init, os);
        os << ")";
      }
      os << ")";
    } else {
      os << "(exprs";
      for (const auto &e : x->init.exprs) {
        os << " ";
        dumpUpdateExpr(e, os);
      }
      os << ")";
    }
    os << " ";
    if (x->guard)
      dumpExprRec(x->guard, os);
    else
      os << "()";
    os << " (";
    for (std::size_t k = 0; k < x->update.size(); ++k) {
      if (k)
        os << " ";
      dumpUpdateExpr(x->update[k], os);
    }
    os << ") ";
    dumpStmtRec(x->body, os);
    os << ")";
  } else if (const auto *x = std::get_if<BreakStmt>(&s->node)) {
    os << "(break" << (x->label ? " " + *x->label : "") << ")";
  } else if (const auto *x = std::get_if<ContinueStmt>(&s->node)) {
    os << "(continue" << (x->label ? " " + *x->label : "") << ")";
  } else if (const auto *x = std::get_if<ThrowStmt>(&s->node)) {
    os << "(throw ";
    dumpExprRec(x->value, os);
    os << ")";
  } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
    os << "(try (";
    for (std::size_t k = 0; k < x->tryBody.size(); ++k) {
      if (k)
        os << " ";
      dumpStmtRec(x->tryBody[k], os);
    }
    os << ") " << x->catchVar << " (";
    for (std::size_t k = 0; k < x->catchBody.size(); ++k) {
      if (k)
        os << " ";
      dumpStmtRec(x->catchBody[k], os);
    }
    os << "))";
  } else {
    const auto &ls = std::get<LoopScopeStmt>(s->node);
    os << "(loop-scope " << ls.index << " (";
    for (std::size_t k = 0; k < ls.body.size(); ++k) {
      if (k)
        os << " ";
      dumpStmtRec(ls.body[k], os);
    }
    os << "))";
  }
}

} // namespace

std::string dumpAst(const ExprPtr &e) {
  std::ostringstream os;
  dumpExprRec(e, os);
  return os.str();
}

std::string dumpAst(const StmtPtr &s) {
  std::ostringstream os;
  dumpStmtRec(s, os);
  return os.str();
}

std::string dumpAst(const StmtList &ss) {
  std::ostringstream os;
  for (std::size_t k = 0; k < ss.size(); ++k) {
    if (k)
      os << "\n";
    dumpStmtRec(ss[k], os);
  }
  return os.str();
}

std::string readWholeFile(const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

} // namespace lsvtest
