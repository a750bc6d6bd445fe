#include "lsv/printer.hpp"

#include <sstream>

namespace lsv {

namespace {

// precedence levels: || 1, && 2, ==/!= 3, relational 4, +- 5, * 6, unary 7
int exprPrec(const ExprPtr &e) {
  if (as<IntLit>(e) || as<BoolLit>(e) || as<VarRef>(e))
    return 8;
  if (as<Unary>(e))
    return 7;
  switch (as<Binary>(e)->op) {
  case BinOp::Mul:
    return 6;
  case BinOp::Add:
  case BinOp::Sub:
    return 5;
  case BinOp::Lt:
  case BinOp::Le:
  case BinOp::Gt:
  case BinOp::Ge:
    return 4;
  case BinOp::Eq:
  case BinOp::Ne:
    return 3;
  case BinOp::And:
    return 2;
  case BinOp::Or:
    return 1;
  }
  return 0;
}

const char *binOpName(BinOp op) {
  switch (op) {
  case BinOp::Add:
    return "+";
  case BinOp::Sub:
    return "-";
  case BinOp::Mul:
    return "*";
  case BinOp::Eq:
    return "==";
  case BinOp::Ne:
    return "!=";
  case BinOp::Lt:
    return "<";
  case BinOp::Le:
    return "<=";
  case BinOp::Gt:
    return ">";
  case BinOp::Ge:
    return ">=";
  case BinOp::And:
    return "&&";
  case BinOp::Or:
    return "||";
  }
  return "?";
}

void printExpr(std::ostream &os, const ExprPtr &e, int minPrec) {
  int p = exprPrec(e);
  bool paren = p < minPrec;
  if (paren)
    os << "(";
  if (const auto *x = as<IntLit>(e)) {
    os << x->value;
  } else if (const auto *x = as<BoolLit>(e)) {
    os << (x->value ? "true" : "false");
  } else if (const auto *x = as<VarRef>(e)) {
    os << x->name;
  } else if (const auto *x = as<Unary>(e)) {
    os << (x->op == UnOp::Neg ? "-" : "!");
    printExpr(os, x->arg, 7);
  } else {
    const auto *bexp = as<Binary>(e);
    printExpr(os, bexp->lhs, p);
    os << " " << binOpName(bexp->op) << " ";
    printExpr(os, bexp->rhs, p + 1); // left-associative
  }
  if (paren)
    os << ")";
}

void printUpdateExpr(std::ostream &os, const UpdateExpr &e) {
  if (const auto *a = std::get_if<UpdAssign>(&e.node)) {
    os << a->target << " = ";
    printExpr(os, a->rhs, 0);
  } else if (const auto *i = std::get_if<UpdIncr>(&e.node)) {
    os << i->target << "++";
  } else {
    os << std::get<UpdDecr>(e.node).target << "--";
  }
}

struct StmtPrinter {
  std::ostream &os;
  bool indented;
  int depth = 0;

  void newline() {
    if (indented) {
      os << "\n";
      for (int k = 0; k < depth; ++k)
        os << "  ";
    } else {
      os << " ";
    }
  }

  void printList(const StmtList &ss) {
    for (std::size_t k = 0; k < ss.size(); ++k) {
      if (k > 0)
        newline();
      print(ss[k]);
    }
  }

  void printBracedList(const StmtList &ss) {
    if (ss.empty()) {
      os << "{ }";
      return;
    }
    os << "{";
    ++depth;
    newline();
    printList(ss);
    --depth;
    newline();
    os << "}";
  }

  void print(const StmtPtr &s) {
    if (std::get_if<SkipStmt>(&s->node)) {
      os << ";";
    } else if (const auto *x = std::get_if<VarDeclStmt>(&s->node)) {
      os << sortName(x->sort) << " " << x->name << " = ";
      printExpr(os, x->init, 0);
      os << ";";
    } else if (const auto *x = std::get_if<AssignStmt>(&s->node)) {
      os << x->target << " = ";
      printExpr(os, x->rhs, 0);
      os << ";";
    } else if (const auto *x = std::get_if<ExprStmt>(&s->node)) {
      printUpdateExpr(os, x->expr);
      os << ";";
    } else if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
      printBracedList(x->body);
    } else if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
      for (const auto &l : x->labels)
        os << l << ": ";
      print(x->body);
    } else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
      os << "if (";
      printExpr(os, x->cond, 0);
      os << ") ";
      print(x->thenBranch);
      if (x->elseBranch) {
        os << " else ";
        print(x->elseBranch);
      }
    } else if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
      os << "while (";
      printExpr(os, x->cond, 0);
      os << ") ";
      print(x->body);
    } else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
      os << "for (";
      if (x->init.kind == ForInit::Kind::Decls) {
        Sort cur{};
        bool first = true;
        for (const auto &d : x->init.decls) {
          if (!first)
            os << ", ";
          if (first || d.sort != cur)
            os << sortName(d.sort) << " ";
          cur = d.sort;
          first = false;
          os << d.name << " = ";
          printExpr(os, d.init, 0);
        }
      } else if (x->init.kind == ForInit::Kind::Exprs) {
        for (std::size_t k = 0; k < x->init.exprs.size(); ++k) {
          if (k > 0)
            os << ", ";
          printUpdateExpr(os, x->init.exprs[k]);
        }
      }
      os << ";";
      if (x->guard) {
        os << " ";
        printExpr(os, x->guard, 0);
      }
      os << ";";
      for (std::size_t k = 0; k < x->update.size(); ++k) {
        os << (k == 0 ? " " : ", ");
        printUpdateExpr(os, x->update[k]);
      }
      os << ") ";
      print(x->body);
    } else if (const auto *x = std::get_if<BreakStmt>(&s->node)) {
      os << "break";
      if (x->label)
        os << " " << *x->label;
      os << ";";
    } else if (const auto *x = std::get_if<ContinueStmt>(&s->node)) {
      os << "continue";
      if (x->label)
        os << " " << *x->label;
      os << ";";
    } else if (const auto *x = std::get_if<ThrowStmt>(&s->node)) {
      os << "throw ";
      printExpr(os, x->value, 0);
      os << ";";
    } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
      os << "try ";
      printBracedList(x->tryBody);
      os << " catch (" << x->catchVar << ") ";
      printBracedList(x->catchBody);
    } else {
      const auto &ls = std::get<LoopScopeStmt>(s->node);
      os << "loop-scope(" << ls.index << ") ";
      printBracedList(ls.body);
    }
  }
};

} // namespace

std::string prettyPrint(const ExprPtr &e) {
  std::ostringstream os;
  printExpr(os, e, 0);
  return os.str();
}

std::string prettyPrint(const UpdateExpr &e) {
  std::ostringstream os;
  printUpdateExpr(os, e);
  return os.str();
}

std::string prettyPrint(const StmtPtr &s) {
  std::ostringstream os;
  StmtPrinter p{os, false};
  p.print(s);
  return os.str();
}

std::string prettyPrint(const StmtList &program) {
  std::ostringstream os;
  StmtPrinter p{os, false};
  p.printList(program);
  return os.str();
}

std::string prettyPrintIndented(const StmtList &program) {
  std::ostringstream os;
  StmtPrinter p{os, true};
  p.printList(program);
  os << "\n";
  return os.str();
}

// --- logic rendering ---------------------------------------------------------

namespace {

// term precedence: + - 1, * 2, atom 3
int termPrec(const TermPtr &t) {
  if (const auto *a = as<Arith>(t))
    return a->op == ArithKind::Mul ? 2 : 1;
  return 3;
}

void printTerm(std::ostream &os, const TermPtr &t, int minPrec) {
  int p = termPrec(t);
  bool paren = p < minPrec;
  if (paren)
    os << "(";
  if (const auto *x = as<IntConst>(t)) {
    os << x->value;
  } else if (const auto *x = as<BoolConst>(t)) {
    os << (x->value ? "TRUE" : "FALSE");
  } else if (const auto *x = as<ProgVar>(t)) {
    os << x->name;
  } else if (const auto *x = as<FreshConst>(t)) {
    os << x->name;
  } else {
    const auto *ar = as<Arith>(t);
    const char *op = ar->op == ArithKind::Add   ? "+"
                     : ar->op == ArithKind::Sub ? "-"
                                                : "*";
    printTerm(os, ar->lhs, p);
    os << " " << op << " ";
    printTerm(os, ar->rhs, p + 1);
  }
  if (paren)
    os << ")";
}

void printUpdate(std::ostream &os, const Update &u) {
  os << "{";
  for (std::size_t k = 0; k < u.elems.size(); ++k) {
    if (k > 0)
      os << " || ";
    os << u.elems[k].var << " := ";
    printTerm(os, u.elems[k].value, 0);
  }
  os << "}";
}

// formula precedence: -> 1, | 2, & 3, ! 4, atom 5
int formulaPrec(const FormulaPtr &f) {
  if (as<ImpF>(f))
    return 1;
  if (as<OrF>(f))
    return 2;
  if (as<AndF>(f))
    return 3;
  if (as<NotF>(f))
    return 4;
  return 5;
}

void printFormula(std::ostream &os, const FormulaPtr &f, int minPrec) {
  int p = formulaPrec(f);
  bool paren = p < minPrec;
  if (paren)
    os << "(";
  if (const auto *x = as<AtomF>(f)) {
    printTerm(os, x->lhs, 0);
    os << (x->rel == RelOp::Eq ? " = " : x->rel == RelOp::Lt ? " < " : " <= ");
    printTerm(os, x->rhs, 0);
  } else if (const auto *x = as<NotF>(f)) {
    os << "!";
    bool needParen = !as<TrueFm>(x->f) && !as<FalseFm>(x->f) && !as<NotF>(x->f);
    if (needParen)
      os << "(";
    printFormula(os, x->f, 0);
    if (needParen)
      os << ")";
  } else if (const auto *x = as<AndF>(f)) {
    printFormula(os, x->lhs, 3);
    os << " & ";
    printFormula(os, x->rhs, 4);
  } else if (const auto *x = as<OrF>(f)) {
    printFormula(os, x->lhs, 2);
    os << " | ";
    printFormula(os, x->rhs, 3);
  } else if (const auto *x = as<ImpF>(f)) {
    printFormula(os, x->lhs, 2);
    os << " -> ";
    printFormula(os, x->rhs, 1); // right-associative
  } else if (as<TrueFm>(f)) {
    os << "true";
  } else if (as<FalseFm>(f)) {
    os << "false";
  } else if (const auto *x = as<BoxF>(f)) {
    os << "[ " << prettyPrint(x->program) << (x->program.empty() ? "](" : " ](");
    printFormula(os, x->post, 0);
    os << ")";
  } else {
    const auto *ua = as<UpdAppF>(f);
    printUpdate(os, ua->update);
    if (as<BoxF>(ua->target)) {
      printFormula(os, ua->target, 0);
    } else {
      os << "(";
      printFormula(os, ua->target, 0);
      os << ")";
    }
  }
  if (paren)
    os << ")";
}

} // namespace

std::string prettyPrint(const TermPtr &t) {
  std::ostringstream os;
  printTerm(os, t, 0);
  return os.str();
}

std::string prettyPrint(const Update &u) {
  std::ostringstream os;
  printUpdate(os, u);
  return os.str();
}

std::string prettyPrint(const FormulaPtr &f) {
  std::ostringstream os;
  printFormula(os, f, 0);
  return os.str();
}

std::string prettyPrint(const Sequent &s) {
  std::ostringstream os;
  for (std::size_t k = 0; k < s.antecedent.size(); ++k) {
    if (k > 0)
      os << ", ";
    printFormula(os, s.antecedent[k], 0);
  }
  os << (s.antecedent.empty() ? "==>" : " ==>");
  for (std::size_t k = 0; k < s.succedent.size(); ++k) {
    os << (k == 0 ? " " : ", ");
    printFormula(os, s.succedent[k], 0);
  }
  return os.str();
}

} // namespace lsv
