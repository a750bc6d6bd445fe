#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lsv {

enum class Sort { Int, Bool };

const char *sortName(Sort s);

// ---------------------------------------------------------------------------
// Expressions. Side-effect free by construction: there is no assignment or
// increment form in Expr; those live in UpdateExpr.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct IntLit {
  std::int64_t value = 0;
};
struct BoolLit {
  bool value = false;
};
struct VarRef {
  std::string name;
};
struct Unary {
  UnOp op;
  ExprPtr arg;
};
struct Binary {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Expr {
  std::variant<IntLit, BoolLit, VarRef, Unary, Binary> node;
};

ExprPtr mkIntLit(std::int64_t v);
ExprPtr mkBoolLit(bool v);
ExprPtr mkVar(std::string name);
ExprPtr mkUnary(UnOp op, ExprPtr arg);
ExprPtr mkBinary(BinOp op, ExprPtr lhs, ExprPtr rhs);

bool equal(const ExprPtr &a, const ExprPtr &b);

// ---------------------------------------------------------------------------
// The only side-effecting expression forms; admitted in for-loop update
// lists and as expression statements.
// ---------------------------------------------------------------------------

struct UpdAssign {
  std::string target;
  ExprPtr rhs;
};
struct UpdIncr {
  std::string target;
};
struct UpdDecr {
  std::string target;
};

struct UpdateExpr {
  std::variant<UpdAssign, UpdIncr, UpdDecr> node;
};

UpdateExpr mkUpdAssign(std::string target, ExprPtr rhs);
UpdateExpr mkUpdIncr(std::string target);
UpdateExpr mkUpdDecr(std::string target);

bool equal(const UpdateExpr &a, const UpdateExpr &b);

// ---------------------------------------------------------------------------
// For-loop initializer: declaration list, expression list, or empty.
// ---------------------------------------------------------------------------

struct VarDeclItem {
  Sort sort;
  std::string name;
  ExprPtr init;
};

struct ForInit {
  enum class Kind { Empty, Decls, Exprs };
  Kind kind = Kind::Empty;
  std::vector<VarDeclItem> decls; // Kind::Decls
  std::vector<UpdateExpr> exprs;  // Kind::Exprs

  static ForInit empty() { return ForInit{}; }
  static ForInit ofDecls(std::vector<VarDeclItem> ds);
  static ForInit ofExprs(std::vector<UpdateExpr> es);
};

bool equal(const ForInit &a, const ForInit &b);

// ---------------------------------------------------------------------------
// Statements.
// ---------------------------------------------------------------------------

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using StmtList = std::vector<StmtPtr>;

struct SkipStmt {};
struct VarDeclStmt {
  Sort sort;
  std::string name;
  ExprPtr init;
};
struct AssignStmt {
  std::string target;
  ExprPtr rhs;
};
struct ExprStmt {
  UpdateExpr expr;
};
struct BlockStmt {
  StmtList body;
};
// One node carries the whole label prefix `l1: l2: ... :` of a statement.
struct LabeledStmt {
  std::vector<std::string> labels; // nonempty
  StmtPtr body;
};
struct IfStmt {
  ExprPtr cond;
  StmtPtr thenBranch;
  StmtPtr elseBranch; // may be null
};
struct WhileStmt {
  ExprPtr cond;
  StmtPtr body;
};
struct ForStmt {
  ForInit init;
  ExprPtr guard; // null means empty guard
  std::vector<UpdateExpr> update;
  StmtPtr body;
};
struct BreakStmt {
  std::optional<std::string> label;
};
struct ContinueStmt {
  std::optional<std::string> label;
};
struct ThrowStmt {
  ExprPtr value;
};
struct TryCatchStmt {
  StmtList tryBody;
  std::string catchVar;
  StmtList catchBody;
};
// `loop-scope(x) { ... }`: runs its body once; an unlabeled continue inside
// sets x to false and resumes with the next body statement, an unlabeled
// break exits the scope with x untouched.
struct LoopScopeStmt {
  std::string index; // boolean program variable
  StmtList body;
};

struct Stmt {
  std::variant<SkipStmt, VarDeclStmt, AssignStmt, ExprStmt, BlockStmt,
               LabeledStmt, IfStmt, WhileStmt, ForStmt, BreakStmt,
               ContinueStmt, ThrowStmt, TryCatchStmt, LoopScopeStmt>
      node;
  int line = 0; // 0 when synthesized; ignored by equality
  int col = 0;
};

StmtPtr mkSkip();
StmtPtr mkVarDecl(Sort sort, std::string name, ExprPtr init);
StmtPtr mkAssign(std::string target, ExprPtr rhs);
StmtPtr mkExprStmt(UpdateExpr e);
StmtPtr mkBlock(StmtList body);
StmtPtr mkLabeled(std::vector<std::string> labels, StmtPtr body);
StmtPtr mkIf(ExprPtr cond, StmtPtr thenBranch, StmtPtr elseBranch = nullptr);
StmtPtr mkWhile(ExprPtr cond, StmtPtr body);
StmtPtr mkFor(ForInit init, ExprPtr guard, std::vector<UpdateExpr> update,
              StmtPtr body);
StmtPtr mkBreak(std::optional<std::string> label = std::nullopt);
StmtPtr mkContinue(std::optional<std::string> label = std::nullopt);
StmtPtr mkThrow(ExprPtr value);
StmtPtr mkTryCatch(StmtList tryBody, std::string catchVar, StmtList catchBody);
StmtPtr mkLoopScope(std::string index, StmtList body);

bool equal(const StmtPtr &a, const StmtPtr &b);
bool equal(const StmtList &a, const StmtList &b);

/// Statements of a block, or the statement itself as a singleton list.
StmtList stmtsOf(const StmtPtr &s);

/// Wrap a statement list into a single statement (empty -> skipless block).
StmtPtr asSingleStmt(const StmtList &ss);

template <class T> const T *as(const StmtPtr &s) {
  return s ? std::get_if<T>(&s->node) : nullptr;
}
template <class T> const T *as(const ExprPtr &e) {
  return e ? std::get_if<T>(&e->node) : nullptr;
}
template <class T> bool is(const StmtPtr &s) { return as<T>(s) != nullptr; }

} // namespace lsv
