#pragma once

#include <set>
#include <string>
#include <vector>

#include "lsv/ast.hpp"
#include "lsv/dl.hpp"

namespace lsv {

/// Allocator for fresh program-variable and fresh-constant names.
/// Every emitted name is recorded, so no two calls ever collide.
struct FreshNamePool {
  std::set<std::string> usedNames;
  unsigned counter = 0;

  void reserve(const std::string &name) { usedNames.insert(name); }
  void reserveAll(const std::set<std::string> &names);

  /// `base` if unused, else `base_1`, `base_2`, ...
  std::string freshVar(const std::string &base);

  /// `base#k` with a pool-wide running k.
  std::string freshConstName(const std::string &base);
};

/// Syntactic over-approximation of the variables a statement may write:
/// targets of assignments, declarations and increment/decrement forms
/// anywhere inside, including for-init and for-update lists, catch
/// variables, and the index of a loop scope (written when the body
/// continues). Guards contribute nothing.
std::set<std::string> assignedVars(const StmtPtr &s);
std::set<std::string> assignedVars(const StmtList &ss);

/// base composed with a havoc of every given variable to its own fresh
/// constant; last-wins guarantees the fresh constant is what each havocked
/// variable evaluates to.
Update anonymizingUpdate(const Update &base, const std::set<std::string> &vars,
                         FreshNamePool &pool);

/// Statement list equivalent to a for-loop initializer.
StmtList initToStmtList(const ForInit &init);

/// Statement list equivalent to a for-update expression list; increments
/// and decrements keep their dedicated form (run-equivalent to i = i +- 1).
StmtList exprListToStmtList(const std::vector<UpdateExpr> &upd);

/// The guard itself, or `true` when the guard is empty.
ExprPtr guardOrTrue(const ExprPtr &guard);

/// All identifiers a program mentions (reads, writes, declarations,
/// loop-scope indices, catch variables). Labels are not included.
std::set<std::string> identifiersOfProgram(const StmtList &program);

/// Names introduced by declarations anywhere in the program: variable
/// declarations, for-initializer declarations and catch variables. These
/// are scope-local and not observable after the program ends.
std::set<std::string> declaredVars(const StmtList &program);

/// Labels occurring anywhere in a program.
std::set<std::string> labelsOfProgram(const StmtList &program);

} // namespace lsv
