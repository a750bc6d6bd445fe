#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsv/ast.hpp"
#include "lsv/dl.hpp"

namespace lsv {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(std::string msg, int line_, int col_)
      : std::runtime_error(std::move(msg)), line(line_), col(col_) {}
};

/// Loop annotation: either an invariant formula or an unwinding count.
struct LoopAnnotation {
  enum class Kind { Invariant, Unwind };
  Kind kind = Kind::Invariant;
  FormulaPtr invariant;  // Kind::Invariant
  unsigned unwind = 0;   // Kind::Unwind
};

struct AnnotatedProgram {
  FormulaPtr precondition;
  FormulaPtr postcondition;
  StmtList program;
  /// Keyed by the loop statement node; every while/for in the program has
  /// exactly one entry.
  std::map<const Stmt *, LoopAnnotation> loopAnnotations;
  SortEnv sorts;
};

/// Parses a plain program. Annotation comments are skipped. The program is
/// label-validated and sort-checked; errors carry line/column.
StmtList parseProgram(const std::string &text);

/// Parses a program together with its `//@ pre:`, `//@ post:` and per-loop
/// `//@ invariant:` / `//@ unwind:` annotations.
AnnotatedProgram parseAnnotatedFile(const std::string &text);

/// Parses a formula in the annotation surface syntax.
FormulaPtr parseFormula(const std::string &text, const SortEnv &sorts);

/// Label scoping, break/continue targeting and declaration rules.
/// Throws ParseError on violation. Exposed for programmatically built ASTs.
void validateProgram(const StmtList &program);

/// Infers the sort of every variable a program mentions. Declared variables
/// take their declared sort; ambient variables are unified from use.
/// Unconstrained variables default to Int. Throws ParseError on conflicts.
SortEnv inferSorts(const StmtList &program);

/// As inferSorts, but also unifies variable uses in the given formulas
/// (pre/post/invariants).
SortEnv inferSorts(const StmtList &program,
                   const std::vector<FormulaPtr> &formulas);

} // namespace lsv
