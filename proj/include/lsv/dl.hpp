#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lsv/ast.hpp"

namespace lsv {

// ---------------------------------------------------------------------------
// Terms. Boolean values are the rigid constants TRUE and FALSE; fresh
// constants are the skolem symbols introduced by anonymizing updates.
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct IntConst {
  std::int64_t value = 0;
};
struct BoolConst {
  bool value = false;
};
struct ProgVar {
  std::string name;
};
struct FreshConst {
  std::string name; // contains '#', so it can never collide with a ProgVar
};
enum class ArithKind { Add, Sub, Mul };
struct Arith {
  ArithKind op;
  TermPtr lhs;
  TermPtr rhs;
};

struct Term {
  std::variant<IntConst, BoolConst, ProgVar, FreshConst, Arith> node;
};

TermPtr mkIntConst(std::int64_t v);
TermPtr mkBoolConst(bool v);
TermPtr trueConst();
TermPtr falseConst();
TermPtr mkProgVar(std::string name);
TermPtr mkFreshConst(std::string name);
TermPtr mkArith(ArithKind op, TermPtr lhs, TermPtr rhs);

bool equal(const TermPtr &a, const TermPtr &b);

template <class T> const T *as(const TermPtr &t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}

// ---------------------------------------------------------------------------
// Updates: flat parallel assignments with last-wins clash resolution.
// An empty update is the identity.
// ---------------------------------------------------------------------------

struct ElemUpd {
  std::string var;
  TermPtr value;
};

struct Update {
  std::vector<ElemUpd> elems;

  bool empty() const { return elems.empty(); }
  /// Last-wins binding map view of the update.
  std::map<std::string, TermPtr> bindingMap() const;
  /// Collapses overridden elements: one elem per target, value of the
  /// rightmost occurrence, in first-occurrence order. Sound because all
  /// right-hand sides are evaluated in the pre-state.
  Update normalized() const;

  static Update elem(std::string var, TermPtr value);
};

bool equal(const Update &a, const Update &b);

/// u1's elements followed by u2's; flat, last-wins.
Update parallelCompose(const Update &u1, const Update &u2);

/// `u then v` flattened to one parallel update: v's right-hand sides are
/// rewritten under u first.
Update sequentialCompose(const Update &u, const Update &v);

// ---------------------------------------------------------------------------
// Formulas.
// ---------------------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class RelOp { Eq, Lt, Le };

struct AtomF {
  RelOp rel;
  TermPtr lhs;
  TermPtr rhs;
};
struct NotF {
  FormulaPtr f;
};
struct AndF {
  FormulaPtr lhs;
  FormulaPtr rhs;
};
struct OrF {
  FormulaPtr lhs;
  FormulaPtr rhs;
};
struct ImpF {
  FormulaPtr lhs;
  FormulaPtr rhs;
};
struct TrueFm {};
struct FalseFm {};
// Box modality [program](post): every normally terminating run of the
// program ends in a state satisfying post.
struct BoxF {
  StmtList program;
  FormulaPtr post;
};
// An update pending in front of a formula.
struct UpdAppF {
  Update update;
  FormulaPtr target;
};

struct Formula {
  std::variant<AtomF, NotF, AndF, OrF, ImpF, TrueFm, FalseFm, BoxF, UpdAppF>
      node;
};

FormulaPtr mkAtom(RelOp rel, TermPtr lhs, TermPtr rhs);
FormulaPtr mkNot(FormulaPtr f);
FormulaPtr mkAnd(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr mkOr(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr mkImp(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr mkTrue();
FormulaPtr mkFalse();
FormulaPtr mkBox(StmtList program, FormulaPtr post);
/// {u}f; collapses onto an existing pending update and disappears for empty u.
FormulaPtr mkUpdApp(Update u, FormulaPtr target);

bool equal(const FormulaPtr &a, const FormulaPtr &b);
bool containsBox(const FormulaPtr &f);

template <class T> const T *as(const FormulaPtr &f) {
  return f ? std::get_if<T>(&f->node) : nullptr;
}

// ---------------------------------------------------------------------------
// Sequents: conjunction of the antecedent implies disjunction of the
// succedent.
// ---------------------------------------------------------------------------

struct Sequent {
  std::vector<FormulaPtr> antecedent;
  std::vector<FormulaPtr> succedent;
};

bool equal(const Sequent &a, const Sequent &b);

// ---------------------------------------------------------------------------
// Update application and variable collection.
// ---------------------------------------------------------------------------

/// Simultaneous substitution of the update's bindings into a term.
TermPtr applyUpdate(const Update &u, const TermPtr &t);

/// Substitutes into modality-free parts; in front of a box the update is
/// kept pending (composed with any update already pending there).
FormulaPtr applyUpdate(const Update &u, const FormulaPtr &f);

/// Program variables occurring in a formula, including inside box programs
/// and update values/targets.
std::set<std::string> freeProgVars(const FormulaPtr &f);
std::set<std::string> progVarsOfExpr(const ExprPtr &e);
std::set<std::string> progVarsOfProgram(const StmtList &program);

// ---------------------------------------------------------------------------
// Bridging program expressions into the logic.
// ---------------------------------------------------------------------------

using SortEnv = std::map<std::string, Sort>;

/// Integer-sorted or atomic boolean expression as a term.
/// Compound boolean expressions have no term form; callers must case-split
/// via exprToFormula instead. Returns null for those.
TermPtr exprToTerm(const ExprPtr &e);

/// Boolean-sorted expression as a formula. `==`/`!=` over booleans becomes
/// mutual implication when an operand is compound.
FormulaPtr exprToFormula(const ExprPtr &e, const SortEnv &sorts);

/// Sort of an expression under the given variable sorts.
Sort exprSort(const ExprPtr &e, const SortEnv &sorts);

} // namespace lsv
