#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lsv/analysis.hpp"
#include "lsv/ast.hpp"
#include "lsv/dl.hpp"

namespace lsv {

// Stable rule names, used in traces and CLI filters.
namespace rules {
inline constexpr const char *applyBasicSE = "applyBasicSE";
inline constexpr const char *emptyIndexedLoopScope = "emptyIndexedLoopScope";
inline constexpr const char *continueIndexedLoopScope =
    "continueIndexedLoopScope";
inline constexpr const char *breakIndexedLoopScope = "breakIndexedLoopScope";
inline constexpr const char *pullOutLoopInitializer = "pullOutLoopInitializer";
inline constexpr const char *loopInvariantWhile = "loopInvariantWhile";
inline constexpr const char *loopInvariantFor = "loopInvariantFor";
inline constexpr const char *unwindWhileLoop = "unwindWhileLoop";
inline constexpr const char *unwindForLoop = "unwindForLoop";
// Auxiliary steps of the engine (not program-rewriting rules):
inline constexpr const char *unwindExit = "unwindExit";
inline constexpr const char *andRight = "andRight";
inline constexpr const char *impRight = "impRight";
inline constexpr const char *orRight = "orRight";
inline constexpr const char *notRight = "notRight";
} // namespace rules

// ---------------------------------------------------------------------------
// Active-statement decomposition: the program of a modality is split into
// the inactive prefix (open blocks, label frames, try frames, loop-scope
// frames), the active statement, and the remaining statements of the
// innermost open sequence.
// ---------------------------------------------------------------------------

struct Frame {
  enum class Kind { Block, Labeled, Try, LoopScope };
  Kind kind;
  std::vector<std::string> labels; // Labeled
  std::string catchVar;            // Try
  StmtList catchBody;              // Try
  std::string scopeIndex;          // LoopScope
  /// Statements after this frame's statement in the enclosing sequence.
  StmtList followers;

  /// Statement(s) this frame contributes when its body is `inner`.
  /// Dissolves (returns nothing) for an emptied block/label/try frame;
  /// a loop scope is kept even when empty.
  StmtList wrap(StmtList inner) const;
};

struct ActiveDecomposition {
  std::vector<Frame> prefix; // outermost first
  StmtPtr active;            // null only for an empty program
  StmtList rest;             // after the active statement, innermost sequence

  /// Reconstitutes the full program with the innermost sequence replaced.
  /// rebuild([active] ++ rest) reproduces the original program.
  StmtList rebuild(StmtList innerSeq) const;

  /// Reconstitutes the program with the `drop` innermost frames removed and
  /// `seq` put in place of (frame statement + its followers are appended).
  StmtList rebuildDropFrames(std::size_t drop, StmtList seq) const;

  /// Labels attached directly to the active statement via consecutive
  /// innermost Labeled frames (outermost first).
  std::vector<std::string> activeLabels() const;
  /// Number of innermost frames that are those Labeled wrappers.
  std::size_t activeLabelFrames() const;

  /// Program with the (label-wrapped) active statement replaced by `seq`.
  StmtList rebuildReplacingLabeledActive(StmtList seq) const;

  const Frame *innermostFrame() const {
    return prefix.empty() ? nullptr : &prefix.back();
  }
};

/// Descends through blocks, label wrappers, try-sections and loop-scope
/// bodies until a non-container statement, or an empty container, is the
/// active statement. Precondition: program non-empty.
ActiveDecomposition locateActiveStatement(const StmtList &program);

/// Which rule family handles the active statement.
enum class ActiveKind {
  BasicSE,
  EmptyLoopScope,
  ContinueLoopScope,
  BreakLoopScope,
  AtWhile,
  AtFor
};

ActiveKind classifyActive(const ActiveDecomposition &dec);

// ---------------------------------------------------------------------------
// Goals and rule applications.
// ---------------------------------------------------------------------------

struct Goal {
  Sequent sequent;
  std::shared_ptr<FreshNamePool> pool;
  std::vector<std::string> trace;
  std::shared_ptr<const SortEnv> sorts;
};

struct RuleError : std::runtime_error {
  explicit RuleError(const std::string &msg) : std::runtime_error(msg) {}
};

/// One rule application: empty premises means the rule closed the goal.
struct RuleResult {
  std::string ruleName;
  std::vector<Goal> premises;
  /// For pullOutLoopInitializer: the rebuilt for-loop node, so strategy
  /// state keyed on loop nodes can follow the rewrite.
  StmtPtr replacedLoop;
  StmtPtr newLoop;
};

/// The modality the engine works on: position of the succedent formula, its
/// pending update, and the box itself.
struct GoalBox {
  std::size_t succIndex = 0;
  Update update;
  const BoxF *box = nullptr;
};

/// First succedent formula that is a (possibly update-prefixed) box.
std::optional<GoalBox> selectBoxFormula(const Sequent &s);

/// True if some succedent formula contains a box anywhere.
bool sequentContainsBox(const Sequent &s);

// --- Symbolic execution rules ----------------------------------------------

/// One step for a non-loop active statement: assignments extend the pending
/// update, if splits, frames dissolve, abrupt signals propagate one frame.
RuleResult applyBasicSE(const Goal &g);

/// Empty loop scope: {U}[pi ls(x){} omega]phi becomes
/// {U}((x = TRUE -> [pi omega]phi) & (x = FALSE -> phi)).
RuleResult emptyIndexedLoopScope(const Goal &g);

/// `continue; p` directly inside a loop scope becomes `x = false; p`; the
/// trailing statements and the context are kept.
RuleResult continueIndexedLoopScope(const Goal &g);

/// `break;` directly inside a loop scope discards the scope and its
/// remaining body; x is left untouched.
RuleResult breakIndexedLoopScope(const Goal &g);

/// for with a non-empty initializer: the initializer is pulled out into an
/// enclosing block, leaving an initializer-free for-loop.
RuleResult pullOutLoopInitializer(const Goal &g);

/// Loop invariant rule for while; two premises (initially-valid, body).
RuleResult loopInvariantWhile(const Goal &g, const FormulaPtr &inv);

/// Loop invariant rule for initializer-free for-loops.
RuleResult loopInvariantFor(const Goal &g, const FormulaPtr &inv);

/// One unwinding of a while loop inside a loop scope; single premise, no
/// nested modalities.
RuleResult unwindWhileLoop(const Goal &g);

/// One unwinding of an initializer-free for loop.
RuleResult unwindForLoop(const Goal &g);

/// Budget-exhausted loop exit: premise 1 requires the guard refutable,
/// premise 2 continues past the loop under the negated guard.
RuleResult unwindExit(const Goal &g);

/// Propositional step exposing a box nested under &, ->, |, ! in the given
/// succedent formula.
RuleResult propositionalRight(const Goal &g, std::size_t succIndex);

// --- Premise program builders (shared with the desugar transform and the
// mutation tests; they produce exactly the loop-scope programs the rules
// install) ---------------------------------------------------------------

/// loop scope body of the while rules:
///   if (guard) l1:..ln: { p x = false; }
StmtPtr scopedIterationIf(const ExprPtr &guard,
                          const std::vector<std::string> &labels,
                          const StmtPtr &body, const std::string &x);

/// continuation block of loopInvariantFor:
///   if (!x) { x = true; upd' x = false; }
StmtPtr invariantForUpdateIf(const StmtList &updStmts, const std::string &x);

/// continuation block of unwindWhileLoop: if (!x) { x = true; cont = true; }
StmtPtr unwindWhileContinuationIf(const std::string &x,
                                  const std::string &cont);

/// continuation block of unwindForLoop:
///   if (!x) { x = true; upd' cont = true; }
StmtPtr unwindForContinuationIf(const StmtList &updStmts, const std::string &x,
                                const std::string &cont);

} // namespace lsv
