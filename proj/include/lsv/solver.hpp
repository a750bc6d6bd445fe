#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "lsv/dl.hpp"
#include "lsv/interp.hpp"

namespace lsv {

/// Validity-preserving simplification to fixpoint: update application on
/// modality-free parts, boolean-constant folding, implication/conjunction
/// unit laws, ground arithmetic evaluation. Boxes stay untouched behind
/// their pending updates.
FormulaPtr simplify(const FormulaPtr &f);
TermPtr simplifyTerm(const TermPtr &t);

/// Per-formula simplification plus unit cleanup: `true` leaves the
/// antecedent, `false` leaves the succedent, duplicates are removed.
Sequent simplifySequent(const Sequent &s);

/// Syntactic closure: false in the antecedent, true in the succedent, or a
/// formula occurring on both sides.
bool syntacticallyClosed(const Sequent &s);

struct ClosureResult {
  enum class Status { ClosedValid, Open, Refuted };
  enum class Method { Syntactic, Bounded, External };
  Status status = Status::Open;
  Method method = Method::Bounded;
  int bound = 0;
  /// For Refuted: assignment of the sequent's symbols falsifying it.
  std::map<std::string, Value> counterexample;
  std::string note;
};

std::string closureToString(const ClosureResult &r);

struct SolverOptions {
  int bound = 4;
  std::int64_t budget = 1000000; // max assignments to enumerate
};

/// Bounded validity of a modality-free sequent: enumerates integers in
/// [-bound, bound] and both booleans for every symbol, in lexicographic
/// order by symbol name, so a refutation is the least counterexample.
/// Sound for refutation, incomplete for validity (labeled bounded).
ClosureResult boundedValid(const Sequent &s, const SolverOptions &opts);

/// Sorts of the sequent's symbols (program variables and fresh constants),
/// inferred from atom structure; unconstrained symbols default to Int.
SortEnv sequentSymbolSorts(const Sequent &s);

/// Evaluates a modality-free sequent under a total assignment.
bool evalSequent(const Sequent &s, const std::map<std::string, Value> &env);

/// SMT-LIB 2 script asserting the negation of the sequent over Int/Bool;
/// `(check-sat)` answers unsat iff the sequent is valid. Deterministic
/// symbol order.
std::string emitSMT(const Sequent &s);

} // namespace lsv
