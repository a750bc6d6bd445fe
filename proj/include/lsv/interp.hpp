#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lsv/ast.hpp"
#include "lsv/dl.hpp"

namespace lsv {

using Value = std::variant<std::int64_t, bool>;

std::string valueToString(const Value &v);
Sort sortOfValue(const Value &v);

/// Raised on undeclared-variable access, sort mismatches and similar
/// dynamic errors. Validated, well-sorted programs never raise it.
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Block-scoped variable environment. Scope 0 holds the ambient variables
/// supplied by the initial state.
struct ConcreteState {
  std::vector<std::map<std::string, Value>> scopes;

  ConcreteState() : scopes(1) {}
  explicit ConcreteState(std::map<std::string, Value> ambient)
      : scopes{std::move(ambient)} {}

  void pushScope() { scopes.emplace_back(); }
  void popScope() { scopes.pop_back(); }
  void declare(const std::string &name, Value v);
  void assign(const std::string &name, Value v);
  const Value *lookup(const std::string &name) const;
  Value get(const std::string &name) const;

  /// Visible bindings, innermost declaration winning.
  std::map<std::string, Value> flatten() const;
};

struct Outcome {
  enum class Kind { Normal, Break, Continue, Exception, FuelExhausted };
  Kind kind = Kind::Normal;
  std::optional<std::string> label; // Break/Continue
  std::optional<Value> thrown;      // Exception
  ConcreteState state;

  bool isNormal() const { return kind == Kind::Normal; }
};

std::string outcomeToString(const Outcome &o);

/// Big-step execution with a fuel bound: fuel ticks down per executed
/// statement and per loop iteration; hitting zero yields FuelExhausted.
Outcome run(const StmtList &program, const ConcreteState &init,
            std::int64_t fuel);

// ---------------------------------------------------------------------------
// Differential-testing oracle.
// ---------------------------------------------------------------------------

struct Counterexample {
  std::map<std::string, Value> initial;
  std::string outcome1;
  std::string outcome2;
};

struct EquivVerdict {
  bool equivalent = true;
  std::size_t testedStates = 0;
  std::size_t skippedStates = 0; // fuel exhaustion on either side
  std::optional<Counterexample> cex;
};

/// Runs both programs from identical initial states (exhaustive when the
/// state space is at most 10^4, else `trials` sampled states) and compares
/// outcome kind, labels, thrown values, and final values of `vars`.
/// Initial values: integers in [-domainBound, domainBound], booleans both.
/// `sorts` assigns each variable its sort; missing entries default to Int.
EquivVerdict equivCheck(const StmtList &p1, const StmtList &p2,
                        const std::set<std::string> &vars,
                        const SortEnv &sorts, int domainBound,
                        std::size_t trials, std::uint64_t seed,
                        std::int64_t fuel = 4096);

enum class BoxCheck { Holds, Fails, Unknown };

/// Ground truth for the box modality: run the program; on normal
/// termination evaluate the postcondition, abrupt termination by exception
/// satisfies the box, fuel exhaustion is unknown.
BoxCheck checkBoxSemantics(const StmtList &program, const FormulaPtr &post,
                           const ConcreteState &init, std::int64_t fuel);
BoxCheck checkBoxSemantics(const FormulaPtr &boxFormula,
                           const ConcreteState &init, std::int64_t fuel);

/// Evaluates a modality-free formula in a state (program variables and
/// fresh constants both read from the assignment map).
bool evalFormula(const FormulaPtr &f, const std::map<std::string, Value> &env);
Value evalTerm(const TermPtr &t, const std::map<std::string, Value> &env);

} // namespace lsv
