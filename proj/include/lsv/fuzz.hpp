#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsv/ast.hpp"
#include "lsv/dl.hpp"
#include "lsv/prover.hpp"

namespace lsv {

struct FuzzOptions {
  std::uint64_t seed = 42;
  std::size_t trials = 1000;      // per rule case
  std::string rule;               // empty: all rules
  int domainBound = 2;
  std::size_t statesPerTrial = 24; // sampled initial states per program
  bool minimize = true;
};

struct FuzzCounterexample {
  std::string rule;
  std::string conclusionProgram;
  std::string premiseProgram;
  std::string initialState;
  std::string outcome1;
  std::string outcome2;
};

struct FuzzReport {
  bool failed = false;
  std::map<std::string, std::size_t> trialsPerRule;
  std::map<std::string, std::size_t> skippedStates;
  std::vector<FuzzCounterexample> counterexamples;

  VerdictReport toVerdictReport() const;
  std::string render() const;
};

/// Programs with one statement deleted somewhere (used to shrink fuzz
/// counterexamples; exposed for tests).
std::vector<StmtList> deletionVariants(const StmtList &program);

/// Names accepted by FuzzOptions::rule; `applyBasicSE` runs every basic
/// case, a specific case can be addressed as `applyBasicSE[assign]` etc.
std::vector<std::string> fuzzableRules();

/// Generates random well-formed programs shaped so the rule under test is
/// applicable at the active statement, applies the single rule through the
/// engine, and differentially tests premise against conclusion under the
/// interpreter on sampled initial states.
FuzzReport fuzzRules(const FuzzOptions &opts);

// --- Random program generation (exposed for property tests) ---------------

struct GenOptions {
  int maxDepth = 4;
  int domainBound = 2;
  bool allowLoops = true;
  bool allowThrow = true;
  bool allowTry = true;
};

class ProgramGen {
public:
  ProgramGen(std::uint64_t seed, GenOptions opts = {});

  /// A label-valid, sort-correct random program over the fixed ambient
  /// variables i, j, s : int and b, c : bool.
  StmtList program(std::size_t maxStmts = 4);

  StmtPtr stmt(int depth);
  ExprPtr intExpr(int depth);
  ExprPtr boolExpr(int depth);
  UpdateExpr updateExpr();

  std::uint64_t nextRaw();
  std::uint64_t below(std::uint64_t n); // uniform in [0, n)
  std::int64_t intIn(std::int64_t lo, std::int64_t hi);
  bool coin(double p = 0.5);

  const SortEnv &sorts() const { return sorts_; }

private:
  std::uint64_t state_;
  GenOptions opts_;
  SortEnv sorts_;
  unsigned labelCounter_ = 0;
  unsigned declCounter_ = 0;
  int loopDepth_ = 0;
  std::vector<std::string> labelStack_; // labels usable by break/continue
  std::vector<bool> labelIsLoop_;

  StmtPtr loopStmt(int depth);
  StmtPtr abruptStmt();
};

} // namespace lsv
