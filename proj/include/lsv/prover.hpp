#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsv/calculus.hpp"
#include "lsv/parser.hpp"
#include "lsv/solver.hpp"

namespace lsv {

struct ProveOptions {
  int bound = 4;
  std::int64_t budget = 1000000;
  std::size_t maxSteps = 10000;
  std::string emitSmtDir;  // empty: no export
  std::string proofOut;    // empty: no proof file
};

/// A node of the proof tree: the goal plus either the rule applied to it or
/// its leaf closure status.
struct ProofNode {
  std::size_t id = 0;
  std::string path; // "0", "0.1", ... (premise indices from the root)
  Goal goal;
  std::string ruleName;             // empty for leaves
  std::vector<std::size_t> children;
  std::optional<ClosureResult> leafStatus;
  /// Leaves created by unwindExit premise 1 prove a bound on the loop, not
  /// the property itself; failing to close them downgrades the verdict to
  /// unknown instead of refuted.
  bool boundednessObligation = false;
};

struct ProofTree {
  std::vector<ProofNode> nodes; // nodes[0] is the root
  std::string render() const;
  std::string renderDot() const;
};

enum class Verdict { Proved, Refuted, Unknown };
const char *verdictName(Verdict v);

struct VerdictReport {
  Verdict verdict = Verdict::Unknown;
  std::map<std::string, std::size_t> ruleApplications;
  std::size_t leaves = 0;
  std::map<std::string, std::size_t> closedBy; // method name -> count
  std::size_t openLeaves = 0;
  std::size_t refutedLeaves = 0;
  std::vector<std::string> artifacts;
  std::map<std::string, Value> counterexample; // first refuted leaf
  std::string error;

  /// Line-oriented `key: value` rendering followed by a one-line JSON dump
  /// with stable key order.
  std::string render() const;
  std::string toJson() const;
};

int verdictExitCode(const VerdictReport &r); // 0 proved, 1 refuted, 2 unknown

struct ProveResult {
  VerdictReport report;
  ProofTree tree;
};

/// Builds `pre |- [program](post)` and drives the calculus: basic symbolic
/// execution and loop-scope rules eagerly; at a loop, the initializer
/// pull-out if needed, then the annotation-selected rule (invariant rule
/// once, or the unwind rule per remaining budget followed by a guard-
/// refutation exit). Leaves close via the bounded solver.
ProveResult prove(const AnnotatedProgram &ap, const ProveOptions &opts);

/// Convenience: parse then prove.
ProveResult proveFile(const std::string &text, const ProveOptions &opts);

/// Source-to-source exposure of the program-level loop rules
/// (pullOutLoopInitializer, unwindWhileLoop, unwindForLoop) at the
/// `occurrence`-th loop (1-based, source order). Fresh flags are rendered
/// as declared boolean variables initialized per the rule's update.
std::string desugar(const StmtList &program, const std::string &ruleName,
                    std::size_t occurrence);

/// Loops of a program in source order (label wrappers transparent).
std::vector<StmtPtr> loopsInOrder(const StmtList &program);

} // namespace lsv
