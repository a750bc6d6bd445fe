#include <doctest.h>

#include "lsv/fuzz.hpp"
#include "testutil.hpp"

using namespace lsv;
using namespace lsvtest;

TEST_CASE("generator: programs are label-valid and sort-correct") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    ProgramGen gen(seed);
    StmtList prog = gen.program(4);
    CAPTURE(prettyPrint(prog));
    CHECK_NOTHROW(validateProgram(prog));
    CHECK_NOTHROW(inferSorts(prog));
  }
}

TEST_CASE("fuzz: a quick pass over every rule finds nothing") {
  FuzzOptions opts;
  opts.seed = 7;
  opts.trials = 40;
  opts.statesPerTrial = 16;
  FuzzReport r = fuzzRules(opts);
  if (r.failed)
    FAIL_CHECK(r.render());
  for (const auto &rule : fuzzableRules())
    CHECK(r.trialsPerRule.at(rule) == 40);
}

TEST_CASE("fuzz: rule filter restricts the run") {
  FuzzOptions opts;
  opts.seed = 9;
  opts.trials = 10;
  opts.rule = rules::continueIndexedLoopScope;
  FuzzReport r = fuzzRules(opts);
  CHECK(!r.failed);
  CHECK(r.trialsPerRule.size() == 1);
  CHECK(r.trialsPerRule.count(rules::continueIndexedLoopScope) == 1);

  FuzzOptions all;
  all.seed = 9;
  all.trials = 5;
  all.rule = "applyBasicSE";
  FuzzReport r2 = fuzzRules(all);
  CHECK(r2.trialsPerRule.size() == 11); // all basic cases
}

TEST_CASE("fuzz: reports are deterministic for a fixed seed") {
  FuzzOptions opts;
  opts.seed = 42;
  opts.trials = 15;
  FuzzReport a = fuzzRules(opts);
  FuzzReport b = fuzzRules(opts);
  CHECK(a.render() == b.render());
}

TEST_CASE("fuzz verdict report maps to exit codes") {
  FuzzOptions opts;
  opts.seed = 3;
  opts.trials = 5;
  FuzzReport r = fuzzRules(opts);
  VerdictReport vr = r.toVerdictReport();
  CHECK(vr.verdict == Verdict::Proved);
  CHECK(verdictExitCode(vr) == 0);
}

TEST_CASE("deletionVariants: one statement removed at every position") {
  StmtList prog = parseProgram("i = 1; { j = 2; s = 3; } if (b) { i = 4; }");
  std::vector<StmtList> vars = deletionVariants(prog);
  // 3 top-level removals + 2 inside the block + 1 inside the if-then block
  CHECK(vars.size() == 6);
  bool sawBlockShrink = false;
  for (const auto &v : vars) {
    CHECK(prettyPrint(v) != prettyPrint(prog));
    if (prettyPrint(v) == "i = 1; { s = 3; } if (b) { i = 4; }")
      sawBlockShrink = true;
  }
  CHECK(sawBlockShrink);
}

TEST_CASE("fuzz: unknown rule filter is rejected") {
  FuzzOptions opts;
  opts.rule = "bogusRule";
  CHECK_THROWS_AS(fuzzRules(opts), std::invalid_argument);
}
