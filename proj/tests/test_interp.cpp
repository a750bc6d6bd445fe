#include <doctest.h>

#include "lsv/fuzz.hpp"
#include "testutil.hpp"

using namespace lsv;
using namespace lsvtest;

TEST_CASE("run: for-loop with update list, guard read after body") {
  StmtList p = parseProgram("b = true; for (; b; i = i + 1) { b = false; }");
  Outcome o = run(p, cstate({{"b", false}, {"i", std::int64_t{0}}}), 100);
  CHECK(outcomeToString(o) == "normal {b=false, i=1}");
}

TEST_CASE("run: continue before the update still runs the update") {
  StmtList p =
      parseProgram("b = true; for (; b; i = i + 1) { b = false; continue; }");
  Outcome o = run(p, cstate({{"b", false}, {"i", std::int64_t{0}}}), 100);
  CHECK(outcomeToString(o) == "normal {b=false, i=1}");
}

TEST_CASE("run: loop scope intercepts continue, sets index false, resumes") {
  StmtList p = parseProgram("loop-scope(x) { continue; if (!x) { i = i + 1; } }");
  Outcome o = run(p, cstate({{"x", true}, {"i", std::int64_t{0}}}), 100);
  CHECK(outcomeToString(o) == "normal {i=1, x=false}");
}

TEST_CASE("run: loop scope break leaves the index untouched") {
  StmtList p = parseProgram("loop-scope(x) { break; i = 9; } j = 1;");
  Outcome o = run(p, cstate({{"x", true}, {"i", std::int64_t{0}},
                             {"j", std::int64_t{0}}}), 100);
  CHECK(outcomeToString(o) == "normal {i=0, j=1, x=true}");
}

TEST_CASE("run: abrupt outcomes") {
  Outcome o1 = run(parseProgram("throw 1;"), cstate({}), 100);
  CHECK(o1.kind == Outcome::Kind::Exception);
  CHECK(outcomeToString(o1) == "exception(1) {}");

  Outcome o2 = run(parseProgram("try { throw i + 1; } catch (e) { s = e; }"),
                   cstate({{"i", std::int64_t{4}}, {"s", std::int64_t{0}}}), 100);
  CHECK(outcomeToString(o2) == "normal {i=4, s=5}");

  // uncaught signals from label-valid programs cannot occur; loop scopes
  // swallow their own break
  Outcome o3 = run(parseProgram("loop-scope(x) { break; }"),
                   cstate({{"x", false}}), 100);
  CHECK(o3.kind == Outcome::Kind::Normal);
}

TEST_CASE("run: labeled break and continue") {
  // labeled continue of an outer loop aborts the inner loop
  StmtList p = parseProgram("l1: while (i < 3) { i = i + 1; while (true) { continue l1; } }");
  Outcome o = run(p, cstate({{"i", std::int64_t{0}}}), 1000);
  CHECK(outcomeToString(o) == "normal {i=3}");

  StmtList q = parseProgram("l1: { if (b) break l1; i = 1; } j = 2;");
  Outcome o2 = run(q, cstate({{"b", true}, {"i", std::int64_t{0}},
                              {"j", std::int64_t{0}}}), 100);
  CHECK(outcomeToString(o2) == "normal {b=true, i=0, j=2}");

  // continue to a labeled non-loop block converts to an unlabeled continue
  // that the enclosing loop catches
  StmtList r = parseProgram(
      "while (i < 2) { l1: { i = i + 1; continue l1; s = s + 10; } s = s + 100; }");
  Outcome o3 = run(r, cstate({{"i", std::int64_t{0}}, {"s", std::int64_t{0}}}), 1000);
  CHECK(outcomeToString(o3) == "normal {i=2, s=0}");
}

TEST_CASE("run: fuel exhaustion and monotonicity") {
  StmtList p = parseProgram("while (true) { i = i + 1; }");
  Outcome o = run(p, cstate({{"i", std::int64_t{0}}}), 100);
  CHECK(o.kind == Outcome::Kind::FuelExhausted);
  CHECK(outcomeToString(o) == "fuel-exhausted");

  // if a run terminates with fuel k, any larger fuel gives the same outcome
  StmtList q = parseProgram("b = true; for (; b; i = i + 1) { b = false; }");
  ConcreteState init = cstate({{"b", false}, {"i", std::int64_t{0}}});
  std::string expected;
  bool terminated = false;
  for (std::int64_t fuel = 1; fuel < 64; ++fuel) {
    Outcome o2 = run(q, init, fuel);
    if (o2.kind == Outcome::Kind::FuelExhausted) {
      CHECK(!terminated);
      continue;
    }
    if (!terminated) {
      terminated = true;
      expected = outcomeToString(o2);
    }
    CHECK(outcomeToString(o2) == expected);
  }
  CHECK(terminated);
}

TEST_CASE("run: determinism") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    ProgramGen gen(seed);
    StmtList prog = gen.program(3);
    auto init = cstate({{"i", std::int64_t{1}}, {"j", std::int64_t{-1}},
                        {"s", std::int64_t{0}}, {"b", true}, {"c", false}});
    // declared-elsewhere names may appear; give them values too
    for (const auto &v : identifiersOfProgram(prog))
      if (!init.lookup(v))
        init.scopes[0][v] = std::int64_t{0};
    CHECK(outcomeToString(run(prog, init, 512)) ==
          outcomeToString(run(prog, init, 512)));
  }
}

TEST_CASE("equivCheck: the two guard-and-continue programs agree") {
  StmtList p5 = parseProgram("b = true; for (; b; i = i + 1) { b = false; }");
  StmtList p6 =
      parseProgram("b = true; for (; b; i = i + 1) { b = false; continue; }");
  SortEnv sorts{{"b", Sort::Bool}, {"i", Sort::Int}};
  EquivVerdict v = equivCheck(p5, p6, {"b", "i"}, sorts, 2, 100, 42);
  CHECK(v.equivalent);
  CHECK(v.testedStates == 10); // exhaustive: 2 x 5
}

TEST_CASE("equivCheck: deliberate mismatch is found") {
  StmtList p1 = parseProgram("i = i + 1;");
  StmtList p2 = parseProgram("i = i + 1; i = i + 1;");
  SortEnv sorts{{"i", Sort::Int}};
  EquivVerdict v = equivCheck(p1, p2, {"i"}, sorts, 2, 100, 42);
  CHECK(!v.equivalent);
  REQUIRE(v.cex.has_value());
}

TEST_CASE("checkBoxSemantics") {
  CHECK(checkBoxSemantics(parseProgram("while (false) ;"), mkTrue(), cstate({}),
                          100) == BoxCheck::Holds);
  // abrupt termination satisfies the box
  CHECK(checkBoxSemantics(parseProgram("throw 1;"), mkFalse(), cstate({}),
                          100) == BoxCheck::Holds);
  StmtList p = parseProgram("b = true; for (; b; i = i + 1) { b = false; }");
  FormulaPtr post = mkAtom(RelOp::Eq, mkProgVar("i"), mkIntConst(1));
  CHECK(checkBoxSemantics(p, post, cstate({{"b", false}, {"i", std::int64_t{0}}}),
                          100) == BoxCheck::Holds);
  CHECK(checkBoxSemantics(p, post, cstate({{"b", false}, {"i", std::int64_t{5}}}),
                          100) == BoxCheck::Fails);
  CHECK(checkBoxSemantics(parseProgram("while (true) ;"), mkTrue(), cstate({}),
                          100) == BoxCheck::Unknown);
}

TEST_CASE("loop-scope continue law: continue; p == x = false; p") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    ProgramGen gen(seed, GenOptions{2, 2, true, true, true});
    StmtList tail;
    std::size_t n = gen.below(3);
    for (std::size_t k = 0; k < n; ++k)
      tail.push_back(gen.stmt(1));
    StmtList withContinue{mkLoopScope("x0", [&] {
      StmtList b{mkContinue()};
      b.insert(b.end(), tail.begin(), tail.end());
      return b;
    }())};
    StmtList withAssign{mkLoopScope("x0", [&] {
      StmtList b{mkAssign("x0", mkBoolLit(false))};
      b.insert(b.end(), tail.begin(), tail.end());
      return b;
    }())};
    SortEnv sorts = gen.sorts();
    sorts["x0"] = Sort::Bool;
    std::set<std::string> vars = identifiersOfProgram(withContinue);
    for (const auto &d : declaredVars(withContinue))
      vars.erase(d);
    EquivVerdict v =
        equivCheck(withContinue, withAssign, vars, sorts, 2, 60, seed);
    CAPTURE(prettyPrint(withContinue));
    CHECK(v.equivalent);
  }
}

TEST_CASE("for desugars to while only without continue") {
  // break/continue-free bodies: for(init; g; u) p == { init' while (g) { p u' } }
  StmtList f1 = parseProgram("for (i = 0; i < n; i++) s = s + i;");
  StmtList w1 = parseProgram("{ i = 0; while (i < n) { s = s + i; i++; } }");
  SortEnv sorts{{"i", Sort::Int}, {"n", Sort::Int}, {"s", Sort::Int}};
  EquivVerdict v1 = equivCheck(f1, w1, {"i", "n", "s"}, sorts, 2, 200, 3);
  CHECK(v1.equivalent);

  // with continue, the naive desugaring skips the update and differs;
  // this is the behavior the loop-scope encoding gets right
  StmtList f2 =
      parseProgram("b = true; for (; b; i = i + 1) { b = false; continue; }");
  StmtList w2 = parseProgram(
      "b = true; while (b) { { b = false; continue; } i = i + 1; }");
  SortEnv sorts2{{"b", Sort::Bool}, {"i", Sort::Int}};
  EquivVerdict v2 = equivCheck(f2, w2, {"b", "i"}, sorts2, 2, 200, 3);
  CHECK(!v2.equivalent);
  REQUIRE(v2.cex.has_value());
  CHECK(v2.cex->outcome1 != v2.cex->outcome2);
}

TEST_CASE("run rejects dynamic sort violations") {
  CHECK_THROWS_AS(run({mkAssign("i", mkVar("zz"))}, cstate({{"i", std::int64_t{0}}}), 10),
                  EvalError);
  CHECK_THROWS_AS(run({mkAssign("i", mkBoolLit(true))},
                      cstate({{"i", std::int64_t{0}}}), 10),
                  EvalError);
}
