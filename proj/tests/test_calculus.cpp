#include <doctest.h>

#include "lsv/calculus.hpp"
#include "lsv/fuzz.hpp"
#include "lsv/solver.hpp"
#include "testutil.hpp"

using namespace lsv;
using namespace lsvtest;

namespace {

Goal goalOf(const std::string &progText, const std::string &postText = "true",
            Update u = {}) {
  Goal g;
  StmtList prog = parseProgram(progText);
  SortEnv sorts = inferSorts(prog);
  for (const auto &e : u.elems)
    sorts.emplace(e.var, Sort::Bool); // harmless default for test updates
  FormulaPtr post = parseFormula(postText, sorts);
  g.sequent.succedent.push_back(mkUpdApp(u, mkBox(prog, post)));
  g.pool = std::make_shared<FreshNamePool>();
  g.pool->reserveAll(identifiersOfProgram(prog));
  g.pool->reserveAll(labelsOfProgram(prog));
  g.pool->reserveAll(freeProgVars(post));
  g.sorts = std::make_shared<SortEnv>(inferSorts(prog, {post}));
  return g;
}

std::string premiseProgram(const RuleResult &res, std::size_t k = 0) {
  auto gb = selectBoxFormula(res.premises.at(k).sequent);
  REQUIRE(gb.has_value());
  return prettyPrint(gb->box->program);
}

Update premiseUpdate(const RuleResult &res, std::size_t k = 0) {
  auto gb = selectBoxFormula(res.premises.at(k).sequent);
  REQUIRE(gb.has_value());
  return gb->update;
}

} // namespace

TEST_CASE("locateActiveStatement: descends labels and blocks") {
  StmtList prog = parseProgram("l1: { i = 1; j = 2; } k = 3;");
  ActiveDecomposition dec = locateActiveStatement(prog);
  CHECK(prettyPrint(dec.active) == "i = 1;");
  REQUIRE(dec.prefix.size() == 2);
  CHECK(dec.prefix[0].kind == Frame::Kind::Labeled);
  CHECK(dec.prefix[0].labels == std::vector<std::string>{"l1"});
  CHECK(dec.prefix[1].kind == Frame::Kind::Block);
  REQUIRE(dec.rest.size() == 1);
  CHECK(prettyPrint(dec.rest[0]) == "j = 2;");
  // rebuild([active] ++ rest) reproduces the original program
  StmtList inner{dec.active};
  inner.insert(inner.end(), dec.rest.begin(), dec.rest.end());
  CHECK(equal(dec.rebuild(inner), prog));
}

TEST_CASE("locateActiveStatement: continue directly inside a loop scope") {
  StmtList prog = parseProgram("loop-scope(x) { continue; i = 1; }");
  ActiveDecomposition dec = locateActiveStatement(prog);
  const auto *c = as<ContinueStmt>(dec.active);
  REQUIRE(c != nullptr);
  CHECK(!c->label);
  REQUIRE(dec.innermostFrame() != nullptr);
  CHECK(dec.innermostFrame()->kind == Frame::Kind::LoopScope);
  CHECK(classifyActive(dec) == ActiveKind::ContinueLoopScope);
}

TEST_CASE("locateActiveStatement: empty loop scope is the active construct") {
  StmtList prog = parseProgram("loop-scope(x) { } i = 1;");
  ActiveDecomposition dec = locateActiveStatement(prog);
  CHECK(as<LoopScopeStmt>(dec.active) != nullptr);
  CHECK(classifyActive(dec) == ActiveKind::EmptyLoopScope);
  CHECK(dec.rest.size() == 1);
}

TEST_CASE("applyBasicSE: assignment extends the pending update") {
  Goal g = goalOf("i = 3; j = i;", "true", Update::elem("k", trueConst()));
  RuleResult res = applyBasicSE(g);
  REQUIRE(res.premises.size() == 1);
  CHECK(premiseProgram(res) == "j = i;");
  CHECK(prettyPrint(premiseUpdate(res)) == "{k := TRUE || i := 3}");
}

TEST_CASE("applyBasicSE: assignment value is rewritten under the update") {
  Goal g = goalOf("i = i + 1;", "true", Update::elem("i", mkIntConst(3)));
  RuleResult res = applyBasicSE(g);
  Update u = premiseUpdate(res);
  // i := U(i + 1) = 3 + 1; the solver normalization folds it to 4
  CHECK(prettyPrint(u.normalized().bindingMap().at("i")) == "3 + 1");
  CHECK(prettyPrint(simplifyTerm(u.bindingMap().at("i"))) == "4");
}

TEST_CASE("applyBasicSE: if splits on the guard") {
  Goal g = goalOf("if (b) i = 1; else i = 2; j = 3;");
  RuleResult res = applyBasicSE(g);
  REQUIRE(res.premises.size() == 2);
  CHECK(premiseProgram(res, 0) == "i = 1; j = 3;");
  CHECK(premiseProgram(res, 1) == "i = 2; j = 3;");
  REQUIRE(res.premises[0].sequent.antecedent.size() == 1);
  CHECK(prettyPrint(res.premises[0].sequent.antecedent[0]) == "b = TRUE");
  CHECK(prettyPrint(simplify(res.premises[1].sequent.antecedent[0])) ==
        "b = FALSE");
}

TEST_CASE("applyBasicSE: labeled continue discards, converts, then reaches the scope") {
  Goal g = goalOf("loop-scope(x) { l1: { continue l1; i = 1; } j = 1; }");

  // step 1: the block discards its remainder
  RuleResult r1 = applyBasicSE(g);
  CHECK(premiseProgram(r1) == "loop-scope(x) { l1: continue l1; j = 1; }");

  // step 2: the matching label converts to an unlabeled continue
  RuleResult r2 = applyBasicSE(r1.premises[0]);
  CHECK(premiseProgram(r2) == "loop-scope(x) { continue; j = 1; }");

  // step 3: the loop scope turns it into x = false, keeping the trailer
  ActiveDecomposition dec = locateActiveStatement(
      selectBoxFormula(r2.premises[0].sequent)->box->program);
  CHECK(classifyActive(dec) == ActiveKind::ContinueLoopScope);
  RuleResult r3 = continueIndexedLoopScope(r2.premises[0]);
  CHECK(premiseProgram(r3) == "loop-scope(x) { x = false; j = 1; }");

  // the chain is interpreter-equivalent to the original program
  StmtList orig = parseProgram("loop-scope(x) { l1: { continue l1; i = 1; } j = 1; }");
  StmtList fin = selectBoxFormula(r3.premises[0].sequent)->box->program;
  SortEnv sorts{{"x", Sort::Bool}, {"i", Sort::Int}, {"j", Sort::Int}};
  EquivVerdict v = equivCheck(orig, fin, {"x", "i", "j"}, sorts, 2, 100, 5);
  CHECK(v.equivalent);
  CHECK(v.testedStates >= 50);
}

TEST_CASE("emptyIndexedLoopScope: conditional premise over the index") {
  Goal g = goalOf("loop-scope(x) { } i = 1;", "i == 1",
                  Update::elem("x", trueConst()));
  RuleResult res = emptyIndexedLoopScope(g);
  REQUIRE(res.premises.size() == 1);
  const auto &f = res.premises[0].sequent.succedent[0];
  CHECK(prettyPrint(f) ==
        "{x := TRUE}((x = TRUE -> [ i = 1; ](i = 1)) & (x = FALSE -> i = 1))");
  // with x bound TRUE the x = TRUE branch is the obligation [omega]phi
  FormulaPtr s = simplify(f);
  CHECK(prettyPrint(s) == "{x := TRUE}[ i = 1; ](i = 1)");
}

TEST_CASE("emptyIndexedLoopScope: x = FALSE yields the postcondition directly") {
  Goal g = goalOf("loop-scope(x) { }", "i == 1",
                  Update::elem("x", falseConst()));
  RuleResult res = emptyIndexedLoopScope(g);
  FormulaPtr s = simplify(res.premises[0].sequent.succedent[0]);
  CHECK(prettyPrint(s) == "i = 1");
}

TEST_CASE("emptyIndexedLoopScope: invariant-style conditional resolves per branch") {
  SortEnv sorts{{"x", Sort::Bool}, {"s", Sort::Int}, {"i", Sort::Int},
                {"n", Sort::Int}};
  FormulaPtr phi = parseFormula("s == n", sorts);
  FormulaPtr inv = parseFormula("s == i && i <= n", sorts);
  FormulaPtr psi = mkAnd(
      mkImp(mkAtom(RelOp::Eq, mkProgVar("x"), trueConst()), phi),
      mkImp(mkAtom(RelOp::Eq, mkProgVar("x"), falseConst()), inv));

  Goal g;
  g.pool = std::make_shared<FreshNamePool>();
  g.sorts = std::make_shared<SortEnv>(sorts);
  g.sequent.succedent.push_back(mkUpdApp(
      Update::elem("x", falseConst()),
      mkBox(parseProgram("loop-scope(x) { }"), psi)));
  RuleResult res = emptyIndexedLoopScope(g);
  // x = FALSE: the invariant branch is what remains
  CHECK(prettyPrint(simplify(res.premises[0].sequent.succedent[0])) ==
        "s = i & i <= n");

  Goal g2 = g;
  g2.sequent.succedent[0] = mkUpdApp(
      Update::elem("x", trueConst()),
      mkBox(parseProgram("loop-scope(x) { }"), psi));
  RuleResult res2 = emptyIndexedLoopScope(g2);
  // x = TRUE with empty omega: the postcondition branch remains
  CHECK(prettyPrint(simplify(res2.premises[0].sequent.succedent[0])) ==
        "s = n");
}

TEST_CASE("continueIndexedLoopScope: trailing statements and context kept") {
  Goal g = goalOf("loop-scope(x) { continue; if (!x) { i = i + 1; } }");
  RuleResult res = continueIndexedLoopScope(g);
  REQUIRE(res.premises.size() == 1);
  CHECK(premiseProgram(res) ==
        "loop-scope(x) { x = false; if (!x) { i = i + 1; } }");

  Goal g2 = goalOf("loop-scope(x) { continue; }");
  CHECK(premiseProgram(continueIndexedLoopScope(g2)) ==
        "loop-scope(x) { x = false; }");

  // both sides end identically under the interpreter
  StmtList c = parseProgram("loop-scope(x) { continue; if (!x) { i = i + 1; } }");
  StmtList p = parseProgram("loop-scope(x) { x = false; if (!x) { i = i + 1; } }");
  Outcome o1 = run(c, cstate({{"x", true}, {"i", std::int64_t{0}}}), 100);
  Outcome o2 = run(p, cstate({{"x", true}, {"i", std::int64_t{0}}}), 100);
  CHECK(outcomeToString(o1) == "normal {i=1, x=false}");
  CHECK(outcomeToString(o1) == outcomeToString(o2));
}

TEST_CASE("breakIndexedLoopScope: scope and remainder discarded, x untouched") {
  Goal g = goalOf("loop-scope(x) { break; i = 9; } j = 1;", "true",
                  Update::elem("x", trueConst()));
  RuleResult res = breakIndexedLoopScope(g);
  REQUIRE(res.premises.size() == 1);
  CHECK(premiseProgram(res) == "j = 1;");
  CHECK(prettyPrint(premiseUpdate(res)) == "{x := TRUE}");

  // interpreter: x unchanged across random states
  StmtList c = parseProgram("loop-scope(x) { break; i = 9; } j = 1;");
  StmtList p = parseProgram("j = 1;");
  SortEnv sorts{{"x", Sort::Bool}, {"i", Sort::Int}, {"j", Sort::Int}};
  EquivVerdict v = equivCheck(c, p, {"x", "i", "j"}, sorts, 2, 100, 11);
  CHECK(v.equivalent);
}

TEST_CASE("pullOutLoopInitializer: block with init, labels move inside") {
  Goal g = goalOf("l1: for (int i = 0; i < n; i++) s = s + i; j = 1;");
  RuleResult res = pullOutLoopInitializer(g);
  REQUIRE(res.premises.size() == 1);
  CHECK(premiseProgram(res) ==
        "{ int i = 0; l1: for (; i < n; i++) s = s + i; } j = 1;");
  CHECK(res.newLoop != nullptr);
  CHECK(as<ForStmt>(res.newLoop)->init.kind == ForInit::Kind::Empty);

  // not applicable without an initializer
  Goal g2 = goalOf("for (;;) { break; }");
  CHECK_THROWS_AS(pullOutLoopInitializer(g2), RuleError);
}

TEST_CASE("loopInvariantWhile: exact premise shapes") {
  SortEnv sorts{{"b", Sort::Bool}, {"s", Sort::Int}};
  Goal g = goalOf("l1: while (b) { s = s + 1; } j = 2;", "s == 3");
  FormulaPtr inv = parseFormula("s <= 3", sorts);
  RuleResult res = loopInvariantWhile(g, inv);
  REQUIRE(res.premises.size() == 2);

  // premise 1: initially valid, same update
  CHECK(prettyPrint(res.premises[0].sequent.succedent[0]) == "s <= 3");

  // premise 2: havoc of assigned vars, x fresh and TRUE, wrapped body
  CHECK(premiseProgram(res, 1) ==
        "loop-scope(x) { if (b) l1: { s = s + 1; x = false; } } j = 2;");
  CHECK(prettyPrint(premiseUpdate(res, 1)) == "{s := s#0 || x := TRUE}");
  REQUIRE(res.premises[1].sequent.antecedent.size() == 1);
  CHECK(prettyPrint(res.premises[1].sequent.antecedent[0]) == "s#0 <= 3");
  CHECK(prettyPrint(selectBoxFormula(res.premises[1].sequent)->box->post) ==
        "(x = TRUE -> s = 3) & (x = FALSE -> s <= 3)");

  // the fresh index occurs nowhere in the conclusion
  CHECK(freeProgVars(g.sequent.succedent[0]).count("x") == 0);
}

TEST_CASE("loopInvariantFor: update list runs under the x wrapper") {
  Goal g = goalOf("for (; b; i++) { b = false; }");
  FormulaPtr inv = mkTrue();
  RuleResult res = loopInvariantFor(g, inv);
  REQUIRE(res.premises.size() == 2);
  CHECK(premiseProgram(res, 1) ==
        "loop-scope(x) { if (b) { b = false; x = false; } "
        "if (!x) { x = true; i++; x = false; } }");
}

TEST_CASE("loopInvariantFor: empty guard becomes true") {
  Goal g = goalOf("for (;; i++) { break; }");
  RuleResult res = loopInvariantFor(g, mkTrue());
  CHECK(premiseProgram(res, 1) ==
        "loop-scope(x) { if (true) { break; x = false; } "
        "if (!x) { x = true; i++; x = false; } }");
}

TEST_CASE("loopInvariantFor: refuses a loop with an initializer") {
  Goal g = goalOf("for (int i = 0; i < 3; i++) s = s + 1;");
  CHECK_THROWS_AS(loopInvariantFor(g, mkTrue()), RuleError);
}

TEST_CASE("unwindWhileLoop: scope, continuation flag, trailing loop") {
  Goal g = goalOf("l1: while (b) { b = false; } j = 1;");
  RuleResult res = unwindWhileLoop(g);
  REQUIRE(res.premises.size() == 1);
  CHECK(premiseProgram(res) ==
        "loop-scope(x) { if (b) l1: { b = false; x = false; } "
        "if (!x) { x = true; cont = true; } } "
        "if (cont) l1: while (b) { b = false; } j = 1;");
  CHECK(prettyPrint(premiseUpdate(res)) == "{x := TRUE || cont := FALSE}");

  // label list appears verbatim on the wrapped block and the trailing loop
  CHECK(premiseProgram(res).find("l1: { b = false;") != std::string::npos);
  CHECK(premiseProgram(res).find("if (cont) l1: while") != std::string::npos);
}

TEST_CASE("unwindForLoop: update before cont, trailing for kept") {
  Goal g = goalOf("for (; b; i++) { b = false; }");
  RuleResult res = unwindForLoop(g);
  REQUIRE(res.premises.size() == 1);
  CHECK(premiseProgram(res) ==
        "loop-scope(x) { if (b) { b = false; x = false; } "
        "if (!x) { x = true; i++; cont = true; } } "
        "if (cont) for (; b; i++) { b = false; }");
}

TEST_CASE("unwind keeps the original loop node for the trailer") {
  StmtList prog = parseProgram("while (b) { b = false; }");
  Goal g;
  g.sequent.succedent.push_back(mkBox(prog, mkTrue()));
  g.pool = std::make_shared<FreshNamePool>();
  g.pool->reserveAll(identifiersOfProgram(prog));
  g.sorts = std::make_shared<SortEnv>(inferSorts(prog));
  RuleResult res = unwindWhileLoop(g);
  auto gb = selectBoxFormula(res.premises[0].sequent);
  const auto *trailer = as<IfStmt>(gb->box->program[1]);
  REQUIRE(trailer != nullptr);
  CHECK(trailer->thenBranch.get() == prog[0].get());
}

TEST_CASE("exception ordering: update flag wrappers") {
  // the continuation blocks guarantee that a throwing update list leaves
  // x true, and for unwinding additionally cont false
  StmtList updThrow{mkThrow(mkIntLit(7))};

  SUBCASE("invariant-for wrapper") {
    StmtList prog{mkLoopScope(
        "x", {scopedIterationIf(mkVar("b"), {}, mkBlock({mkAssign("b", mkBoolLit(false))}), "x"),
              invariantForUpdateIf(updThrow, "x")})};
    Outcome o = run(prog, cstate({{"x", true}, {"b", true}}), 100);
    REQUIRE(o.kind == Outcome::Kind::Exception);
    CHECK(o.state.flatten().at("x") == Value{true});

    // mutation: dropping the wrapper leaves x false on the exception path
    StmtList bad{mkLoopScope(
        "x", {scopedIterationIf(mkVar("b"), {}, mkBlock({mkAssign("b", mkBoolLit(false))}), "x"),
              mkIf(mkUnary(UnOp::Not, mkVar("x")), mkBlock(updThrow))})};
    Outcome ob = run(bad, cstate({{"x", true}, {"b", true}}), 100);
    REQUIRE(ob.kind == Outcome::Kind::Exception);
    CHECK(ob.state.flatten().at("x") == Value{false});
  }

  SUBCASE("unwind-for continuation") {
    StmtList prog{mkLoopScope(
        "x", {scopedIterationIf(mkVar("b"), {}, mkBlock({mkAssign("b", mkBoolLit(false))}), "x"),
              unwindForContinuationIf(updThrow, "x", "cont")})};
    Outcome o = run(prog, cstate({{"x", true}, {"b", true}, {"cont", false}}), 100);
    REQUIRE(o.kind == Outcome::Kind::Exception);
    CHECK(o.state.flatten().at("x") == Value{true});
    CHECK(o.state.flatten().at("cont") == Value{false});

    // mutation: setting cont before the update list lets cont leak true
    StmtList bad{mkLoopScope(
        "x",
        {scopedIterationIf(mkVar("b"), {}, mkBlock({mkAssign("b", mkBoolLit(false))}), "x"),
         mkIf(mkUnary(UnOp::Not, mkVar("x")),
              mkBlock([&] {
                StmtList blk{mkAssign("x", mkBoolLit(true)),
                             mkAssign("cont", mkBoolLit(true))};
                blk.insert(blk.end(), updThrow.begin(), updThrow.end());
                return blk;
              }()))})};
    Outcome ob = run(bad, cstate({{"x", true}, {"b", true}, {"cont", false}}), 100);
    REQUIRE(ob.kind == Outcome::Kind::Exception);
    CHECK(ob.state.flatten().at("cont") == Value{true}); // detected
  }
}

TEST_CASE("invariant rules: premise count and freshness, random loops") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    ProgramGen gen(seed);
    StmtPtr body = gen.stmt(2);
    StmtList prog;
    bool isFor = seed % 2 == 0;
    if (isFor)
      prog = {mkFor(ForInit::empty(), gen.boolExpr(1), {gen.updateExpr()}, body)};
    else
      prog = {mkWhile(gen.boolExpr(1), body)};
    Goal g;
    g.sequent.succedent.push_back(mkBox(prog, mkTrue()));
    g.pool = std::make_shared<FreshNamePool>();
    g.pool->reserveAll(identifiersOfProgram(prog));
    g.pool->reserveAll(labelsOfProgram(prog));
    g.sorts = std::make_shared<SortEnv>(gen.sorts());
    RuleResult res = isFor ? loopInvariantFor(g, mkTrue())
                           : loopInvariantWhile(g, mkTrue());
    CHECK(res.premises.size() == 2);
    // the fresh index is new: absent from the conclusion's formulas
    auto gb = selectBoxFormula(res.premises[1].sequent);
    const auto *ls = as<LoopScopeStmt>(gb->box->program[0]);
    REQUIRE(ls != nullptr);
    CHECK(freeProgVars(g.sequent.succedent[0]).count(ls->index) == 0);
  }
}

TEST_CASE("propositional right rules expose nested boxes") {
  StmtList prog = parseProgram("i = 1;");
  FormulaPtr boxF = mkBox(prog, mkAtom(RelOp::Eq, mkProgVar("i"), mkIntConst(1)));
  FormulaPtr side = mkAtom(RelOp::Le, mkProgVar("n"), mkIntConst(4));
  Goal g;
  g.pool = std::make_shared<FreshNamePool>();
  g.sorts = std::make_shared<SortEnv>();
  g.sequent.succedent.push_back(mkAnd(side, mkImp(side, boxF)));

  RuleResult andR = propositionalRight(g, 0);
  CHECK(andR.ruleName == rules::andRight);
  REQUIRE(andR.premises.size() == 2);
  CHECK(prettyPrint(andR.premises[0].sequent.succedent[0]) == "n <= 4");

  RuleResult impR = propositionalRight(andR.premises[1], 0);
  CHECK(impR.ruleName == rules::impRight);
  REQUIRE(impR.premises.size() == 1);
  CHECK(prettyPrint(impR.premises[0].sequent.antecedent.back()) == "n <= 4");
  CHECK(selectBoxFormula(impR.premises[0].sequent).has_value());
}
