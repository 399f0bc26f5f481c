#include "doctest.h"

#include "cctrack/eval.hpp"
#include "support.hpp"

using namespace cctrack;
using testsupport::tm;

namespace {

EvalOutcome run(const std::string& src, std::size_t fuel = 1000) {
  return evaluate(tm(src), fuel);
}

EvalOutcome runFile(const std::string& name, std::size_t fuel = 1000) {
  SourceProgram p = parseProgram(testsupport::slurp(testsupport::corpusPath(name)));
  Elaborated e = elaborate(p);
  EvalOptions o;
  o.ext = p.extensions;
  return evaluate(*e.main, fuel, o);
}

}  // namespace

TEST_CASE("beta step substitutes and finishes") {
  EvalOutcome o = run("(\\(x: {} Top) x) (\\(y: {} Top) y)");
  REQUIRE(o.kind == EvalOutcome::Kind::Done);
  CHECK(o.final.steps == 1);
  CHECK(alphaEqual(o.final.term, tm("\\(y: {} Top) y")));
}

TEST_CASE("beta replaces the parameter in capture sets by the argument's free variables") {
  // The value has no free variables, so {x} becomes {}.
  EvalOutcome o = run("(\\(x: {*} Top) \\(y: {x} Top) y) (\\(z: {} Top) z)");
  REQUIRE(o.kind == EvalOutcome::Kind::Done);
  CHECK(alphaEqual(o.final.term, tm("\\(y: {} Top) y")));
}

TEST_CASE("type application") {
  EvalOutcome o = run("(/\\[X <: {*} Top] \\(x: X) x) [{} Top]");
  REQUIRE(o.kind == EvalOutcome::Kind::Done);
  CHECK(alphaEqual(o.final.term, tm("\\(x: {} Top) x")));
}

TEST_CASE("self application runs out of fuel") {
  EvalOutcome o = run("(\\(x: {*} Top) x x) (\\(x: {*} Top) x x)", 50);
  CHECK(o.kind == EvalOutcome::Kind::OutOfFuel);
  CHECK(o.final.steps == 50);
}

TEST_CASE("values do not step") {
  CHECK(isValue(tm("\\(x: {} Top) x"), Extensions::none()));
  CHECK(isValue(tm("/\\[X <: {} Top] \\(x: X) x"), Extensions::none()));
  CHECK_FALSE(isValue(tm("(\\(x: {} Top) x) (\\(x: {} Top) x)"), Extensions::none()));
  CHECK(step(MachineState{tm("\\(x: {} Top) x")}).kind == StepResult::Kind::Done);
}

TEST_CASE("an application has one decomposition") {
  CHECK(decompositions(tm("((\\(x: {} Top) x) (\\(x: {} Top) x)) (\\(y: {} Top) y)"),
                       Extensions::none()) == 1);
}

TEST_CASE("non-local return skips the rest of the fold") {
  EvalOutcome o = runFile("sumroots_run.cc");
  REQUIRE(o.kind == EvalOutcome::Kind::Done);
  CHECK(alphaEqual(o.final.term, tm("\\(u: {} Top) u")));
}

TEST_CASE("regions allocate and read") {
  EvalOutcome o = runFile("regions.cc");
  CHECK(o.kind == EvalOutcome::Kind::Done);
}

TEST_CASE("a resumed handler runs twice") {
  EvalOutcome o = runFile("effects_ok.cc");
  CHECK(o.kind == EvalOutcome::Kind::Done);
}

TEST_CASE("reading a pointer after its region ends is dangling") {
  EvalOutcome o = runFile("dangling.cc");
  REQUIRE(o.kind == EvalOutcome::Kind::Stuck);
  CHECK(o.reason == StuckReason::DanglingDeref);
}

TEST_CASE("an effect with no handler is stuck") {
  EvalOutcome o = run("do e (\\(x: {} Top) x)");
  REQUIRE(o.kind == EvalOutcome::Kind::Stuck);
}
