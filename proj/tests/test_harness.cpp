#include "doctest.h"

#include <filesystem>

#include "cctrack/harness.hpp"
#include "cctrack/typing.hpp"
#include "support.hpp"

using namespace cctrack;
using namespace cctrack::harness;

TEST_CASE("generated programs are well typed at their reported type") {
  for (auto ext : {Extensions::none(), Extensions::all()}) {
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
      Generator gen(seed, 4, ext);
      Generated p = gen.program();
      CAPTURE(printTerm(p.term));
      CHECK_NOTHROW(check(p.gamma, p.term, p.type, ext));
    }
  }
}

TEST_CASE("generation is reproducible from the seed") {
  Generator a(42, 4, Extensions::all()), b(42, 4, Extensions::all());
  for (int i = 0; i < 20; ++i) CHECK(alphaEqual(a.program().term, b.program().term));
}

TEST_CASE("small fuzz run is clean") {
  FuzzOptions o;
  o.count = 200;
  FuzzReport r = runFuzz(o);
  for (const auto& s : r.suites) {
    CAPTURE(s.name);
    CHECK(s.samples >= 200);
    CHECK(s.failures == 0);
  }
  CHECK(r.suites.size() == suiteNames().size());
}

TEST_CASE("a faulty evaluator is caught and shrunk to a file") {
  FuzzOptions o;
  o.count = 300;
  o.mutateEvaluator = true;
  o.only = {"preservation", "capture-prediction", "beta-v-residual"};
  o.crashDir = (std::filesystem::temp_directory_path() / "cctrack-harness-test").string();
  std::filesystem::remove_all(o.crashDir);
  FuzzReport r = runFuzz(o);
  CHECK_FALSE(r.ok());
  REQUIRE_FALSE(r.crashFiles.empty());
  std::string src = testsupport::slurp(r.crashFiles.front());
  CHECK(src.find("main") != std::string::npos);
  // The reproduction parses.
  CHECK_NOTHROW(parseProgram(src));
}

TEST_CASE("shrinking keeps the failure") {
  TermRef t = testsupport::tm("(\\(x: {} Top) x) ((\\(y: {} Top) y) (\\(z: {} Top) z))");
  auto fails = [](const TermRef& c) { return termAs<Abs>(c) != nullptr; };
  TermRef small = shrink(Context{}, t, Extensions::none(), fails);
  CHECK(fails(small));
  CHECK(printTerm(small).size() < printTerm(t).size());
}
