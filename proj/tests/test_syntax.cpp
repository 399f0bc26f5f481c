#include "doctest.h"

#include <filesystem>

#include "cctrack/harness.hpp"
#include "support.hpp"

using namespace cctrack;
using testsupport::tm;
using testsupport::ty;

TEST_CASE("corpus files print back to an equal program") {
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(CCTRACK_CORPUS_DIR)) {
    if (entry.path().extension() != ".cc") continue;
    ++files;
    CAPTURE(entry.path().string());
    SourceProgram a = parseProgram(testsupport::slurp(entry.path().string()));
    std::string printed = printProgram(a);
    SourceProgram b = parseProgram(printed);
    CHECK(printProgram(b) == printed);
    REQUIRE(a.decls.size() == b.decls.size());
    CHECK(a.extensions == b.extensions);
    for (std::size_t i = 0; i < a.decls.size(); ++i) {
      if (a.decls[i].term) CHECK(alphaEqual(a.decls[i].term, b.decls[i].term));
      if (a.decls[i].type) CHECK(alphaEqual(a.decls[i].type, b.decls[i].type));
    }
  }
  CHECK(files >= 10);
}

TEST_CASE("generated terms survive a print and parse") {
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    harness::Generator gen(seed, 4, Extensions::all());
    harness::Generated p = gen.program();
    std::string s = printTerm(p.term);
    CAPTURE(s);
    CHECK(alphaEqual(parseTerm(s), p.term));
    CHECK(alphaEqual(parseType(printType(p.type)), p.type));
  }
}

TEST_CASE("printer spellings") {
  CHECK(printType(ty("{} forall(x: {*} Top) {x} Top")) == "{} forall(x: {*} Top) {x} Top");
  CHECK(printType(ty("{a,b} Top")) == "{a, b} Top");
  CHECK(printType(ty("{} forall[X <: {} Top] X")) == "{} forall[X <: {} Top] X");
  CHECK(printTerm(tm("(\\(x: {} Top) x) (\\(y: {} Top) y)")) == "(\\(x: {} Top) x) (\\(y: {} Top) y)");
}

TEST_CASE("aliases fold back when printing") {
  SourceProgram p = parseProgram("alias Unit = {} Top\nalias Fn = forall(u: Unit) Unit\nmain \\(u: Unit) u");
  PrintOptions o{&p.aliases};
  CHECK(printType(parseType("{} forall(u: {} Top) {} Top"), o) == "{} Fn");
}

TEST_CASE("parse errors report a position") {
  try {
    parseProgram("main (\\(x: {} Top) x");
    FAIL("parsed");
  } catch (const ParseError& e) {
    CHECK(e.span.line == 1);
  }
}

TEST_CASE("extension pragma") {
  SourceProgram p = parseProgram("#ext returns, effects\nmain \\(x: {} Top) x");
  CHECK(p.extensions.returns);
  CHECK(p.extensions.effects);
  CHECK_FALSE(p.extensions.regions);
}
