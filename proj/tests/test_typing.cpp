#include "doctest.h"

#include <map>

#include "cctrack/typing.hpp"
#include "support.hpp"

using namespace cctrack;
using testsupport::contextOf;
using testsupport::tm;
using testsupport::ty;

namespace {

struct Checked {
  SourceProgram program;
  CheckReport report;
  std::map<std::string, std::string> defs;
  std::string main;
};

Checked checkFile(const std::string& name) {
  Checked c;
  c.program = parseProgram(testsupport::slurp(testsupport::corpusPath(name)));
  c.report = checkProgram(c.program);
  for (const auto& d : c.report.defs) c.defs[d.name] = renderType(d.type, c.program);
  if (c.report.mainType) c.main = renderType(*c.report.mainType, c.program);
  return c;
}

}  // namespace

TEST_CASE("logger definitions") {
  Checked c = checkFile("logger.cc");
  REQUIRE(c.report.ok);
  CHECK(c.defs["fileLogger"] == "{File} Logger");
  CHECK(c.defs["printLogger"] == "{Console} Logger");
  CHECK(c.defs["pureLogger"] == "{} Logger");
  CHECK(c.defs["warn"] == "{} forall(log: {*} Logger) {log} Logger");
  CHECK(c.defs["someLogger"] == "{File} Logger");
  CHECK(c.main == "{Console} Logger");
}

TEST_CASE("g keeps its argument in the result") {
  Checked c = checkFile("fg.cc");
  REQUIRE(c.report.ok);
  CHECK(c.defs["g"] == "{} forall(x: {*} U) {x} U");
  CHECK(c.defs.count("f'") == 1);
}

TEST_CASE("rejections carry kind, rule and variable") {
  struct Case {
    const char* file;
    ErrorKind kind;
    const char* rule;
    const char* variable;
  };
  for (const Case& k : {Case{"f_rejected.cc", ErrorKind::Polarity, "", "x"},
                        Case{"escape_return.cc", ErrorKind::Escape, "return-escape", "r"},
                        Case{"effects_escape.cc", ErrorKind::Escape, "handle-result-escape", "x"},
                        Case{"effects_thunk.cc", ErrorKind::Escape, "handle-argument-escape", "x"},
                        Case{"region_dup.cc", ErrorKind::Polarity, "", "x"}}) {
    CAPTURE(k.file);
    Checked c = checkFile(k.file);
    REQUIRE_FALSE(c.report.ok);
    CHECK(c.report.error->kind == k.kind);
    CHECK(c.report.error->rule == k.rule);
    REQUIRE(c.report.error->variable);
    CHECK(*c.report.error->variable == k.variable);
  }
}

TEST_CASE("application substitutes the argument's capture set") {
  Context g = contextOf("assume c : {*} Top");
  TypeRef t = synth(g, tm("(\\(x: {*} Top) \\(y: {} Top) x) c"));
  CHECK(alphaEqual(t, ty("{c} forall(y: {} Top) {c} Top")));
}

TEST_CASE("type application substitutes the bound") {
  Context g;
  TypeRef t = synth(g, tm("(/\\[X <: {*} Top] \\(x: X) x) [{} Top]"));
  // x : X has no capture set of its own, so the result is the instantiated X.
  CHECK(alphaEqual(t, ty("{} forall(x: {} Top) {} Top")));
}

TEST_CASE("variables type as their own singleton") {
  Context g = contextOf("assume c : {*} forall(x: {} Top) {} Top");
  CHECK(alphaEqual(synth(g, tm("c")), ty("{c} forall(x: {} Top) {} Top")));
}

TEST_CASE("extension syntax is rejected when disabled") {
  Context g;
  TermRef t = parseTerm("region r in (\\(x: {} Top) x)");
  CHECK_NOTHROW(synth(g, t, Extensions::all()));
  try {
    synth(g, t, Extensions::none());
    FAIL("accepted without regions");
  } catch (const TypeError& e) {
    CHECK(e.kind == ErrorKind::ExtensionDisabled);
  }
}

TEST_CASE("dangling program is ill typed") {
  Checked c = checkFile("dangling.cc");
  CHECK_FALSE(c.report.ok);
}
