#include "doctest.h"

#include "cctrack/diagnostics.hpp"
#include "cctrack/wellformed.hpp"
#include "support.hpp"

using namespace cctrack;
using testsupport::contextOf;
using testsupport::ty;

namespace {

std::optional<ErrorKind> wfError(const Context& g, const TypeRef& t) {
  try {
    wfTopLevel(g, t);
    return std::nullopt;
  } catch (const TypeError& e) {
    return e.kind;
  }
}

}  // namespace

TEST_CASE("capture sets mention bound term variables only") {
  Context g = contextOf("assume c : {*} Top");
  CHECK_FALSE(wfError(g, ty("{c} Top")));
  CHECK(wfError(g, ty("{d} Top")) == ErrorKind::IllScoped);
}

TEST_CASE("a parameter may appear in its own result covariantly") {
  Context g;
  CHECK_FALSE(wfError(g, ty("{} forall(x: {*} Top) {x} Top")));
  CHECK_FALSE(wfError(g, ty("{} forall(x: {*} Top) {} forall(y: {} Top) {x} Top")));
}

TEST_CASE("a parameter in a nested parameter position is a polarity error") {
  Context g;
  CHECK(wfError(g, ty("{} forall(x: {*} Top) {} forall(y: {x} Top) {y} Top")) ==
        ErrorKind::Polarity);
}

TEST_CASE("type variables must be bound") {
  Context g = contextOf("assume X <: {} Top");
  CHECK_FALSE(wfError(g, ty("X")));
  CHECK(wfError(g, ty("Y")) == ErrorKind::IllScoped);
}

TEST_CASE("weakening keeps a type well formed") {
  Context g = contextOf("assume c : {*} Top");
  TypeRef t = ty("{c} forall(x: {*} Top) {x, c} Top");
  REQUIRE_FALSE(wfError(g, t));
  CHECK_FALSE(wfError(g.extendTerm("d", ty("{c} Top")), t));
  CHECK_FALSE(wfError(g.extendType("Z", ty("{} Top")), t));
}

TEST_CASE("contexts are checked in order") {
  CHECK_NOTHROW(wfContext(contextOf("assume c : {*} Top\nassume d : {c} Top")));
  Context bad = Context{}.extendTerm("d", ty("{c} Top"));
  CHECK_THROWS_AS(wfContext(bad), TypeError);
}
