#include "doctest.h"

#include "cctrack/fsub.hpp"
#include "cctrack/harness.hpp"
#include "cctrack/subtype.hpp"
#include "support.hpp"

using namespace cctrack;
using testsupport::contextOf;
using testsupport::ty;

TEST_CASE("capture sets widen covariantly") {
  Context g = contextOf("assume File : {*} Top");
  CHECK(subtype(g, ty("{File} forall(x: {} Top) {} Top"), ty("{*} forall(x: {} Top) {} Top")));
  CHECK_FALSE(subtype(g, ty("{*} forall(x: {} Top) {} Top"), ty("{File} forall(x: {} Top) {} Top")));
  CHECK(subtype(g, ty("{} Top"), ty("{File} Top")));
}

TEST_CASE("function parameters are contravariant") {
  Context g;
  CHECK(subtype(g, ty("{} forall(x: {*} Top) {} Top"), ty("{} forall(x: {} Top) {} Top")));
  CHECK_FALSE(subtype(g, ty("{} forall(x: {} Top) {} Top"), ty("{} forall(x: {*} Top) {} Top")));
}

TEST_CASE("dependent results see the parameter") {
  Context g;
  // {x} in the result of the left side is bounded by the parameter's own {*}.
  CHECK(subtype(g, ty("{} forall(x: {*} Top) {x} Top"), ty("{} forall(x: {*} Top) {*} Top")));
  CHECK_FALSE(subtype(g, ty("{} forall(x: {*} Top) {*} Top"), ty("{} forall(x: {*} Top) {x} Top")));
}

TEST_CASE("type variables go up to their bound") {
  Context g = contextOf("assume X <: {} Top");
  CHECK(subtype(g, ty("X"), ty("{} Top")));
  CHECK(subtype(g, ty("X"), ty("X")));
  CHECK_FALSE(subtype(g, ty("{} Top"), ty("X")));
}

TEST_CASE("bottom sits under every shape") {
  Context g;
  TypeRef bot = capt(CaptureSet{}, bottom());
  CHECK(subtype(g, bot, ty("{} forall(x: {*} Top) {x} Top")));
  CHECK(subtype(g, bot, ty("{} forall[X <: {*} Top] X")));
  CHECK_FALSE(subtype(g, ty("{} Top"), bot));
}

TEST_CASE("subtyping survives erasure on random pairs") {
  // Erasure drops capture sets, so a capture-calculus subtyping must still hold in F<:.
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 1500; ++seed) {
    harness::Generator gen(seed, 3, Extensions::none());
    Context g = gen.context();
    TypeRef a = gen.type(g, 2), b = gen.type(g, 2);
    if (!subtype(g, a, b)) continue;
    ++checked;
    INFO(printType(a) << " <: " << printType(b));
    CHECK(fsub::subtype(fsub::eraseContext(g), fsub::eraseType(a), fsub::eraseType(b)));
  }
  CHECK(checked > 100);
}
