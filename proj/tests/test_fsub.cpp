#include "doctest.h"

#include "cctrack/fsub.hpp"
#include "cctrack/harness.hpp"
#include "cctrack/typing.hpp"
#include "support.hpp"

using namespace cctrack;
using testsupport::tm;
using testsupport::ty;

namespace {

// Reference erasure: drop every capture set and forget arrow dependency.
fsub::Type reference(const TypeRef& t) {
  if (const TVar* v = asTVar(t)) return fsub::tvar(v->name);
  const Capt& c = *asCapt(t);
  return std::visit(overloaded{
                        [](const Top&) { return fsub::top(); },
                        [](const Fun& f) {
                          return fsub::arrow(reference(f.paramType), reference(f.result));
                        },
                        [](const TFun& f) {
                          return fsub::all(f.tparam, reference(f.bound), reference(f.result));
                        },
                        [](const auto&) -> fsub::Type { throw std::logic_error("not core"); },
                    },
                    c.pre->node);
}

}  // namespace

TEST_CASE("erasing a dependent arrow") {
  fsub::Type t = fsub::eraseType(ty("{c} forall(x: {*} Top) {x} Top"));
  CHECK(fsub::alphaEqual(t, fsub::arrow(fsub::top(), fsub::top())));
  CHECK(fsub::print(t) == "Top -> Top");
}

TEST_CASE("erased terms keep their shape") {
  fsub::Term t = fsub::eraseTerm(tm("(/\\[X <: {*} Top] \\(x: X) x) [{} Top]"));
  CHECK(fsub::print(t) == "(/\\[X <: Top] \\(x: X) x) [Top]");
}

TEST_CASE("F<: checker handles bounded quantification") {
  fsub::Context ctx;
  fsub::Term id = fsub::tabs("X", fsub::top(), fsub::abs("x", fsub::tvar("X"), fsub::var("x")));
  fsub::Type t = fsub::check(ctx, id);
  CHECK(fsub::alphaEqual(t, fsub::all("Y", fsub::top(), fsub::arrow(fsub::tvar("Y"), fsub::tvar("Y")))));
  CHECK_THROWS_AS(fsub::check(ctx, fsub::app(id, id)), fsub::Error);
}

TEST_CASE("embedding decorates every type with the chosen set") {
  fsub::Type t = fsub::arrow(fsub::top(), fsub::top());
  CHECK(alphaEqual(fsub::embedType(t, CaptureSet{}), ty("{} forall(x: {} Top) {} Top")));
  CHECK(alphaEqual(fsub::embedType(t, CaptureSet::universal()),
                   ty("{*} forall(x: {*} Top) {*} Top")));
}

TEST_CASE("library erasure matches the reference on generated types") {
  for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
    harness::Generator gen(seed, 3, Extensions::none());
    Context g = gen.context();
    TypeRef t = gen.type(g, 3);
    INFO(printType(t));
    CHECK(fsub::alphaEqual(fsub::eraseType(t), reference(t)));
  }
}

TEST_CASE("erased programs typecheck in F<:") {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    harness::Generator gen(seed, 3, Extensions::none());
    harness::Generated p = gen.program();
    fsub::Type t = fsub::check(fsub::eraseContext(p.gamma), fsub::eraseTerm(p.term));
    CHECK(fsub::subtype(fsub::eraseContext(p.gamma), t, fsub::eraseType(p.type)));
  }
}
