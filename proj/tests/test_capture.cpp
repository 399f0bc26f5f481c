#include "doctest.h"

#include <functional>

#include "cctrack/capture.hpp"
#include "cctrack/harness.hpp"
#include "support.hpp"

using namespace cctrack;
using testsupport::contextOf;

namespace {

CaptureSet cs(const std::string& s) { return asCapt(testsupport::ty(s + " Top"))->captures; }

// Direct reading of the three subcapture rules, independent of the library's search.
// A variable is covered when it is listed, or when the capture set of its type is covered.
bool oracle(const Context& g, const CaptureSet& a, const CaptureSet& b, int fuel = 64) {
  if (b.isUniversal()) return true;
  if (a.isUniversal()) return false;
  if (fuel == 0) return false;
  std::function<std::optional<CaptureSet>(const TypeRef&, int)> cvOf =
      [&](const TypeRef& t, int depth) -> std::optional<CaptureSet> {
    if (depth > 64) return std::nullopt;
    if (const Capt* c = asCapt(t)) return c->captures;
    auto bound = g.typeBound(asTVar(t)->name);
    if (!bound) return std::nullopt;
    return cvOf(*bound, depth + 1);
  };
  for (const auto& x : a.vars()) {
    if (b.vars().count(x)) continue;
    auto t = g.termType(x);
    if (!t) return false;
    auto c = cvOf(*t, 0);
    if (!c || !oracle(g, *c, b, fuel - 1)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("a variable subcaptures the capture set of its type") {
  Context g = contextOf("assume y : {*} Top\nassume x : {y} Top");
  CHECK(subcapture(g, cs("{x}"), cs("{y}")));
}

TEST_CASE("the converse of sc-var does not hold") {
  Context g = contextOf("assume y : {*} Top\nassume x : {y} Top");
  CHECK_FALSE(subcapture(g, cs("{y}"), cs("{x}")));
}

TEST_CASE("a pure variable drops out of any capture set") {
  Context g = contextOf("assume x : {} Top");
  CHECK(subcapture(g, cs("{x}"), cs("{}")));
}

TEST_CASE("pure y is absorbed next to x") {
  Context g = contextOf("assume y : {} Top\nassume x : {*} Top");
  CHECK(subcapture(g, cs("{x, y}"), cs("{x}")));
  CHECK_FALSE(subcapture(g, cs("{x, y}"), cs("{y}")));
}

TEST_CASE("universal set only below itself") {
  Context g = contextOf("assume x : {*} Top");
  CHECK(subcapture(g, cs("{x}"), CaptureSet::universal()));
  CHECK_FALSE(subcapture(g, CaptureSet::universal(), cs("{x}")));
  CHECK(subcapture(g, CaptureSet::universal(), CaptureSet::universal()));
}

TEST_CASE("subcapture agrees with the rule oracle on random contexts") {
  std::size_t agreed = 0;
  for (std::uint64_t seed = 1; seed <= 3000; ++seed) {
    harness::Generator gen(seed, 3, Extensions::none());
    Context g = gen.context();
    CaptureSet a = gen.captureSet(g), b = gen.captureSet(g);
    bool want = oracle(g, a, b);
    INFO("seed " << seed << ": " << printCaptureSet(a) << " <: " << printCaptureSet(b));
    REQUIRE(subcapture(g, a, b) == want);
    ++agreed;
  }
  CHECK(agreed == 3000);
}

TEST_CASE("cv reads capture sets through type variable bounds") {
  Context g = contextOf("assume c : {*} Top\nassume X <: {c} Top\nassume x : X");
  CHECK(cv(*g.termType("x"), g) == cs("{c}"));
  CHECK(cv(testsupport::ty("{c} Top"), g) == cs("{c}"));
}
