#include "cctrack/capture.hpp"

#include <map>

#include "cctrack/diagnostics.hpp"

namespace cctrack {

CaptureSet cv(const TypeRef& t, const Context& gamma) {
  TypeRef cur = t;
  for (std::size_t hops = 0;; ++hops) {
    if (const Capt* c = asCapt(cur)) return c->captures;
    const Name& X = asTVar(cur)->name;
    auto bound = gamma.typeBound(X);
    if (!bound || hops > gamma.size()) {
      TypeError err(ErrorKind::IllScoped, "type variable " + X + " is not bound");
      err.variable = X;
      throw err;
    }
    cur = *bound;
  }
}

namespace {

struct Decider {
  const Context& gamma;
  const CaptureSet& target;
  SubcaptureStats* stats;
  std::map<Name, bool> memo;
  NameSet inProgress;

  bool element(const Name& x) {
    if (target.containsLiterally(x)) return true;
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    auto ty = gamma.termType(x);
    if (!ty) {
      TypeError err(ErrorKind::IllScoped, "variable " + x + " is not bound");
      err.variable = x;
      throw err;
    }
    if (!inProgress.insert(x).second) return false;
    // sc-var: x stands for the capture set of its declared type.
    CaptureSet through = cv(*ty, gamma);
    bool ok = !through.isUniversal();
    if (ok) {
      if (stats) ++stats->scVar;
      for (const auto& y : through.vars()) {
        if (!element(y)) {
          ok = false;
          break;
        }
      }
    }
    inProgress.erase(x);
    memo[x] = ok;
    return ok;
  }
};

}  // namespace

bool subcapture(const Context& gamma, const CaptureSet& c1, const CaptureSet& c2,
                SubcaptureStats* stats) {
  if (stats) ++stats->calls;
  if (c2.isUniversal()) {
    // Still report unbound names on the left.
    for (const auto& x : c1.vars())
      if (!gamma.termType(x)) {
        TypeError err(ErrorKind::IllScoped, "variable " + x + " is not bound");
        err.variable = x;
        throw err;
      }
    return true;
  }
  if (c1.isUniversal()) return false;
  Decider d{gamma, c2, stats, {}, {}};
  for (const auto& x : c1.vars())
    if (!d.element(x)) return false;
  return true;
}

}  // namespace cctrack
