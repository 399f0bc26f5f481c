#include "cctrack/subtype.hpp"

#include "cctrack/diagnostics.hpp"

namespace cctrack {

namespace {

struct DepthGuard {};

}  // namespace

bool SubtypeChecker::subtype(const Context& gamma, const TypeRef& a, const TypeRef& b) {
  try {
    return sub(gamma, a, b, 0);
  } catch (const DepthGuard&) {
    depthExceeded_ = true;
    return false;
  }
}

bool SubtypeChecker::subpretype(const Context& gamma, const PretypeRef& a, const PretypeRef& b) {
  try {
    return subPre(gamma, a, b, 0);
  } catch (const DepthGuard&) {
    depthExceeded_ = true;
    return false;
  }
}

bool SubtypeChecker::same(const Context& gamma, const TypeRef& a, const TypeRef& b,
                          std::size_t depth) {
  return sub(gamma, a, b, depth) && sub(gamma, b, a, depth);
}

bool SubtypeChecker::sub(const Context& gamma, const TypeRef& a, const TypeRef& b,
                         std::size_t depth) {
  if (depth > maxDepth_) throw DepthGuard{};
  if (const TVar* va = asTVar(a)) {
    if (const TVar* vb = asTVar(b); vb && vb->name == va->name) return true;
    auto bound = gamma.typeBound(va->name);
    if (!bound) {
      TypeError err(ErrorKind::IllScoped, "type variable " + va->name + " is not bound");
      err.variable = va->name;
      throw err;
    }
    return sub(gamma, *bound, b, depth + 1);
  }
  const Capt& ca = *asCapt(a);
  if (const TVar* vb = asTVar(b)) {
    // An uninhabited pure type sits below every type variable.
    if (std::holds_alternative<Bottom>(ca.pre->node))
      return gamma.typeBound(vb->name).has_value() &&
             subcapture(gamma, ca.captures, CaptureSet{}, stats_);
    return false;
  }
  const Capt& cb = *asCapt(b);
  return subcapture(gamma, ca.captures, cb.captures, stats_) &&
         subPre(gamma, ca.pre, cb.pre, depth + 1);
}

bool SubtypeChecker::subPre(const Context& gamma, const PretypeRef& a, const PretypeRef& b,
                            std::size_t depth) {
  if (depth > maxDepth_) throw DepthGuard{};
  if (std::holds_alternative<Top>(b->node)) return true;
  if (std::holds_alternative<Bottom>(a->node)) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Fun& fa) {
            const auto& fb = std::get<Fun>(b->node);
            if (!sub(gamma, fb.paramType, fa.paramType, depth + 1)) return false;
            TypeRef ra = fa.result;
            TypeRef rb = fb.result;
            Name x = fb.param;
            if (fa.param != fb.param || gamma.binds(x)) {
              NameSet avoid = gamma.allNames();
              for (const auto& n : allNames(ra)) avoid.insert(n);
              for (const auto& n : allNames(rb)) avoid.insert(n);
              x = freshName(fb.param, avoid);
              ra = renameTermVar(ra, fa.param, x);
              rb = renameTermVar(rb, fb.param, x);
            }
            return sub(gamma.extendTerm(x, fb.paramType), ra, rb, depth + 1);
          },
          [&](const TFun& fa) {
            const auto& fb = std::get<TFun>(b->node);
            if (!sub(gamma, fb.bound, fa.bound, depth + 1)) return false;
            TypeRef ra = fa.result;
            TypeRef rb = fb.result;
            Name X = fb.tparam;
            if (fa.tparam != fb.tparam || gamma.binds(X)) {
              NameSet avoid = gamma.allNames();
              for (const auto& n : allNames(ra)) avoid.insert(n);
              for (const auto& n : allNames(rb)) avoid.insert(n);
              X = freshName(fb.tparam, avoid);
              ra = substType(ra, fa.tparam, tvar(X));
              rb = substType(rb, fb.tparam, tvar(X));
            }
            return sub(gamma.extendType(X, fb.bound), ra, rb, depth + 1);
          },
          [&](const ReturnCap& ra) {
            return same(gamma, ra.answer, std::get<ReturnCap>(b->node).answer, depth + 1);
          },
          [&](const Ptr& pa) {
            return same(gamma, pa.pointee, std::get<Ptr>(b->node).pointee, depth + 1);
          },
          [&](const Eff& ea) {
            const auto& eb = std::get<Eff>(b->node);
            return same(gamma, ea.arg, eb.arg, depth + 1) && same(gamma, ea.res, eb.res, depth + 1);
          },
          [](const auto&) { return true; },
      },
      a->node);
}

bool subtype(const Context& gamma, const TypeRef& a, const TypeRef& b) {
  return SubtypeChecker().subtype(gamma, a, b);
}

bool subpretype(const Context& gamma, const PretypeRef& a, const PretypeRef& b) {
  return SubtypeChecker().subpretype(gamma, a, b);
}

TypeRef expose(const Context& gamma, const TypeRef& t) {
  TypeRef cur = t;
  for (std::size_t hops = 0; hops <= gamma.size(); ++hops) {
    const TVar* v = asTVar(cur);
    if (!v) return cur;
    auto bound = gamma.typeBound(v->name);
    if (!bound) return cur;
    cur = *bound;
  }
  return cur;
}

}  // namespace cctrack
