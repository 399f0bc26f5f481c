#include "cctrack/typing.hpp"

#include "cctrack/subtype.hpp"
#include "cctrack/syntax.hpp"
#include "cctrack/wellformed.hpp"

namespace cctrack {

namespace {

TypeError mismatch(const std::string& what, const TypeRef& expected, const TypeRef& found) {
  TypeError err(ErrorKind::Mismatch, what + ": expected " + printType(expected) + ", found " +
                                         printType(found));
  err.expected = expected;
  err.found = found;
  return err;
}

TypeError escape(const Name& x, const std::string& rule, const TypeRef& result) {
  const char* where = rule == "handle-argument-escape" ? " escapes in argument type "
                                                        : " escapes in result type ";
  TypeError err(ErrorKind::Escape, "capability " + x + where + printType(result));
  err.variable = x;
  err.rule = rule;
  err.found = result;
  return err;
}

// Renames a term binder away from the context, returning the name to bind.
Name termBinder(const Context& gamma, const Name& x, const TermRef& body, TermRef& out) {
  out = body;
  if (!gamma.binds(x)) return x;
  NameSet avoid = gamma.allNames();
  for (const auto& n : allNames(body)) avoid.insert(n);
  Name fresh = freshName(x, avoid);
  out = renameTermVar(body, x, fresh);
  return fresh;
}

Name typeBinder(const Context& gamma, const Name& X, const TermRef& body, TermRef& out) {
  out = body;
  if (!gamma.binds(X)) return X;
  NameSet avoid = gamma.allNames();
  for (const auto& n : allNames(body)) avoid.insert(n);
  Name fresh = freshName(X, avoid);
  out = substTypeInTerm(body, X, tvar(fresh));
  return fresh;
}

// Outer well-formedness of a result type; a leaked local capability is an escape.
void resultInOuter(const Context& outer, const Name& x, const TypeRef& result,
                   const std::string& rule) {
  try {
    wfTopLevel(outer, result);
  } catch (const TypeError& e) {
    if (e.variable && *e.variable == x) throw escape(x, rule, result);
    throw;
  }
}

// An upper bound of a and b: shared function shapes are kept, anything else goes to Top.
TypeRef join(const Context& gamma, const TypeRef& a, const TypeRef& b) {
  if (subtype(gamma, a, b)) return b;
  if (subtype(gamma, b, a)) return a;
  TypeRef ea = expose(gamma, a), eb = expose(gamma, b);
  const Capt* ca = asCapt(ea);
  const Capt* cb = asCapt(eb);
  CaptureSet cs = csUnion(cv(a, gamma), cv(b, gamma));
  if (!ca || !cb) return capt(cs, top());
  const Fun* fa = std::get_if<Fun>(&ca->pre->node);
  const Fun* fb = std::get_if<Fun>(&cb->pre->node);
  if (fa && fb && subtype(gamma, fa->paramType, fb->paramType) &&
      subtype(gamma, fb->paramType, fa->paramType)) {
    NameSet avoid = gamma.allNames();
    for (const auto& n : allNames(a)) avoid.insert(n);
    for (const auto& n : allNames(b)) avoid.insert(n);
    Name x = freshName(fa->param, avoid);
    Context inner = gamma.extendTerm(x, fa->paramType);
    return capt(cs, fun(x, fa->paramType,
                        join(inner, renameTermVar(fa->result, fa->param, x),
                             renameTermVar(fb->result, fb->param, x))));
  }
  const TFun* ta = std::get_if<TFun>(&ca->pre->node);
  const TFun* tb = std::get_if<TFun>(&cb->pre->node);
  if (ta && tb && alphaEqual(ta->bound, tb->bound)) {
    NameSet avoid = gamma.allNames();
    for (const auto& n : allNames(a)) avoid.insert(n);
    for (const auto& n : allNames(b)) avoid.insert(n);
    Name X = freshName(ta->tparam, avoid);
    Context inner = gamma.extendType(X, ta->bound);
    return capt(cs, tfun(X, ta->bound,
                         join(inner, substType(ta->result, ta->tparam, tvar(X)),
                              substType(tb->result, tb->tparam, tvar(X)))));
  }
  return capt(cs, top());
}

}  // namespace

void Typer::count(const char* rule) {
  if (stats_) ++stats_->rules[rule];
}

void Typer::need(bool enabled, const char* construct, const TermRef& t) const {
  if (enabled) return;
  TypeError err(ErrorKind::ExtensionDisabled,
                std::string(construct) + " requires an extension that is not enabled", t->span);
  throw err;
}

bool Typer::subtype(const Context& gamma, const TypeRef& a, const TypeRef& b) {
  SubtypeChecker sc(maxDepth_, stats_ ? &stats_->subcapture : nullptr);
  bool ok = sc.subtype(gamma, a, b);
  if (!ok && sc.depthExceeded()) {
    TypeError err(ErrorKind::Depth, "subtyping exceeded the recursion limit of " +
                                        std::to_string(maxDepth_));
    err.expected = b;
    err.found = a;
    throw err;
  }
  return ok;
}

TypeRef Typer::regionRule(const Context& gamma, const RegionBlock& r, const TermRef& t,
                          const TypeRef* expected) {
  need(ext_.regions, "region", t);
  count("region");
  SubcaptureStats* scStats = stats_ ? &stats_->subcapture : nullptr;
  TermRef body;
  Name x = termBinder(gamma, r.handle, r.body, body);
  Context inner = gamma.extendTerm(x, capt(CaptureSet::universal(), region()));
  TypeRef result;
  if (expected) {
    check(inner, body, *expected);
    result = *expected;
  } else {
    result = synth(inner, body);
  }
  if (subcapture(inner, CaptureSet{x}, cv(result, inner), scStats))
    throw escape(r.handle, "region-escape", result);
  resultInOuter(gamma, x, result, "region-escape");
  return result;
}

TypeRef Typer::handleEffRule(const Context& gamma, const HandleEff& h, const TermRef& t,
                             const TypeRef* expected) {
  need(ext_.effects, "handler", t);
  count("handle-eff");
  SubcaptureStats* scStats = stats_ ? &stats_->subcapture : nullptr;
  wfTopLevel(gamma, h.effType);
  const Eff* e = pretypeAs<Eff>(expose(gamma, h.effType));
  if (!e) {
    TypeError err(ErrorKind::Mismatch,
                  "handled capability type " + printType(h.effType) + " is not an effect type");
    err.found = h.effType;
    throw err;
  }
  TermRef body;
  Name x = termBinder(gamma, h.cap, h.body, body);
  Context inner = gamma.extendTerm(x, capt(CaptureSet::universal(), eff(e->arg, e->res)));
  TypeRef result;
  if (expected) {
    check(inner, body, *expected);
    result = *expected;
  } else {
    result = synth(inner, body);
  }
  if (subcapture(inner, CaptureSet{x}, cv(e->arg, inner), scStats))
    throw escape(h.cap, "handle-argument-escape", e->arg);
  auto noEscape = [&](const TypeRef& r) {
    if (subcapture(inner, CaptureSet{x}, cv(r, inner), scStats))
      throw escape(h.cap, "handle-result-escape", r);
    resultInOuter(gamma, x, r, "handle-result-escape");
  };
  noEscape(result);

  CaptureSet ck = csUnion(csMinus(CaptureSet(fv(body)), CaptureSet{x}),
                          csMinus(CaptureSet(fv(h.handlerBody)), CaptureSet{h.hParam, h.hKont}));
  TermRef hb = h.handlerBody;
  Context withY = gamma;
  Name y = termBinder(withY, h.hParam, hb, hb);
  withY = withY.extendTerm(y, e->arg);
  Name k = termBinder(withY, h.hKont, hb, hb);
  auto handlerCtx = [&](const TypeRef& r) {
    NameSet avoid = withY.allNames();
    for (const auto& n : allNames(r)) avoid.insert(n);
    avoid.insert(k);
    Name z = freshName("z", avoid);
    return withY.extendTerm(k, capt(ck, fun(z, e->res, r)));
  };
  try {
    check(handlerCtx(result), hb, result);
    return result;
  } catch (const TypeError& err) {
    if (expected || err.kind == ErrorKind::Depth) throw;
    // The body's type may be more precise than the handler can produce. Widen the answer
    // to the handler's own type, with y and k replaced by what they capture, or to Top.
    TypeRef answer = result;
    for (int round = 0; round < 3; ++round) {
      try {
        TypeRef hs = synth(handlerCtx(answer), hb);
        TypeRef widened = substCaptInType(substCaptInType(hs, k, ck), y, cv(e->arg, withY));
        if (!subtype(inner, result, widened)) widened = join(inner, result, widened);
        noEscape(widened);
        answer = widened;
        check(handlerCtx(answer), hb, answer);
        return answer;
      } catch (const TypeError&) {
        if (round == 2) throw err;
      }
    }
    throw err;
  }
}

// Checking mode for the forms whose synthesized answer type can be too precise for their
// handler: the expected type is used as the answer instead.
bool Typer::checkAgainst(const Context& gamma, const TermRef& t, const TypeRef& expected) {
  if (const HandleEff* h = termAs<HandleEff>(t)) {
    handleEffRule(gamma, *h, t, &expected);
    return true;
  }
  if (const RegionBlock* r = termAs<RegionBlock>(t)) {
    regionRule(gamma, *r, t, &expected);
    return true;
  }
  if (const App* a = termAs<App>(t)) {
    TypeRef fnType = synth(gamma, a->fn);
    const Fun* f = pretypeAs<Fun>(expose(gamma, fnType));
    if (!f) return false;
    check(gamma, a->arg, f->paramType);
    TypeRef result = substCaptInType(f->result, f->param, cv(f->paramType, gamma));
    return subtype(gamma, result, expected);
  }
  return false;
}

void Typer::check(const Context& gamma, const TermRef& t, const TypeRef& expected) {
  std::optional<TypeError> first;
  try {
    TypeRef found = synth(gamma, t);
    if (subtype(gamma, found, expected)) return;
    first = mismatch("type mismatch", expected, found);
    first->span = t->span;
  } catch (const TypeError& e) {
    if (e.kind == ErrorKind::Depth || e.kind == ErrorKind::ExtensionDisabled) throw;
    first = e;
  }
  if (!ext_.any()) throw *first;
  try {
    if (checkAgainst(gamma, t, expected)) return;
  } catch (const TypeError&) {
  }
  throw *first;
}

TypeRef Typer::synth(const Context& gamma, const TermRef& t) {
  try {
    return synthInner(gamma, t);
  } catch (TypeError& e) {
    if (e.span.line == 0) e.span = t->span;
    throw;
  }
}

TypeRef Typer::synthInner(const Context& gamma, const TermRef& t) {
  SubcaptureStats* scStats = stats_ ? &stats_->subcapture : nullptr;
  return std::visit(
      overloaded{
          [&](const Var& v) -> TypeRef {
            count("var");
            auto ty = gamma.termType(v.name);
            if (!ty) {
              TypeError err(ErrorKind::IllScoped, "variable " + v.name + " is not bound");
              err.variable = v.name;
              throw err;
            }
            if (const Capt* c = asCapt(*ty)) return capt(CaptureSet{v.name}, c->pre);
            return *ty;
          },
          [&](const Abs& a) -> TypeRef {
            count("abs");
            wfTopLevel(gamma, a.paramType);
            TermRef body;
            Name x = termBinder(gamma, a.param, a.body, body);
            TypeRef result = synth(gamma.extendTerm(x, a.paramType), body);
            TypeRef ty = capt(CaptureSet(fv(t)), fun(x, a.paramType, result));
            wfTopLevel(gamma, ty);
            return ty;
          },
          [&](const TAbs& a) -> TypeRef {
            count("tabs");
            wfTopLevel(gamma, a.bound);
            TermRef body;
            Name X = typeBinder(gamma, a.tparam, a.body, body);
            TypeRef result = synth(gamma.extendType(X, a.bound), body);
            TypeRef ty = capt(CaptureSet(fv(t)), tfun(X, a.bound, result));
            wfTopLevel(gamma, ty);
            return ty;
          },
          [&](const App& a) -> TypeRef {
            count("app");
            TypeRef fnType = synth(gamma, a.fn);
            const Fun* f = pretypeAs<Fun>(expose(gamma, fnType));
            if (!f) {
              TypeError err(ErrorKind::NotAFunction,
                            "applied term has type " + printType(fnType) + ", not a function",
                            a.fn->span);
              err.found = fnType;
              throw err;
            }
            TypeRef argType;
            std::optional<TypeError> bad;
            try {
              argType = synth(gamma, a.arg);
              if (!subtype(gamma, argType, f->paramType)) {
                bad = mismatch("argument type mismatch", f->paramType, argType);
                bad->span = a.arg->span;
              }
            } catch (const TypeError& e) {
              if (e.kind == ErrorKind::Depth || e.kind == ErrorKind::ExtensionDisabled) throw;
              bad = e;
            }
            if (bad) {
              // The argument may still check against the parameter type directly.
              try {
                if (!ext_.any() || !checkAgainst(gamma, a.arg, f->paramType)) throw *bad;
              } catch (const TypeError&) {
                throw *bad;
              }
              argType = f->paramType;
            }
            return substCaptInType(f->result, f->param, cv(argType, gamma));
          },
          [&](const TApp& a) -> TypeRef {
            count("tapp");
            TypeRef fnType = synth(gamma, a.fn);
            const TFun* f = pretypeAs<TFun>(expose(gamma, fnType));
            if (!f) {
              TypeError err(ErrorKind::NotAFunction,
                            "type-applied term has type " + printType(fnType) +
                                ", not a type function",
                            a.fn->span);
              err.found = fnType;
              throw err;
            }
            wfTopLevel(gamma, a.typeArg);
            if (!subtype(gamma, a.typeArg, f->bound))
              throw mismatch("type argument outside its bound", f->bound, a.typeArg);
            return substType(f->result, f->tparam, a.typeArg);
          },
          [&](const Handle& h) -> TypeRef {
            need(ext_.returns, "handle", t);
            count("handle");
            wfTopLevel(gamma, h.answerType);
            TermRef body;
            Name x = termBinder(gamma, h.cap, h.body, body);
            Context inner = gamma.extendTerm(x, capt(CaptureSet::universal(), returnCap(h.answerType)));
            check(inner, body, h.answerType);
            if (subcapture(inner, CaptureSet{x}, cv(h.answerType, inner), scStats))
              throw escape(h.cap, "return-escape", h.answerType);
            return h.answerType;
          },
          [&](const DoReturn& r) -> TypeRef {
            need(ext_.returns, "return", t);
            count("return");
            TypeRef capType = synth(gamma, r.cap);
            const ReturnCap* rc = pretypeAs<ReturnCap>(expose(gamma, capType));
            if (!rc) {
              TypeError err(ErrorKind::NotAFunction,
                            "return target has type " + printType(capType) +
                                ", not a return capability",
                            r.cap->span);
              err.found = capType;
              throw err;
            }
            check(gamma, r.value, rc->answer);
            return capt(CaptureSet{}, bottom());
          },
          [&](const RegionBlock& r) -> TypeRef { return regionRule(gamma, r, t, nullptr); },
          [&](const New& n) -> TypeRef {
            need(ext_.regions, "new", t);
            count("new");
            auto handleType = gamma.termType(n.handle);
            if (!handleType) {
              TypeError err(ErrorKind::IllScoped, "region " + n.handle + " is not bound");
              err.variable = n.handle;
              throw err;
            }
            if (!pretypeAs<RegionCap>(expose(gamma, *handleType))) {
              TypeError err(ErrorKind::NotAFunction,
                            n.handle + " has type " + printType(*handleType) + ", not a region");
              err.found = *handleType;
              throw err;
            }
            wfTopLevel(gamma, n.elemType);
            check(gamma, n.init, n.elemType);
            return capt(CaptureSet{n.handle}, ptr(n.elemType));
          },
          [&](const Deref& d) -> TypeRef {
            need(ext_.regions, "!", t);
            count("deref");
            TypeRef ty = synth(gamma, d.target);
            const Ptr* p = pretypeAs<Ptr>(expose(gamma, ty));
            if (!p) {
              TypeError err(ErrorKind::NotAFunction,
                            "dereferenced term has type " + printType(ty) + ", not a pointer",
                            d.target->span);
              err.found = ty;
              throw err;
            }
            return p->pointee;
          },
          [&](const HandleEff& h) -> TypeRef { return handleEffRule(gamma, h, t, nullptr); },
          [&](const DoEff& d) -> TypeRef {
            need(ext_.effects, "do", t);
            count("do");
            auto capType = gamma.termType(d.cap);
            if (!capType) {
              TypeError err(ErrorKind::IllScoped, "capability " + d.cap + " is not bound");
              err.variable = d.cap;
              throw err;
            }
            const Eff* e = pretypeAs<Eff>(expose(gamma, *capType));
            if (!e) {
              TypeError err(ErrorKind::NotAFunction,
                            d.cap + " has type " + printType(*capType) + ", not an effect");
              err.found = *capType;
              throw err;
            }
            check(gamma, d.arg, e->arg);
            return e->res;
          },
          [&](const PtrVal& p) -> TypeRef {
            need(ext_.regions, "pointer", t);
            count("ptr");
            if (!gamma.termType(p.region)) {
              TypeError err(ErrorKind::IllScoped, "region " + p.region + " is not bound");
              err.variable = p.region;
              throw err;
            }
            return capt(CaptureSet{p.region}, ptr(p.elemType));
          },
      },
      t->node);
}

TypeRef synth(const Context& gamma, const TermRef& t, Extensions ext) {
  return Typer(ext).synth(gamma, t);
}

void check(const Context& gamma, const TermRef& t, const TypeRef& expected, Extensions ext) {
  Typer(ext).check(gamma, t, expected);
}

namespace {

TypeRef dropIn(const Context& gamma, const TypeRef& t);

PretypeRef dropInPre(const Context& gamma, const PretypeRef& u) {
  return std::visit(
      overloaded{
          [&](const Fun& f) -> PretypeRef {
            TypeRef result = f.result;
            Name x = f.param;
            if (gamma.binds(x)) {
              NameSet avoid = gamma.allNames();
              for (const auto& n : allNames(result)) avoid.insert(n);
              x = freshName(x, avoid);
              result = renameTermVar(result, f.param, x);
            }
            return fun(x, dropIn(gamma, f.paramType),
                       dropIn(gamma.extendTerm(x, f.paramType), result));
          },
          [&](const TFun& f) -> PretypeRef {
            TypeRef result = f.result;
            Name X = f.tparam;
            if (gamma.binds(X)) {
              NameSet avoid = gamma.allNames();
              for (const auto& n : allNames(result)) avoid.insert(n);
              X = freshName(X, avoid);
              result = substType(result, f.tparam, tvar(X));
            }
            return tfun(X, dropIn(gamma, f.bound), dropIn(gamma.extendType(X, f.bound), result));
          },
          [&](const ReturnCap& r) -> PretypeRef { return returnCap(dropIn(gamma, r.answer)); },
          [&](const Ptr& p) -> PretypeRef { return ptr(dropIn(gamma, p.pointee)); },
          [&](const Eff& e) -> PretypeRef {
            return eff(dropIn(gamma, e.arg), dropIn(gamma, e.res));
          },
          [&](const auto&) -> PretypeRef { return u; },
      },
      u->node);
}

TypeRef dropIn(const Context& gamma, const TypeRef& t) {
  const Capt* c = asCapt(t);
  if (!c) return t;
  CaptureSet kept = c->captures;
  if (!kept.isUniversal()) {
    NameSet names;
    for (const auto& x : kept.vars())
      if (!gamma.termType(x) || !subcapture(gamma, CaptureSet{x}, CaptureSet{})) names.insert(x);
    kept = CaptureSet(std::move(names));
  }
  return capt(kept, dropInPre(gamma, c->pre));
}

}  // namespace

TypeRef dropPureVariables(const Context& gamma, const TypeRef& t) { return dropIn(gamma, t); }

}  // namespace cctrack
