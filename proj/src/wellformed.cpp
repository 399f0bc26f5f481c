#include "cctrack/wellformed.hpp"

#include "cctrack/diagnostics.hpp"

namespace cctrack {

namespace {

[[noreturn]] void illScoped(const Name& x, const char* what) {
  TypeError err(ErrorKind::IllScoped, std::string(what) + " " + x + " is not bound");
  err.variable = x;
  throw err;
}

void wfPre(const Context& gamma, const NameSet& plus, const NameSet& minus, const PretypeRef& u);

void wf(const Context& gamma, const NameSet& plus, const NameSet& minus, const TypeRef& t) {
  if (const TVar* v = asTVar(t)) {
    if (!gamma.typeBound(v->name)) illScoped(v->name, "type variable");
    return;
  }
  const Capt& c = *asCapt(t);
  for (const auto& x : c.captures.vars()) {
    if (!gamma.termType(x)) illScoped(x, "variable");
    if (!plus.count(x)) {
      TypeError err(ErrorKind::Polarity,
                    "variable " + x + " used contravariantly in its own scope");
      err.variable = x;
      throw err;
    }
  }
  wfPre(gamma, plus, minus, c.pre);
}

// Renames a binder away from the context so bindings stay distinct.
template <class Rename>
Name freshBinder(const Context& gamma, const Name& x, const TypeRef& body, TypeRef& out,
                 Rename rename) {
  if (!gamma.binds(x)) {
    out = body;
    return x;
  }
  NameSet avoid = gamma.allNames();
  for (const auto& n : allNames(body)) avoid.insert(n);
  Name fresh = freshName(x, avoid);
  out = rename(body, x, fresh);
  return fresh;
}

void wfPre(const Context& gamma, const NameSet& plus, const NameSet& minus, const PretypeRef& u) {
  std::visit(overloaded{
                 [&](const Fun& f) {
                   wf(gamma, minus, plus, f.paramType);
                   TypeRef result;
                   Name x = freshBinder(gamma, f.param, f.result, result,
                                        [](const TypeRef& t, const Name& a, const Name& b) {
                                          return renameTermVar(t, a, b);
                                        });
                   NameSet plus2 = plus;
                   plus2.insert(x);
                   wf(gamma.extendTerm(x, f.paramType), plus2, minus, result);
                 },
                 [&](const TFun& f) {
                   wf(gamma, minus, plus, f.bound);
                   TypeRef result;
                   Name X = freshBinder(gamma, f.tparam, f.result, result,
                                        [](const TypeRef& t, const Name& a, const Name& b) {
                                          return substType(t, a, tvar(b));
                                        });
                   wf(gamma.extendType(X, f.bound), plus, minus, result);
                 },
                 [&](const ReturnCap& r) { wf(gamma, plus, minus, r.answer); },
                 [&](const Ptr& p) {
                   wf(gamma, plus, minus, p.pointee);
                   wf(gamma, minus, plus, p.pointee);
                 },
                 [&](const Eff& e) {
                   wf(gamma, minus, plus, e.arg);
                   wf(gamma, plus, minus, e.res);
                 },
                 [](const auto&) {},
             },
             u->node);
}

}  // namespace

void wfType(const Context& gamma, const NameSet& aPlus, const NameSet& aMinus, const TypeRef& t) {
  wf(gamma, aPlus, aMinus, t);
}

void wfTopLevel(const Context& gamma, const TypeRef& t) {
  NameSet dom = gamma.termNames();
  wf(gamma, dom, dom, t);
}

void wfContext(const Context& gamma) {
  Context prefix;
  for (const auto& b : gamma.bindings()) {
    if (prefix.binds(b.name)) {
      TypeError err(ErrorKind::IllScoped, "name " + b.name + " is bound twice");
      err.variable = b.name;
      throw err;
    }
    wfTopLevel(prefix, b.type);
    prefix = b.kind == Binding::Kind::Term ? prefix.extendTerm(b.name, b.type)
                                           : prefix.extendType(b.name, b.type);
  }
}

}  // namespace cctrack
