#include "cctrack/ast.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <utility>

namespace cctrack {

// ---------------------------------------------------------------- capture sets

CaptureSet csUnion(const CaptureSet& a, const CaptureSet& b) {
  if (a.isUniversal() || b.isUniversal()) return CaptureSet::universal();
  NameSet out = a.vars();
  out.insert(b.vars().begin(), b.vars().end());
  return CaptureSet(std::move(out));
}

CaptureSet csMinus(const CaptureSet& a, const CaptureSet& b) {
  if (a.isUniversal()) return CaptureSet::universal();
  if (b.isUniversal()) return CaptureSet::empty();
  NameSet out;
  for (const auto& x : a.vars())
    if (!b.vars().count(x)) out.insert(x);
  return CaptureSet(std::move(out));
}

CaptureSet substCapt(const CaptureSet& target, const Name& x, const CaptureSet& c) {
  if (!target.mentions(x)) return target;
  return csUnion(csMinus(target, CaptureSet{x}), c);
}

// ---------------------------------------------------------------- constructors

TypeRef tvar(Name name) { return std::make_shared<TypeNode>(TypeNode{TVar{std::move(name)}}); }
TypeRef capt(CaptureSet c, PretypeRef pre) {
  return std::make_shared<TypeNode>(TypeNode{Capt{std::move(c), std::move(pre)}});
}
PretypeRef top() {
  static const PretypeRef t = std::make_shared<PretypeNode>(PretypeNode{Top{}});
  return t;
}
PretypeRef bottom() {
  static const PretypeRef b = std::make_shared<PretypeNode>(PretypeNode{Bottom{}});
  return b;
}
PretypeRef fun(Name param, TypeRef paramType, TypeRef result) {
  return std::make_shared<PretypeNode>(
      PretypeNode{Fun{std::move(param), std::move(paramType), std::move(result)}});
}
PretypeRef tfun(Name tparam, TypeRef bound, TypeRef result) {
  return std::make_shared<PretypeNode>(
      PretypeNode{TFun{std::move(tparam), std::move(bound), std::move(result)}});
}
PretypeRef returnCap(TypeRef answer) {
  return std::make_shared<PretypeNode>(PretypeNode{ReturnCap{std::move(answer)}});
}
PretypeRef region() {
  static const PretypeRef r = std::make_shared<PretypeNode>(PretypeNode{RegionCap{}});
  return r;
}
PretypeRef ptr(TypeRef pointee) {
  return std::make_shared<PretypeNode>(PretypeNode{Ptr{std::move(pointee)}});
}
PretypeRef eff(TypeRef arg, TypeRef res) {
  return std::make_shared<PretypeNode>(PretypeNode{Eff{std::move(arg), std::move(res)}});
}

namespace {
template <class N>
TermRef mk(N n, Span span) {
  return std::make_shared<TermNode>(TermNode{std::move(n), span});
}
}  // namespace

TermRef var(Name name, Span span) { return mk(Var{std::move(name)}, span); }
TermRef abs(Name param, TypeRef paramType, TermRef body, Span span) {
  return mk(Abs{std::move(param), std::move(paramType), std::move(body)}, span);
}
TermRef tabs(Name tparam, TypeRef bound, TermRef body, Span span) {
  return mk(TAbs{std::move(tparam), std::move(bound), std::move(body)}, span);
}
TermRef app(TermRef fn, TermRef arg, Span span) {
  return mk(App{std::move(fn), std::move(arg)}, span);
}
TermRef tapp(TermRef fn, TypeRef typeArg, Span span) {
  return mk(TApp{std::move(fn), std::move(typeArg)}, span);
}
TermRef handleReturn(Name cap, TypeRef answer, TermRef body, Span span) {
  return mk(Handle{std::move(cap), std::move(answer), std::move(body)}, span);
}
TermRef doReturn(TermRef cap, TermRef value, Span span) {
  return mk(DoReturn{std::move(cap), std::move(value)}, span);
}
TermRef regionBlock(Name handle, TermRef body, Span span, std::optional<std::size_t> frame) {
  return mk(RegionBlock{std::move(handle), std::move(body), frame}, span);
}
TermRef newPtr(Name handle, TypeRef elemType, TermRef init, Span span) {
  return mk(New{std::move(handle), std::move(elemType), std::move(init)}, span);
}
TermRef deref(TermRef target, Span span) { return mk(Deref{std::move(target)}, span); }
TermRef handleEff(Name cap, TypeRef effType, Name hParam, Name hKont, TermRef handlerBody,
                  TermRef body, Span span) {
  return mk(HandleEff{std::move(cap), std::move(effType), std::move(hParam), std::move(hKont),
                      std::move(handlerBody), std::move(body)},
            span);
}
TermRef doEff(Name cap, TermRef arg, Span span) {
  return mk(DoEff{std::move(cap), std::move(arg)}, span);
}
TermRef ptrVal(std::size_t location, Name region, TypeRef elemType) {
  return mk(PtrVal{location, std::move(region), std::move(elemType)}, Span{});
}

// ---------------------------------------------------------------- equality

namespace {

// Binder correspondence for alpha-equality. Each entry pairs a left and a right name;
// lookups go innermost first.
struct AlphaEnv {
  std::vector<std::pair<Name, Name>> terms;
  std::vector<std::pair<Name, Name>> types;
  bool exact = false;

  static bool sameName(const std::vector<std::pair<Name, Name>>& env, const Name& a,
                       const Name& b) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      bool la = it->first == a;
      bool rb = it->second == b;
      if (la || rb) return la && rb;
    }
    return a == b;
  }

  static std::string canon(const std::vector<std::pair<Name, Name>>& env, const Name& n,
                           bool left) {
    for (std::size_t i = env.size(); i-- > 0;) {
      if ((left ? env[i].first : env[i].second) == n) return "#" + std::to_string(i);
    }
    return "free:" + n;
  }

  bool sameCaptures(const CaptureSet& a, const CaptureSet& b) const {
    if (a.isUniversal() || b.isUniversal()) return a.isUniversal() && b.isUniversal();
    if (a.vars().size() != b.vars().size()) return false;
    std::set<std::string> ca, cb;
    for (const auto& n : a.vars()) ca.insert(canon(terms, n, true));
    for (const auto& n : b.vars()) cb.insert(canon(terms, n, false));
    return ca == cb;
  }
};

bool eqType(const TypeRef& a, const TypeRef& b, AlphaEnv& env);
bool eqPre(const PretypeRef& a, const PretypeRef& b, AlphaEnv& env);

bool bindersOk(const Name& a, const Name& b, const AlphaEnv& env) { return !env.exact || a == b; }

bool eqType(const TypeRef& a, const TypeRef& b, AlphaEnv& env) {
  if (a == b && env.terms.empty() && env.types.empty()) return true;
  if (a->node.index() != b->node.index()) return false;
  if (auto va = asTVar(a)) return AlphaEnv::sameName(env.types, va->name, asTVar(b)->name);
  const Capt& ca = *asCapt(a);
  const Capt& cb = *asCapt(b);
  return env.sameCaptures(ca.captures, cb.captures) && eqPre(ca.pre, cb.pre, env);
}

bool eqPre(const PretypeRef& a, const PretypeRef& b, AlphaEnv& env) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Fun& fa) {
            const auto& fb = std::get<Fun>(b->node);
            if (!bindersOk(fa.param, fb.param, env)) return false;
            if (!eqType(fa.paramType, fb.paramType, env)) return false;
            env.terms.emplace_back(fa.param, fb.param);
            bool ok = eqType(fa.result, fb.result, env);
            env.terms.pop_back();
            return ok;
          },
          [&](const TFun& fa) {
            const auto& fb = std::get<TFun>(b->node);
            if (!bindersOk(fa.tparam, fb.tparam, env)) return false;
            if (!eqType(fa.bound, fb.bound, env)) return false;
            env.types.emplace_back(fa.tparam, fb.tparam);
            bool ok = eqType(fa.result, fb.result, env);
            env.types.pop_back();
            return ok;
          },
          [&](const ReturnCap& ra) {
            return eqType(ra.answer, std::get<ReturnCap>(b->node).answer, env);
          },
          [&](const Ptr& pa) { return eqType(pa.pointee, std::get<Ptr>(b->node).pointee, env); },
          [&](const Eff& ea) {
            const auto& eb = std::get<Eff>(b->node);
            return eqType(ea.arg, eb.arg, env) && eqType(ea.res, eb.res, env);
          },
          [](const auto&) { return true; },
      },
      a->node);
}

bool eqTerm(const TermRef& a, const TermRef& b, AlphaEnv& env);

bool eqUnder(const Name& x, const Name& y, const TermRef& a, const TermRef& b, AlphaEnv& env) {
  if (!bindersOk(x, y, env)) return false;
  env.terms.emplace_back(x, y);
  bool ok = eqTerm(a, b, env);
  env.terms.pop_back();
  return ok;
}

bool eqTerm(const TermRef& a, const TermRef& b, AlphaEnv& env) {
  if (a->node.index() != b->node.index()) return false;
  auto sameVar = [&](const Name& x, const Name& y) { return AlphaEnv::sameName(env.terms, x, y); };
  return std::visit(
      overloaded{
          [&](const Var& v) { return sameVar(v.name, std::get<Var>(b->node).name); },
          [&](const Abs& x) {
            const auto& y = std::get<Abs>(b->node);
            return eqType(x.paramType, y.paramType, env) &&
                   eqUnder(x.param, y.param, x.body, y.body, env);
          },
          [&](const TAbs& x) {
            const auto& y = std::get<TAbs>(b->node);
            if (!bindersOk(x.tparam, y.tparam, env) || !eqType(x.bound, y.bound, env)) return false;
            env.types.emplace_back(x.tparam, y.tparam);
            bool ok = eqTerm(x.body, y.body, env);
            env.types.pop_back();
            return ok;
          },
          [&](const App& x) {
            const auto& y = std::get<App>(b->node);
            return eqTerm(x.fn, y.fn, env) && eqTerm(x.arg, y.arg, env);
          },
          [&](const TApp& x) {
            const auto& y = std::get<TApp>(b->node);
            return eqTerm(x.fn, y.fn, env) && eqType(x.typeArg, y.typeArg, env);
          },
          [&](const Handle& x) {
            const auto& y = std::get<Handle>(b->node);
            return eqType(x.answerType, y.answerType, env) &&
                   eqUnder(x.cap, y.cap, x.body, y.body, env);
          },
          [&](const DoReturn& x) {
            const auto& y = std::get<DoReturn>(b->node);
            return eqTerm(x.cap, y.cap, env) && eqTerm(x.value, y.value, env);
          },
          [&](const RegionBlock& x) {
            const auto& y = std::get<RegionBlock>(b->node);
            return eqUnder(x.handle, y.handle, x.body, y.body, env);
          },
          [&](const New& x) {
            const auto& y = std::get<New>(b->node);
            return sameVar(x.handle, y.handle) && eqType(x.elemType, y.elemType, env) &&
                   eqTerm(x.init, y.init, env);
          },
          [&](const Deref& x) { return eqTerm(x.target, std::get<Deref>(b->node).target, env); },
          [&](const HandleEff& x) {
            const auto& y = std::get<HandleEff>(b->node);
            if (!eqType(x.effType, y.effType, env)) return false;
            if (!eqUnder(x.cap, y.cap, x.body, y.body, env)) return false;
            if (!bindersOk(x.hParam, y.hParam, env)) return false;
            env.terms.emplace_back(x.hParam, y.hParam);
            bool ok = eqUnder(x.hKont, y.hKont, x.handlerBody, y.handlerBody, env);
            env.terms.pop_back();
            return ok;
          },
          [&](const DoEff& x) {
            const auto& y = std::get<DoEff>(b->node);
            return sameVar(x.cap, y.cap) && eqTerm(x.arg, y.arg, env);
          },
          [&](const PtrVal& x) {
            const auto& y = std::get<PtrVal>(b->node);
            return x.location == y.location && sameVar(x.region, y.region) &&
                   eqType(x.elemType, y.elemType, env);
          },
      },
      a->node);
}

}  // namespace

bool equal(const TypeRef& a, const TypeRef& b) {
  AlphaEnv env;
  env.exact = true;
  return eqType(a, b, env);
}
bool equal(const PretypeRef& a, const PretypeRef& b) {
  AlphaEnv env;
  env.exact = true;
  return eqPre(a, b, env);
}
bool equal(const TermRef& a, const TermRef& b) {
  AlphaEnv env;
  env.exact = true;
  return eqTerm(a, b, env);
}
bool alphaEqual(const TypeRef& a, const TypeRef& b) {
  AlphaEnv env;
  return eqType(a, b, env);
}
bool alphaEqual(const PretypeRef& a, const PretypeRef& b) {
  AlphaEnv env;
  return eqPre(a, b, env);
}
bool alphaEqual(const TermRef& a, const TermRef& b) {
  AlphaEnv env;
  return eqTerm(a, b, env);
}

// ---------------------------------------------------------------- free names

namespace {

// Walks a type, reporting every name occurrence with whether it is bound at that point.
struct NameCollector {
  bool termPositions = true;
  bool captureSets = true;
  bool typeVars = true;
  bool includeBound = false;
  NameSet out;
  std::vector<Name> boundTerms;
  std::vector<Name> boundTypes;

  bool isBound(const std::vector<Name>& scope, const Name& n) const {
    return std::find(scope.begin(), scope.end(), n) != scope.end();
  }
  void termName(const Name& n) {
    if (termPositions && (includeBound || !isBound(boundTerms, n))) out.insert(n);
  }
  void binder(const Name& n) {
    if (includeBound) out.insert(n);
  }

  void type(const TypeRef& t) {
    std::visit(overloaded{
                   [&](const TVar& v) {
                     if (typeVars && (includeBound || !isBound(boundTypes, v.name)))
                       out.insert(v.name);
                   },
                   [&](const Capt& c) {
                     if (captureSets)
                       for (const auto& x : c.captures.vars())
                         if (includeBound || !isBound(boundTerms, x)) out.insert(x);
                     pretype(c.pre);
                   },
               },
               t->node);
  }

  void pretype(const PretypeRef& u) {
    std::visit(overloaded{
                   [&](const Fun& f) {
                     type(f.paramType);
                     binder(f.param);
                     boundTerms.push_back(f.param);
                     type(f.result);
                     boundTerms.pop_back();
                   },
                   [&](const TFun& f) {
                     type(f.bound);
                     binder(f.tparam);
                     boundTypes.push_back(f.tparam);
                     type(f.result);
                     boundTypes.pop_back();
                   },
                   [&](const ReturnCap& r) { type(r.answer); },
                   [&](const Ptr& p) { type(p.pointee); },
                   [&](const Eff& e) {
                     type(e.arg);
                     type(e.res);
                   },
                   [](const auto&) {},
               },
               u->node);
  }

  void under(const Name& x, const TermRef& body) {
    binder(x);
    boundTerms.push_back(x);
    term(body);
    boundTerms.pop_back();
  }

  void term(const TermRef& t) {
    std::visit(overloaded{
                   [&](const Var& v) { termName(v.name); },
                   [&](const Abs& a) {
                     type(a.paramType);
                     under(a.param, a.body);
                   },
                   [&](const TAbs& a) {
                     type(a.bound);
                     binder(a.tparam);
                     boundTypes.push_back(a.tparam);
                     term(a.body);
                     boundTypes.pop_back();
                   },
                   [&](const App& a) {
                     term(a.fn);
                     term(a.arg);
                   },
                   [&](const TApp& a) {
                     term(a.fn);
                     type(a.typeArg);
                   },
                   [&](const Handle& h) {
                     type(h.answerType);
                     under(h.cap, h.body);
                   },
                   [&](const DoReturn& r) {
                     term(r.cap);
                     term(r.value);
                   },
                   [&](const RegionBlock& r) { under(r.handle, r.body); },
                   [&](const New& n) {
                     termName(n.handle);
                     type(n.elemType);
                     term(n.init);
                   },
                   [&](const Deref& d) { term(d.target); },
                   [&](const HandleEff& h) {
                     type(h.effType);
                     under(h.cap, h.body);
                     binder(h.hParam);
                     boundTerms.push_back(h.hParam);
                     under(h.hKont, h.handlerBody);
                     boundTerms.pop_back();
                   },
                   [&](const DoEff& d) {
                     termName(d.cap);
                     term(d.arg);
                   },
                   [&](const PtrVal& p) {
                     termName(p.region);
                     type(p.elemType);
                   },
               },
               t->node);
  }
};

}  // namespace

NameSet fv(const TermRef& t) {
  NameCollector c;
  c.captureSets = false;
  c.typeVars = false;
  c.term(t);
  return std::move(c.out);
}

NameSet captureVars(const TypeRef& t) {
  NameCollector c;
  c.typeVars = false;
  c.type(t);
  return std::move(c.out);
}
NameSet captureVars(const PretypeRef& t) {
  NameCollector c;
  c.typeVars = false;
  c.pretype(t);
  return std::move(c.out);
}
NameSet freeTypeVars(const TypeRef& t) {
  NameCollector c;
  c.captureSets = false;
  c.type(t);
  return std::move(c.out);
}
NameSet freeTypeVars(const PretypeRef& t) {
  NameCollector c;
  c.captureSets = false;
  c.pretype(t);
  return std::move(c.out);
}
NameSet freeNames(const TermRef& t) {
  NameCollector c;
  c.term(t);
  return std::move(c.out);
}
NameSet freeNames(const TypeRef& t) {
  NameCollector c;
  c.type(t);
  return std::move(c.out);
}
NameSet allNames(const TermRef& t) {
  NameCollector c;
  c.includeBound = true;
  c.term(t);
  return std::move(c.out);
}
NameSet allNames(const TypeRef& t) {
  NameCollector c;
  c.includeBound = true;
  c.type(t);
  return std::move(c.out);
}

Name freshName(const Name& base, const NameSet& avoid) {
  if (!avoid.count(base)) return base;
  // Strip an existing numeric suffix so repeated freshening stays short.
  Name stem = base;
  auto us = stem.rfind('_');
  if (us != Name::npos && us + 1 < stem.size() &&
      std::all_of(stem.begin() + static_cast<long>(us) + 1, stem.end(),
                  [](char ch) { return ch >= '0' && ch <= '9'; }))
    stem = stem.substr(0, us);
  if (stem.empty()) stem = "v";
  for (std::size_t i = 1;; ++i) {
    Name candidate = stem + "_" + std::to_string(i);
    if (!avoid.count(candidate)) return candidate;
  }
}

// ---------------------------------------------------------------- substitution

namespace {

NameSet unionOf(NameSet a, const NameSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

TypeRef captInType(const TypeRef& t, const Name& x, const CaptureSet& c);

PretypeRef captInPre(const PretypeRef& u, const Name& x, const CaptureSet& c) {
  return std::visit(
      overloaded{
          [&](const Fun& f) -> PretypeRef {
            TypeRef s = captInType(f.paramType, x, c);
            if (f.param == x) return fun(f.param, s, f.result);
            Name p = f.param;
            TypeRef r = f.result;
            if (c.containsLiterally(p)) {
              NameSet avoid = unionOf(allNames(r), c.vars());
              avoid.insert(x);
              Name fresh = freshName(p, avoid);
              r = substCaptInType(r, p, CaptureSet{fresh});
              p = fresh;
            }
            return fun(p, s, captInType(r, x, c));
          },
          [&](const TFun& f) -> PretypeRef {
            return tfun(f.tparam, captInType(f.bound, x, c), captInType(f.result, x, c));
          },
          [&](const ReturnCap& r) -> PretypeRef { return returnCap(captInType(r.answer, x, c)); },
          [&](const Ptr& p) -> PretypeRef { return ptr(captInType(p.pointee, x, c)); },
          [&](const Eff& e) -> PretypeRef {
            return eff(captInType(e.arg, x, c), captInType(e.res, x, c));
          },
          [&](const auto&) -> PretypeRef { return u; },
      },
      u->node);
}

TypeRef captInType(const TypeRef& t, const Name& x, const CaptureSet& c) {
  if (asTVar(t)) return t;
  const Capt& k = *asCapt(t);
  return capt(substCapt(k.captures, x, c), captInPre(k.pre, x, c));
}

TypeRef typeInType(const TypeRef& t, const Name& X, const TypeRef& s, const NameSet& sNames);

PretypeRef typeInPre(const PretypeRef& u, const Name& X, const TypeRef& s, const NameSet& sNames) {
  return std::visit(
      overloaded{
          [&](const Fun& f) -> PretypeRef {
            TypeRef p = typeInType(f.paramType, X, s, sNames);
            Name x = f.param;
            TypeRef r = f.result;
            if (sNames.count(x)) {
              NameSet avoid = unionOf(allNames(r), sNames);
              avoid.insert(X);
              Name fresh = freshName(x, avoid);
              r = substCaptInType(r, x, CaptureSet{fresh});
              x = fresh;
            }
            return fun(x, p, typeInType(r, X, s, sNames));
          },
          [&](const TFun& f) -> PretypeRef {
            TypeRef b = typeInType(f.bound, X, s, sNames);
            if (f.tparam == X) return tfun(f.tparam, b, f.result);
            Name Y = f.tparam;
            TypeRef r = f.result;
            if (sNames.count(Y)) {
              NameSet avoid = unionOf(allNames(r), sNames);
              avoid.insert(X);
              Name fresh = freshName(Y, avoid);
              r = substType(r, Y, tvar(fresh));
              Y = fresh;
            }
            return tfun(Y, b, typeInType(r, X, s, sNames));
          },
          [&](const ReturnCap& r) -> PretypeRef {
            return returnCap(typeInType(r.answer, X, s, sNames));
          },
          [&](const Ptr& p) -> PretypeRef { return ptr(typeInType(p.pointee, X, s, sNames)); },
          [&](const Eff& e) -> PretypeRef {
            return eff(typeInType(e.arg, X, s, sNames), typeInType(e.res, X, s, sNames));
          },
          [&](const auto&) -> PretypeRef { return u; },
      },
      u->node);
}

TypeRef typeInType(const TypeRef& t, const Name& X, const TypeRef& s, const NameSet& sNames) {
  if (auto v = asTVar(t)) return v->name == X ? s : t;
  const Capt& k = *asCapt(t);
  return capt(k.captures, typeInPre(k.pre, X, s, sNames));
}

}  // namespace

TypeRef substCaptInType(const TypeRef& t, const Name& x, const CaptureSet& c) {
  if (!captureVars(t).count(x)) return t;
  return captInType(t, x, c);
}

PretypeRef substCaptInPretype(const PretypeRef& u, const Name& x, const CaptureSet& c) {
  if (!captureVars(u).count(x)) return u;
  return captInPre(u, x, c);
}

TypeRef substType(const TypeRef& t, const Name& X, const TypeRef& s) {
  if (!freeTypeVars(t).count(X)) return t;
  return typeInType(t, X, s, freeNames(s));
}

PretypeRef substTypeInPretype(const PretypeRef& u, const Name& X, const TypeRef& s) {
  if (!freeTypeVars(u).count(X)) return u;
  return typeInPre(u, X, s, freeNames(s));
}

TypeRef renameTermVar(const TypeRef& t, const Name& from, const Name& to) {
  return substCaptInType(t, from, CaptureSet{to});
}

namespace {

// Generic term traversal for the three term substitutions. `retype` rewrites embedded
// types; `clash(name)` says whether a term binder must be renamed; `stops(name)` says the
// binder shadows the substituted variable.
struct TermRewriter {
  std::function<TypeRef(const TypeRef&)> retype;
  std::function<bool(const Name&)> termBinderClashes;
  std::function<bool(const Name&)> termBinderStops;
  std::function<bool(const Name&)> typeBinderClashes;
  std::function<bool(const Name&)> typeBinderStops;
  std::function<TermRef(const Var&, const TermRef&)> onVar;
  std::function<Name(const Name&)> onNamePosition;
  NameSet extraAvoid;

  // Rewrites `body` under a term binder, renaming when required.
  std::pair<Name, TermRef> underTerm(const Name& x, const TermRef& body) {
    if (termBinderStops(x)) return {x, body};
    if (termBinderClashes(x)) {
      NameSet avoid = unionOf(allNames(body), extraAvoid);
      Name fresh = freshName(x, avoid);
      return {fresh, rewrite(renameTermVar(body, x, fresh))};
    }
    return {x, rewrite(body)};
  }

  std::pair<Name, TermRef> underType(const Name& X, const TermRef& body) {
    if (typeBinderStops(X)) return {X, body};
    if (typeBinderClashes(X)) {
      NameSet avoid = unionOf(allNames(body), extraAvoid);
      Name fresh = freshName(X, avoid);
      return {fresh, rewrite(substTypeInTerm(body, X, tvar(fresh)))};
    }
    return {X, rewrite(body)};
  }

  TermRef rewrite(const TermRef& t) {
    const Span sp = t->span;
    return std::visit(
        overloaded{
            [&](const Var& v) -> TermRef { return onVar(v, t); },
            [&](const Abs& a) -> TermRef {
              TypeRef s = retype(a.paramType);
              auto [x, body] = underTerm(a.param, a.body);
              return abs(x, s, body, sp);
            },
            [&](const TAbs& a) -> TermRef {
              TypeRef b = retype(a.bound);
              auto [X, body] = underType(a.tparam, a.body);
              return tabs(X, b, body, sp);
            },
            [&](const App& a) -> TermRef { return app(rewrite(a.fn), rewrite(a.arg), sp); },
            [&](const TApp& a) -> TermRef { return tapp(rewrite(a.fn), retype(a.typeArg), sp); },
            [&](const Handle& h) -> TermRef {
              TypeRef ty = retype(h.answerType);
              auto [x, body] = underTerm(h.cap, h.body);
              return handleReturn(x, ty, body, sp);
            },
            [&](const DoReturn& r) -> TermRef {
              return doReturn(rewrite(r.cap), rewrite(r.value), sp);
            },
            [&](const RegionBlock& r) -> TermRef {
              auto [x, body] = underTerm(r.handle, r.body);
              return regionBlock(x, body, sp, r.frame);
            },
            [&](const New& n) -> TermRef {
              return newPtr(onNamePosition(n.handle), retype(n.elemType), rewrite(n.init), sp);
            },
            [&](const Deref& d) -> TermRef { return deref(rewrite(d.target), sp); },
            [&](const HandleEff& h) -> TermRef {
              TypeRef ty = retype(h.effType);
              auto [x, body] = underTerm(h.cap, h.body);
              // Two binders over the handler body; handle them one at a time.
              Name y = h.hParam;
              Name k = h.hKont;
              TermRef s = h.handlerBody;
              if (termBinderStops(y) || termBinderStops(k)) {
                return handleEff(x, ty, y, k, s, body, sp);
              }
              NameSet avoid = unionOf(allNames(s), extraAvoid);
              avoid.insert(y);
              avoid.insert(k);
              if (termBinderClashes(y)) {
                Name fresh = freshName(y, avoid);
                avoid.insert(fresh);
                s = renameTermVar(s, y, fresh);
                y = fresh;
              }
              if (termBinderClashes(k)) {
                Name fresh = freshName(k, avoid);
                s = renameTermVar(s, k, fresh);
                k = fresh;
              }
              return handleEff(x, ty, y, k, rewrite(s), body, sp);
            },
            [&](const DoEff& d) -> TermRef {
              return doEff(onNamePosition(d.cap), rewrite(d.arg), sp);
            },
            [&](const PtrVal& p) -> TermRef {
              return ptrVal(p.location, onNamePosition(p.region), retype(p.elemType));
            },
        },
        t->node);
  }
};

}  // namespace

TermRef substCaptInTerm(const TermRef& t, const Name& x, const CaptureSet& c) {
  TermRewriter rw;
  rw.retype = [&](const TypeRef& ty) { return substCaptInType(ty, x, c); };
  rw.termBinderStops = [&](const Name& y) { return y == x; };
  rw.termBinderClashes = [&](const Name& y) { return c.containsLiterally(y); };
  rw.typeBinderStops = [](const Name&) { return false; };
  rw.typeBinderClashes = [](const Name&) { return false; };
  rw.onVar = [](const Var&, const TermRef& self) { return self; };
  rw.onNamePosition = [](const Name& n) { return n; };
  rw.extraAvoid = c.vars();
  rw.extraAvoid.insert(x);
  return rw.rewrite(t);
}

TermRef substTerm(const TermRef& t, const Name& x, const TermRef& v) {
  const NameSet vNames = freeNames(v);
  const Var* vAsVar = termAs<Var>(v);
  TermRewriter rw;
  rw.retype = [](const TypeRef& ty) { return ty; };
  rw.termBinderStops = [&](const Name& y) { return y == x; };
  rw.termBinderClashes = [&](const Name& y) { return vNames.count(y) > 0; };
  rw.typeBinderStops = [](const Name&) { return false; };
  rw.typeBinderClashes = [&](const Name& Y) { return vNames.count(Y) > 0; };
  rw.onVar = [&](const Var& var, const TermRef& self) { return var.name == x ? v : self; };
  // Capability positions hold names; only a variable can be substituted into them.
  rw.onNamePosition = [&](const Name& n) { return (n == x && vAsVar) ? vAsVar->name : n; };
  rw.extraAvoid = vNames;
  rw.extraAvoid.insert(x);
  return rw.rewrite(t);
}

TermRef substTypeInTerm(const TermRef& t, const Name& X, const TypeRef& s) {
  const NameSet sTypeVars = freeTypeVars(s);
  const NameSet sCaptVars = captureVars(s);
  TermRewriter rw;
  rw.retype = [&](const TypeRef& ty) { return substType(ty, X, s); };
  rw.termBinderStops = [](const Name&) { return false; };
  rw.termBinderClashes = [&](const Name& y) { return sCaptVars.count(y) > 0; };
  rw.typeBinderStops = [&](const Name& Y) { return Y == X; };
  rw.typeBinderClashes = [&](const Name& Y) { return sTypeVars.count(Y) > 0; };
  rw.onVar = [](const Var&, const TermRef& self) { return self; };
  rw.onNamePosition = [](const Name& n) { return n; };
  rw.extraAvoid = freeNames(s);
  rw.extraAvoid.insert(X);
  return rw.rewrite(t);
}

TermRef renameTermVar(const TermRef& t, const Name& from, const Name& to) {
  if (from == to) return t;
  return substTerm(substCaptInTerm(t, from, CaptureSet{to}), from, var(to));
}

// ---------------------------------------------------------------- sizes

std::size_t typeSize(const TypeRef& t) {
  if (asTVar(t)) return 1;
  const Capt& c = *asCapt(t);
  return 1 + std::visit(overloaded{
                            [](const Fun& f) { return typeSize(f.paramType) + typeSize(f.result); },
                            [](const TFun& f) { return typeSize(f.bound) + typeSize(f.result); },
                            [](const ReturnCap& r) { return typeSize(r.answer); },
                            [](const Ptr& p) { return typeSize(p.pointee); },
                            [](const Eff& e) { return typeSize(e.arg) + typeSize(e.res); },
                            [](const auto&) -> std::size_t { return 1; },
                        },
                        c.pre->node);
}

std::size_t termSize(const TermRef& t) {
  return 1 + std::visit(overloaded{
                            [](const Var&) -> std::size_t { return 0; },
                            [](const Abs& a) { return termSize(a.body); },
                            [](const TAbs& a) { return termSize(a.body); },
                            [](const App& a) { return termSize(a.fn) + termSize(a.arg); },
                            [](const TApp& a) { return termSize(a.fn); },
                            [](const Handle& h) { return termSize(h.body); },
                            [](const DoReturn& r) { return termSize(r.cap) + termSize(r.value); },
                            [](const RegionBlock& r) { return termSize(r.body); },
                            [](const New& n) { return termSize(n.init); },
                            [](const Deref& d) { return termSize(d.target); },
                            [](const HandleEff& h) {
                              return termSize(h.handlerBody) + termSize(h.body);
                            },
                            [](const DoEff& d) { return termSize(d.arg); },
                            [](const PtrVal&) -> std::size_t { return 0; },
                        },
                        t->node);
}

// ---------------------------------------------------------------- contexts

Context Context::extendTerm(Name x, TypeRef t) const {
  Context c;
  c.head_ = std::make_shared<const Node>(
      Node{Binding{Binding::Kind::Term, std::move(x), std::move(t)}, head_});
  c.size_ = size_ + 1;
  return c;
}

Context Context::extendType(Name X, TypeRef bound) const {
  Context c;
  c.head_ = std::make_shared<const Node>(
      Node{Binding{Binding::Kind::Type, std::move(X), std::move(bound)}, head_});
  c.size_ = size_ + 1;
  return c;
}

const Binding* Context::lookup(const Name& name) const {
  for (const Node* n = head_.get(); n; n = n->next.get())
    if (n->binding.name == name) return &n->binding;
  return nullptr;
}

std::optional<TypeRef> Context::termType(const Name& x) const {
  const Binding* b = lookup(x);
  if (!b || b->kind != Binding::Kind::Term) return std::nullopt;
  return b->type;
}

std::optional<TypeRef> Context::typeBound(const Name& X) const {
  const Binding* b = lookup(X);
  if (!b || b->kind != Binding::Kind::Type) return std::nullopt;
  return b->type;
}

NameSet Context::termNames() const {
  NameSet out;
  for (const Node* n = head_.get(); n; n = n->next.get())
    if (n->binding.kind == Binding::Kind::Term) out.insert(n->binding.name);
  return out;
}

NameSet Context::allNames() const {
  NameSet out;
  for (const Node* n = head_.get(); n; n = n->next.get()) out.insert(n->binding.name);
  return out;
}

std::vector<Binding> Context::bindings() const {
  std::vector<Binding> out;
  for (const Node* n = head_.get(); n; n = n->next.get()) out.push_back(n->binding);
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace cctrack
