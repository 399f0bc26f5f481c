#include "cctrack/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cctrack/capture.hpp"
#include "cctrack/fsub.hpp"
#include "cctrack/subtype.hpp"
#include "cctrack/syntax.hpp"
#include "cctrack/wellformed.hpp"

namespace cctrack::harness {

namespace {

struct GenFail {};

constexpr std::size_t kWorkBudget = 600;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<Name> termVarsOf(const Context& g) {
  std::vector<Name> out;
  for (const auto& b : g.bindings())
    if (b.kind == Binding::Kind::Term) out.push_back(b.name);
  return out;
}

std::vector<Name> typeVarsOf(const Context& g) {
  std::vector<Name> out;
  for (const auto& b : g.bindings())
    if (b.kind == Binding::Kind::Type) out.push_back(b.name);
  return out;
}

bool accepts(const Context& g, const TermRef& t, const TypeRef& target, Extensions ext) {
  try {
    Typer(ext).check(g, t, target);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

std::optional<TypeRef> synthOpt(const Context& g, const TermRef& t, Extensions ext) {
  try {
    return Typer(ext).synth(g, t);
  } catch (const TypeError&) {
    return std::nullopt;
  }
}

bool concreteCv(const Context& g, const TypeRef& t) {
  try {
    return !cv(t, g).isUniversal();
  } catch (const TypeError&) {
    return false;
  }
}

}  // namespace

// ---------------------------------------------------------------- generator

struct Generator::Scope {
  Context gamma;
  NameSet usable;
};

namespace {
thread_local std::size_t work = 0;
}

Generator::Generator(std::uint64_t seed, std::size_t maxDepth, Extensions ext)
    : rng_(seed), maxDepth_(std::max<std::size_t>(maxDepth, 1)), ext_(ext) {}

std::size_t Generator::pick(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

bool Generator::coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

CaptureSet Generator::captureSet(const Context& gamma) {
  std::vector<Name> vars = termVarsOf(gamma);
  double r = std::uniform_real_distribution<double>(0, 1)(rng_);
  if (r < 0.3 || vars.empty()) return r < 0.15 ? CaptureSet::universal() : CaptureSet{};
  if (r < 0.45) return CaptureSet::universal();
  NameSet picked;
  std::size_t n = 1 + pick(std::min<std::size_t>(vars.size(), 3));
  for (std::size_t i = 0; i < n; ++i) picked.insert(vars[pick(vars.size())]);
  return CaptureSet(picked);
}

namespace {

CaptureSet capsFrom(Generator& g, const NameSet& allowed, bool allowUniversal = true) {
  double r = std::uniform_real_distribution<double>(0, 1)(g.rng());
  if (allowUniversal && r < 0.3) return CaptureSet::universal();
  if (allowed.empty() || r < 0.6) return CaptureSet{};
  std::vector<Name> v(allowed.begin(), allowed.end());
  NameSet picked;
  std::size_t n = 1 + std::uniform_int_distribution<std::size_t>(0, std::min<std::size_t>(v.size(), 2) - 1)(g.rng());
  for (std::size_t i = 0; i < n; ++i)
    picked.insert(v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(g.rng())]);
  return CaptureSet(picked);
}

struct Polar {
  NameSet plus;
  NameSet minus;
};

}  // namespace

// Mirrors the polarity discipline of well-formedness: a binder is only usable
// covariantly in its own result.
static TypeRef genType(Generator& g, const Context& gamma, std::size_t depth, const Polar& p,
                       std::size_t& fresh) {
  auto& rng = g.rng();
  auto coin = [&](double q) { return std::uniform_real_distribution<double>(0, 1)(rng) < q; };
  std::vector<Name> tvs = typeVarsOf(gamma);
  if (!tvs.empty() && coin(0.2))
    return tvar(tvs[std::uniform_int_distribution<std::size_t>(0, tvs.size() - 1)(rng)]);
  CaptureSet c = capsFrom(g, p.plus);
  if (depth == 0 || coin(0.3)) return capt(c, top());
  if (coin(0.7)) {
    Name x = "x" + std::to_string(fresh++);
    TypeRef s = genType(g, gamma, depth - 1, Polar{p.minus, p.plus}, fresh);
    Polar inner = p;
    inner.plus.insert(x);
    TypeRef r = genType(g, gamma.extendTerm(x, s), depth - 1, inner, fresh);
    return capt(c, fun(x, s, r));
  }
  Name X = "X" + std::to_string(fresh++);
  TypeRef b = genType(g, gamma, depth - 1, Polar{p.minus, p.plus}, fresh);
  TypeRef r = genType(g, gamma.extendType(X, b), depth - 1, p, fresh);
  return capt(c, tfun(X, b, r));
}

TypeRef Generator::simpleType(const Context& gamma, std::size_t depth, const NameSet& allowed) {
  return genType(*this, gamma, depth, Polar{allowed, allowed}, fresh_);
}

TypeRef Generator::type(const Context& gamma, std::size_t depth) {
  std::vector<Name> vs = termVarsOf(gamma);
  return simpleType(gamma, depth, NameSet(vs.begin(), vs.end()));
}

Context Generator::context() {
  Context g;
  std::size_t n = pick(5);
  for (std::size_t i = 0; i < n; ++i) {
    if (coin(0.7)) {
      Name x = "a" + std::to_string(fresh_++);
      TypeRef t = coin(0.25) ? capt(CaptureSet{}, top()) : type(g, 2);
      g = g.extendTerm(x, t);
    } else {
      Name X = "A" + std::to_string(fresh_++);
      g = g.extendType(X, type(g, 1));
    }
  }
  return g;
}

TermRef Generator::tryVar(Scope& s, const TypeRef& target) {
  std::vector<TermRef> ok;
  for (const auto& x : s.usable) {
    auto ty = s.gamma.termType(x);
    if (!ty) continue;
    const Capt* c = asCapt(*ty);
    TypeRef own = c ? capt(CaptureSet{x}, c->pre) : *ty;
    if (subtype(s.gamma, own, target)) ok.push_back(var(x));
  }
  if (ok.empty()) return nullptr;
  return ok[pick(ok.size())];
}

namespace {

NameSet filterUsable(const Context& g, const NameSet& usable, const CaptureSet& c) {
  if (c.isUniversal()) return usable;
  NameSet out;
  for (const auto& x : usable) {
    try {
      if (subcapture(g, CaptureSet{x}, c)) out.insert(x);
    } catch (const TypeError&) {
    }
  }
  return out;
}

}  // namespace

TermRef Generator::function(Scope& s, std::size_t depth) {
  TypeRef target = capt(capsFrom(*this, s.usable), top());
  TypeRef ft = type(s.gamma, std::min<std::size_t>(depth, 2));
  if (asCapt(ft) && !pretypeAs<Top>(ft)) target = ft;
  return ofType(s, target, depth);
}

TermRef Generator::anyTerm(Scope& s, std::size_t depth) { return function(s, depth); }

TermRef Generator::effectful(Scope& s, const TypeRef& target, std::size_t depth) {
  std::vector<std::function<TermRef()>> opts;
  for (const auto& x : s.usable) {
    auto ty = s.gamma.termType(x);
    if (!ty) continue;
    TypeRef exposed = expose(s.gamma, *ty);
    if (const ReturnCap* r = pretypeAs<ReturnCap>(exposed)) {
      TypeRef answer = r->answer;
      opts.push_back([=, this, &s] { return doReturn(var(x), ofType(s, answer, depth ? depth - 1 : 0)); });
    }
    if (pretypeAs<RegionCap>(exposed)) {
      opts.push_back([=, this, &s] {
        return deref(newPtr(x, target, ofType(s, target, depth ? depth - 1 : 0)));
      });
      if (depth > 0)
        opts.push_back([=, this, &s] {
          TypeRef elem = type(s.gamma, 1);
          Name p = "p" + std::to_string(fresh_++);
          Scope inner{s.gamma.extendTerm(p, capt(CaptureSet{x}, ptr(elem))), s.usable};
          inner.usable.insert(p);
          TermRef body = ofType(inner, target, depth - 1);
          return app(abs(p, capt(CaptureSet{x}, ptr(elem)), body),
                     newPtr(x, elem, ofType(s, elem, depth - 1)));
        });
    }
    if (pretypeAs<Ptr>(exposed)) opts.push_back([=] { return deref(var(x)); });
    if (const Eff* e = pretypeAs<Eff>(exposed)) {
      TypeRef a = e->arg;
      opts.push_back([=, this, &s] { return doEff(x, ofType(s, a, depth ? depth - 1 : 0)); });
    }
  }
  if (depth > 0 && concreteCv(s.gamma, target)) {
    if (ext_.returns)
      opts.push_back([=, this, &s] {
        Name r = "r" + std::to_string(fresh_++);
        Scope inner{s.gamma.extendTerm(r, capt(CaptureSet::universal(), returnCap(target))),
                    s.usable};
        inner.usable.insert(r);
        return handleReturn(r, target, ofType(inner, target, depth - 1));
      });
    if (ext_.regions)
      opts.push_back([=, this, &s] {
        Name r = "r" + std::to_string(fresh_++);
        Scope inner{s.gamma.extendTerm(r, capt(CaptureSet::universal(), region())), s.usable};
        inner.usable.insert(r);
        return regionBlock(r, ofType(inner, target, depth - 1));
      });
    if (ext_.effects)
      opts.push_back([=, this, &s] {
        std::vector<Name> vs = termVarsOf(s.gamma);
        NameSet dom(vs.begin(), vs.end());
        Polar concrete{dom, dom};
        TypeRef a = genType(*this, s.gamma, 1, concrete, fresh_);
        TypeRef b = genType(*this, s.gamma, 1, concrete, fresh_);
        if (!concreteCv(s.gamma, a)) a = capt(CaptureSet{}, top());
        Name x = "e" + std::to_string(fresh_++);
        Name y = "y" + std::to_string(fresh_++);
        Name k = "k" + std::to_string(fresh_++);
        TypeRef effTy = capt(CaptureSet::universal(), eff(a, b));
        Scope body{s.gamma.extendTerm(x, effTy), s.usable};
        body.usable.insert(x);
        TermRef t = ofType(body, target, depth - 1);
        Name z = "z" + std::to_string(fresh_++);
        Scope handler{s.gamma.extendTerm(y, a).extendTerm(
                          k, capt(CaptureSet::universal(), fun(z, b, target))),
                      s.usable};
        handler.usable.insert(y);
        handler.usable.insert(k);
        TermRef hb = ofType(handler, target, depth - 1);
        return handleEff(x, effTy, y, k, hb, t);
      });
  }
  if (opts.empty()) throw GenFail{};
  return opts[pick(opts.size())]();
}

TermRef Generator::ofType(Scope& s, const TypeRef& target, std::size_t depth) {
  if (work == 0) throw GenFail{};
  --work;

  enum Opt { VarO, Intro, Beta, TBeta, VarApp, Effect, Count };
  std::vector<int> order;
  for (int i = 0; i < Count; ++i) order.push_back(i);
  std::shuffle(order.begin(), order.end(), rng_);
  // Variables first half the time keeps terms small.
  if (coin(0.3)) std::stable_partition(order.begin(), order.end(), [](int o) { return o == VarO; });

  for (int o : order) {
    TermRef t;
    try {
      switch (o) {
        case VarO:
          t = tryVar(s, target);
          break;
        case Intro: {
          const Capt* c = asCapt(target);
          if (!c) break;
          if (const Fun* f = std::get_if<Fun>(&c->pre->node)) {
            Name x = "x" + std::to_string(fresh_++);
            TypeRef res = renameTermVar(f->result, f->param, x);
            Scope inner{s.gamma.extendTerm(x, f->paramType),
                        filterUsable(s.gamma, s.usable, c->captures)};
            inner.usable.insert(x);
            t = abs(x, f->paramType, ofType(inner, res, depth));
          } else if (const TFun* f = std::get_if<TFun>(&c->pre->node)) {
            Name X = "X" + std::to_string(fresh_++);
            TypeRef res = substType(f->result, f->tparam, tvar(X));
            Scope inner{s.gamma.extendType(X, f->bound),
                        filterUsable(s.gamma, s.usable, c->captures)};
            t = tabs(X, f->bound, ofType(inner, res, depth));
          } else if (std::holds_alternative<Top>(c->pre->node) && depth > 0) {
            TypeRef ft = type(s.gamma, 1);
            const Capt* fc = asCapt(ft);
            if (fc && !std::holds_alternative<Top>(fc->pre->node))
              t = ofType(s, capt(c->captures, fc->pre), depth - 1);
          }
          break;
        }
        case Beta: {
          if (depth == 0) break;
          TypeRef p = type(s.gamma, std::min<std::size_t>(depth - 1, 2));
          Name x = "x" + std::to_string(fresh_++);
          Scope inner{s.gamma.extendTerm(x, p), s.usable};
          inner.usable.insert(x);
          TermRef body = ofType(inner, target, depth - 1);
          t = app(abs(x, p, body), ofType(s, p, depth - 1));
          break;
        }
        case TBeta: {
          if (depth == 0) break;
          TypeRef b = type(s.gamma, 1);
          Name X = "X" + std::to_string(fresh_++);
          Scope inner{s.gamma.extendType(X, b), s.usable};
          TermRef body = ofType(inner, target, depth - 1);
          t = tapp(tabs(X, b, body), b);
          break;
        }
        case VarApp: {
          if (depth == 0) break;
          std::vector<Name> fns;
          for (const auto& x : s.usable) {
            auto ty = s.gamma.termType(x);
            if (!ty) continue;
            TypeRef e = expose(s.gamma, *ty);
            if (pretypeAs<Fun>(e) || pretypeAs<TFun>(e)) fns.push_back(x);
          }
          if (fns.empty()) break;
          Name f = fns[pick(fns.size())];
          TypeRef e = expose(s.gamma, *s.gamma.termType(f));
          if (const Fun* fn = pretypeAs<Fun>(e))
            t = app(var(f), ofType(s, fn->paramType, depth - 1));
          else
            t = tapp(var(f), pretypeAs<TFun>(e)->bound);
          break;
        }
        case Effect:
          if (ext_.any()) t = effectful(s, target, depth);
          break;
      }
    } catch (const GenFail&) {
      continue;
    }
    if (t && accepts(s.gamma, t, target, ext_)) return t;
  }
  throw GenFail{};
}

Generated Generator::finish(const Context& gamma, const TermRef& t, const TypeRef& target) {
  TypingStats stats;
  Typer typer(ext_, &stats);
  TypeRef ty;
  try {
    ty = typer.synth(gamma, t);
  } catch (const TypeError&) {
    // Only accepted in checking mode against the target.
    typer.check(gamma, t, target);
    ty = target;
  }
  for (const auto& [rule, n] : stats.rules) coverage_[rule] += n;
  coverage_["sc-var"] += stats.subcapture.scVar;
  return Generated{gamma, t, ty, ext_};
}

Generated Generator::program() {
  for (int attempt = 0; attempt < 20; ++attempt) {
    fresh_ = 0;
    work = kWorkBudget;
    Scope s;
    TypeRef target = type(s.gamma, std::min<std::size_t>(maxDepth_, 3));
    try {
      // Prefer a redex at the root so there is something to run.
      TermRef t;
      int shape = static_cast<int>(pick(ext_.any() ? 4 : 3));
      if (shape == 0) {
        TypeRef p = type(s.gamma, 2);
        Name x = "x" + std::to_string(fresh_++);
        Scope inner{s.gamma.extendTerm(x, p), {x}};
        TermRef body = ofType(inner, target, maxDepth_ - 1);
        t = app(abs(x, p, body), ofType(s, p, maxDepth_ - 1));
      } else if (shape == 3) {
        t = effectful(s, target, maxDepth_);
      } else {
        t = ofType(s, target, maxDepth_);
      }
      if (!accepts(s.gamma, t, target, ext_)) continue;
      return finish(s.gamma, t, target);
    } catch (const GenFail&) {
    }
  }
  fresh_ = 0;
  TypeRef id = capt(CaptureSet{}, top());
  return finish(Context{}, abs("x", id, var("x")), capt(CaptureSet{}, fun("x", id, capt(CaptureSet{"x"}, top()))));
}

Generated Generator::openProgram() {
  for (int attempt = 0; attempt < 20; ++attempt) {
    fresh_ = 0;
    work = kWorkBudget;
    Context g = context();
    std::vector<Name> vs = termVarsOf(g);
    Scope s{g, NameSet(vs.begin(), vs.end())};
    TypeRef target = type(g, std::min<std::size_t>(maxDepth_, 3));
    try {
      TermRef t = ofType(s, target, maxDepth_);
      return finish(g, t, target);
    } catch (const GenFail&) {
    } catch (const TypeError&) {
    }
  }
  fresh_ = 0;
  TypeRef id = capt(CaptureSet{}, top());
  return finish(Context{}, abs("x", id, var("x")), capt(CaptureSet{}, fun("x", id, capt(CaptureSet{"x"}, top()))));
}

// ---------------------------------------------------------------- soundness

SoundnessReport checkSoundnessRun(const Context& gamma, const TermRef& t, const TypeRef& type,
                                  std::size_t fuel, const EvalOptions& opts) {
  SoundnessReport rep;
  bool onlyTermVars = true;
  for (const auto& b : gamma.bindings())
    if (b.kind != Binding::Kind::Term) onlyTermVars = false;
  bool closed = fv(t).empty();

  MachineState st;
  st.term = t;
  Typer typer(opts.ext);
  while (st.steps < fuel) {
    StepResult r = step(st, opts);
    if (r.kind == StepResult::Kind::Done) {
      rep.outcome = EvalOutcome::Kind::Done;
      rep.steps = st.steps;
      try {
        CaptureSet predicted = cv(type, gamma);
        if (!subcapture(gamma, CaptureSet(fv(st.term)), predicted)) {
          rep.ok = false;
          rep.failed = "capture-prediction";
          rep.detail = "fv(" + printTerm(st.term) + ") is not covered by " +
                       printCaptureSet(predicted);
        }
      } catch (const TypeError& e) {
        rep.ok = false;
        rep.failed = "capture-prediction";
        rep.detail = e.what();
      }
      return rep;
    }
    if (r.kind == StepResult::Kind::Stuck) {
      rep.outcome = EvalOutcome::Kind::Stuck;
      rep.reason = r.reason;
      rep.steps = st.steps;
      if (onlyTermVars && closed) {
        rep.ok = false;
        rep.failed = "progress";
        rep.detail = std::string(stuckName(r.reason)) + ": " + r.detail + " in " +
                     printTerm(st.term);
      }
      return rep;
    }
    st = std::move(r.state);
    try {
      typer.check(gamma, st.term, type);
    } catch (const TypeError& e) {
      rep.ok = false;
      rep.failed = "preservation";
      rep.steps = st.steps;
      rep.detail = "step " + std::to_string(st.steps) + ": " + e.what() + " in " +
                   printTerm(st.term);
      return rep;
    }
  }
  rep.outcome = EvalOutcome::Kind::OutOfFuel;
  rep.steps = st.steps;
  return rep;
}

// ---------------------------------------------------------------- shrinking

namespace {

std::vector<TermRef> children(const TermRef& t) {
  return std::visit(
      overloaded{
          [](const Abs& a) -> std::vector<TermRef> { return {a.body}; },
          [](const TAbs& a) -> std::vector<TermRef> { return {a.body}; },
          [](const App& a) -> std::vector<TermRef> { return {a.fn, a.arg}; },
          [](const TApp& a) -> std::vector<TermRef> { return {a.fn}; },
          [](const Handle& h) -> std::vector<TermRef> { return {h.body}; },
          [](const DoReturn& r) -> std::vector<TermRef> { return {r.cap, r.value}; },
          [](const RegionBlock& r) -> std::vector<TermRef> { return {r.body}; },
          [](const New& n) -> std::vector<TermRef> { return {n.init}; },
          [](const Deref& d) -> std::vector<TermRef> { return {d.target}; },
          [](const HandleEff& h) -> std::vector<TermRef> { return {h.handlerBody, h.body}; },
          [](const DoEff& d) -> std::vector<TermRef> { return {d.arg}; },
          [](const auto&) -> std::vector<TermRef> { return {}; },
      },
      t->node);
}

TermRef rebuild(const TermRef& t, const std::vector<TermRef>& c) {
  return std::visit(
      overloaded{
          [&](const Abs& a) { return abs(a.param, a.paramType, c[0], t->span); },
          [&](const TAbs& a) { return tabs(a.tparam, a.bound, c[0], t->span); },
          [&](const App&) { return app(c[0], c[1], t->span); },
          [&](const TApp& a) { return tapp(c[0], a.typeArg, t->span); },
          [&](const Handle& h) { return handleReturn(h.cap, h.answerType, c[0], t->span); },
          [&](const DoReturn&) { return doReturn(c[0], c[1], t->span); },
          [&](const RegionBlock& r) { return regionBlock(r.handle, c[0], t->span, r.frame); },
          [&](const New& n) { return newPtr(n.handle, n.elemType, c[0], t->span); },
          [&](const Deref&) { return deref(c[0], t->span); },
          [&](const HandleEff& h) {
            return handleEff(h.cap, h.effType, h.hParam, h.hKont, c[0], c[1], t->span);
          },
          [&](const DoEff& d) { return doEff(d.cap, c[0], t->span); },
          [&](const auto&) { return t; },
      },
      t->node);
}

void candidates(const TermRef& t, std::vector<TermRef>& out) {
  std::vector<TermRef> kids = children(t);
  for (const auto& k : kids) out.push_back(k);
  for (std::size_t i = 0; i < kids.size(); ++i) {
    std::vector<TermRef> sub;
    candidates(kids[i], sub);
    for (const auto& s : sub) {
      std::vector<TermRef> copy = kids;
      copy[i] = s;
      out.push_back(rebuild(t, copy));
    }
  }
}

}  // namespace

TermRef shrink(const Context& gamma, const TermRef& t, Extensions ext,
               const std::function<bool(const TermRef&)>& stillFails) {
  TermRef cur = t;
  for (bool improved = true; improved;) {
    improved = false;
    std::vector<TermRef> cands;
    candidates(cur, cands);
    std::stable_sort(cands.begin(), cands.end(), [](const TermRef& a, const TermRef& b) {
      return termSize(a) < termSize(b);
    });
    std::size_t size = termSize(cur);
    for (const auto& c : cands) {
      if (termSize(c) >= size) continue;
      if (!synthOpt(gamma, c, ext)) continue;
      if (!stillFails(c)) continue;
      cur = c;
      improved = true;
      break;
    }
  }
  return cur;
}

std::string counterexampleSource(const Violation& v) {
  std::ostringstream out;
  out << "-- property: " << v.property << "\n";
  out << "-- clause: " << v.clause << "\n";
  out << "-- seed: " << v.seed << "\n";
  if (v.ext.any()) out << "#ext " << v.ext.str() << "\n";
  for (const auto& b : v.gamma.bindings()) {
    if (b.kind == Binding::Kind::Term)
      out << "assume " << b.name << " : " << printType(b.type) << "\n";
    else
      out << "assume " << b.name << " <: " << printType(b.type) << "\n";
  }
  if (v.term) out << "main " << printTerm(v.term) << "\n";
  return out.str();
}

// ---------------------------------------------------------------- suites

bool FuzzReport::ok() const {
  for (const auto& s : suites)
    if (s.failures) return false;
  return true;
}

const SuiteResult* FuzzReport::suite(const std::string& name) const {
  for (const auto& s : suites)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<std::string> suiteNames() {
  return {"subcapture-reflexivity", "subcapture-transitivity", "subcapture-subset",
          "subcapture-universal",   "subcapture-pure-drop",    "subtype-reflexivity",
          "subtype-transitivity",   "monotone-substitution",   "preservation",
          "progress",               "capture-prediction",      "erasure",
          "embedding-empty",        "embedding-universal",     "determinism",
          "beta-v-residual",        "region-safety"};
}

namespace {

struct Runner {
  const FuzzOptions& opts;
  FuzzReport& report;

  bool wanted(const std::string& name) const {
    return opts.only.empty() ||
           std::find(opts.only.begin(), opts.only.end(), name) != opts.only.end();
  }

  std::uint64_t seedFor(std::size_t suite, std::size_t i) const {
    return mix(opts.seed ^ mix((static_cast<std::uint64_t>(suite) << 40) ^ i));
  }

  void merge(const Generator& g) {
    for (const auto& [k, n] : g.coverage()) report.coverage[k] += n;
  }

  void fail(SuiteResult& r, Violation v) {
    ++r.failures;
    if (r.first) return;
    if (!opts.crashDir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(opts.crashDir, ec);
      std::string path = opts.crashDir + "/" + r.name + "-" + std::to_string(v.seed) + ".cc";
      std::ofstream f(path);
      if (f) {
        f << counterexampleSource(v);
        report.crashFiles.push_back(path);
      }
    }
    r.first = std::move(v);
  }

  // ------------------------------------------------------------ capture laws

  void subcaptureLaws() {
    SuiteResult refl{"subcapture-reflexivity"}, trans{"subcapture-transitivity"},
        subset{"subcapture-subset"}, univ{"subcapture-universal"},
        pure{"subcapture-pure-drop"};
    auto law = [&](SuiteResult& r, std::uint64_t seed, const Context& g, bool holds,
                   const std::string& clause) {
      ++r.samples;
      if (!holds) fail(r, Violation{r.name, clause, seed, g, nullptr, Extensions::none()});
    };
    auto sc = [](const Context& g, const CaptureSet& a, const CaptureSet& b) {
      return subcapture(g, a, b);
    };
    auto short_ = [&] {
      for (auto* r : {&refl, &trans, &subset, &univ, &pure})
        if (r->samples < opts.count) return true;
      return false;
    };
    for (std::size_t i = 0; short_() && i < opts.count * 50; ++i) {
      std::uint64_t seed = seedFor(0, i);
      Generator gen(seed, opts.maxDepth, Extensions::none());
      Context g = gen.context();
      CaptureSet c1 = gen.captureSet(g);
      law(refl, seed, g, sc(g, c1, c1), printCaptureSet(c1) + " <: " + printCaptureSet(c1));

      // C1 subset of C2
      CaptureSet c2 = gen.captureSet(g);
      if (!c2.isUniversal()) {
        NameSet sub;
        for (const auto& x : c2.vars())
          if (gen.rng()() & 1) sub.insert(x);
        CaptureSet c0(sub);
        law(subset, seed, g, sc(g, c0, c2),
            printCaptureSet(c0) + " <: " + printCaptureSet(c2));
      } else {
        law(subset, seed, g, sc(g, c1, c2),
            printCaptureSet(c1) + " <: " + printCaptureSet(c2));
      }

      bool u1 = sc(g, c1, CaptureSet::universal());
      bool u2 = sc(g, CaptureSet::universal(), c1) == c1.isUniversal();
      law(univ, seed, g, u1 && u2, printCaptureSet(c1) + " against {*}");

      for (const auto& b : g.bindings()) {
        if (b.kind != Binding::Kind::Term) continue;
        const Capt* c = asCapt(b.type);
        if (!c || !c->captures.isEmpty()) continue;
        law(pure, seed, g, sc(g, CaptureSet{b.name}, CaptureSet{}),
            "{" + b.name + "} <: {}");
      }

      // Transitivity over a chain built by widening and dereferencing.
      for (int tries = 0; tries < 4; ++tries) {
        CaptureSet a = gen.captureSet(g);
        CaptureSet b = widen(gen, g, a);
        CaptureSet c = widen(gen, g, b);
        if (!sc(g, a, b) || !sc(g, b, c)) continue;
        law(trans, seed, g, sc(g, a, c),
            printCaptureSet(a) + " <: " + printCaptureSet(b) + " <: " + printCaptureSet(c));
        break;
      }
    }
    for (auto* r : {&refl, &trans, &subset, &univ, &pure})
      if (wanted(r->name)) report.suites.push_back(*r);
  }

  static CaptureSet widen(Generator& gen, const Context& g, const CaptureSet& c) {
    if (c.isUniversal()) return c;
    std::uniform_int_distribution<int> d(0, 5);
    int how = d(gen.rng());
    if (how == 0) return CaptureSet::universal();
    if (how <= 2) return csUnion(c, gen.captureSet(g));
    // Replace one member by the capture set of its type.
    NameSet out = c.vars();
    if (out.empty()) return gen.captureSet(g);
    auto it = out.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(gen.rng()));
    Name x = *it;
    out.erase(it);
    CaptureSet rest(out);
    try {
      return csUnion(rest, cv(*g.termType(x), g));
    } catch (const TypeError&) {
      return c;
    }
  }

  // ------------------------------------------------------------ subtype laws

  static TypeRef vary(Generator& gen, const Context& g, const TypeRef& t, bool up, int depth) {
    auto& rng = gen.rng();
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
    if (const TVar* v = asTVar(t)) {
      if (up && coin(0.4)) {
        auto b = g.typeBound(v->name);
        if (b) return *b;
      }
      return t;
    }
    const Capt& c = *asCapt(t);
    CaptureSet cs = c.captures;
    if (up) {
      if (coin(0.3)) cs = widen(gen, g, cs);
    } else if (!cs.isUniversal() && coin(0.4)) {
      NameSet keep;
      for (const auto& x : cs.vars())
        if (coin(0.5)) keep.insert(x);
      cs = CaptureSet(keep);
    }
    if (up && depth == 0 && coin(0.2)) return capt(cs, top());
    if (!up && coin(0.1)) return capt(cs, bottom());
    PretypeRef pre = std::visit(
        overloaded{
            [&](const Fun& f) -> PretypeRef {
              return fun(f.param, vary(gen, g, f.paramType, !up, depth + 1),
                         vary(gen, g.extendTerm(f.param, f.paramType), f.result, up, depth + 1));
            },
            [&](const TFun& f) -> PretypeRef {
              return tfun(f.tparam, f.bound,
                          vary(gen, g.extendType(f.tparam, f.bound), f.result, up, depth + 1));
            },
            [&](const auto&) -> PretypeRef { return c.pre; },
        },
        c.pre->node);
    return capt(cs, pre);
  }

  void subtypeLaws() {
    SuiteResult refl{"subtype-reflexivity"}, trans{"subtype-transitivity"},
        mono{"monotone-substitution"};
    for (std::size_t i = 0;
         (refl.samples < opts.count || trans.samples < opts.count || mono.samples < opts.count) &&
         i < opts.count * 50;
         ++i) {
      std::uint64_t seed = seedFor(1, i);
      Generator gen(seed, opts.maxDepth, Extensions::none());
      Context g = gen.context();
      TypeRef t2 = gen.type(g, 3);
      if (refl.samples < opts.count) {
        ++refl.samples;
        if (!subtype(g, t2, t2))
          fail(refl, Violation{refl.name, printType(t2) + " <: itself", seed, g, nullptr, {}});
      }
      if (trans.samples < opts.count) {
        TypeRef t1 = vary(gen, g, t2, false, 0);
        TypeRef t3 = vary(gen, g, t2, true, 0);
        try {
          wfTopLevel(g, t1);
          wfTopLevel(g, t3);
          if (subtype(g, t1, t2) && subtype(g, t2, t3)) {
            ++trans.samples;
            if (!subtype(g, t1, t3))
              fail(trans, Violation{trans.name,
                                    printType(t1) + " <: " + printType(t2) + " <: " +
                                        printType(t3),
                                    seed, g, nullptr, {}});
          }
        } catch (const TypeError&) {
        }
      }
      if (mono.samples < opts.count) {
        std::vector<Name> dom = termVarsOf(g);
        NameSet d(dom.begin(), dom.end());
        TypeRef s = gen.type(g, 1);
        Name x = freshName("x", g.allNames());
        Context gx = g.extendTerm(x, s);
        NameSet plus = d;
        plus.insert(x);
        TypeRef t = genTypeWith(gen, gx, plus, d);
        try {
          wfType(gx, plus, d, t);
        } catch (const TypeError&) {
          continue;
        }
        CaptureSet c2 = gen.captureSet(g);
        CaptureSet c1 = gen.captureSet(g);
        if (!subcapture(g, c1, c2)) {
          if (c2.isUniversal()) continue;
          NameSet sub;
          for (const auto& y : c2.vars())
            if (gen.rng()() & 1) sub.insert(y);
          c1 = CaptureSet(sub);
        }
        ++mono.samples;
        TypeRef lo = substCaptInType(t, x, c1), hi = substCaptInType(t, x, c2);
        if (!subtype(g, lo, hi))
          fail(mono, Violation{mono.name, printType(lo) + " <: " + printType(hi), seed, gx,
                               nullptr, {}});
      }
    }
    for (auto* r : {&refl, &trans, &mono})
      if (wanted(r->name)) report.suites.push_back(*r);
  }

  static TypeRef genTypeWith(Generator& gen, const Context& g, const NameSet& plus,
                             const NameSet& minus) {
    std::size_t fresh = 100;
    return genType(gen, g, 3, Polar{plus, minus}, fresh);
  }

  // ------------------------------------------------------------ soundness

  void soundness() {
    SuiteResult pres{"preservation"}, prog{"progress"}, pred{"capture-prediction"};
    EvalOptions eo;
    eo.ext = opts.ext;
    eo.mutateSkipCaptureSubst = opts.mutateEvaluator;
    auto record = [&](const Generated& g, std::uint64_t seed, const EvalOptions& o) {
      SoundnessReport r = checkSoundnessRun(g.gamma, g.term, g.type, opts.fuel, o);
      ++pres.samples;
      bool closed = fv(g.term).empty() && g.gamma.empty();
      if (closed) ++prog.samples;
      if (r.outcome == EvalOutcome::Kind::Done) ++pred.samples;
      std::string tally = r.outcome == EvalOutcome::Kind::Done       ? "done"
                          : r.outcome == EvalOutcome::Kind::OutOfFuel ? "out-of-fuel"
                                                                      : std::string("stuck:") +
                                                                            stuckName(r.reason);
      ++pres.tallies[tally];
      if (r.ok) return;
      SuiteResult& target = r.failed == "preservation" ? pres
                            : r.failed == "progress"   ? prog
                                                       : pred;
      std::string failed = r.failed;
      auto stillFails = [&](const TermRef& t) {
        auto ty = synthOpt(g.gamma, t, g.ext);
        if (!ty) return false;
        SoundnessReport again = checkSoundnessRun(g.gamma, t, *ty, opts.fuel, o);
        return !again.ok && again.failed == failed;
      };
      TermRef small = shrink(g.gamma, g.term, g.ext, stillFails);
      auto ty = synthOpt(g.gamma, small, g.ext);
      std::string detail = r.detail;
      if (ty) detail = checkSoundnessRun(g.gamma, small, *ty, opts.fuel, o).detail;
      fail(target, Violation{target.name, detail, seed, g.gamma, small, g.ext});
    };
    for (std::size_t i = 0;
         (pres.samples < 2 * opts.count || prog.samples < opts.count || pred.samples < opts.count) &&
         i < opts.count * 4;
         ++i) {
      std::uint64_t seed = seedFor(2, i);
      Generator gen(seed, opts.maxDepth, opts.ext);
      record(gen.program(), seed, eo);
      // Open programs over term variables only: variables count as values.
      Generator open(seed ^ 0x5bd1e995, opts.maxDepth, opts.ext);
      Generated g = open.openProgram();
      bool termsOnly = true;
      for (const auto& b : g.gamma.bindings())
        if (b.kind != Binding::Kind::Term) termsOnly = false;
      merge(gen);
      merge(open);
      if (!termsOnly) continue;
      EvalOptions oo = eo;
      oo.ext.returns = true;
      record(g, seed ^ 0x5bd1e995, oo);
    }
    for (auto* r : {&pres, &prog, &pred})
      if (wanted(r->name)) report.suites.push_back(*r);
  }

  // ------------------------------------------------------------ F<: bridge

  void bridge() {
    SuiteResult er{"erasure"}, e0{"embedding-empty"}, e1{"embedding-universal"};
    Extensions core = Extensions::none();
    for (std::size_t i = 0;
         (er.samples < opts.count || e0.samples < opts.count) && i < opts.count * 4; ++i) {
      std::uint64_t seed = seedFor(3, i);
      Generator gen(seed, opts.maxDepth, core);
      Generated g = gen.openProgram();
      ++er.samples;
      try {
        fsub::Context fc = fsub::eraseContext(g.gamma);
        fsub::Type ft = fsub::check(fc, fsub::eraseTerm(g.term));
        fsub::Type expect = fsub::eraseType(g.type);
        if (!fsub::subtype(fc, ft, expect) || !fsub::subtype(fc, expect, ft))
          fail(er, Violation{er.name,
                             "F<: type " + fsub::print(ft) + " differs from " +
                                 fsub::print(expect),
                             seed, g.gamma, g.term, core});
      } catch (const std::exception& e) {
        fail(er, Violation{er.name, e.what(), seed, g.gamma, g.term, core});
      }

      Generated c = gen.program();
      merge(gen);
      fsub::Term ft;
      fsub::Type fty;
      try {
        ft = fsub::eraseTerm(c.term);
        fty = fsub::check({}, ft);
      } catch (const std::exception&) {
        continue;  // counted by the erasure suite
      }
      for (auto* r : {&e0, &e1}) {
        CaptureSet cs = r == &e0 ? CaptureSet{} : CaptureSet::universal();
        ++r->samples;
        TermRef et = fsub::embedTerm(ft, cs);
        try {
          Typer(core).check(Context{}, et, fsub::embedType(fty, cs));
        } catch (const TypeError& e) {
          fail(*r, Violation{r->name, e.what(), seed, Context{}, et, core});
        }
      }
    }
    for (auto* r : {&er, &e0, &e1})
      if (wanted(r->name)) report.suites.push_back(*r);
  }

  // ------------------------------------------------------------ evaluator

  void evaluator() {
    SuiteResult det{"determinism"}, resid{"beta-v-residual"};
    for (std::size_t i = 0;
         (det.samples < opts.count || resid.samples < opts.count) && i < opts.count * 4; ++i) {
      std::uint64_t seed = seedFor(4, i);
      Generator gen(seed, opts.maxDepth, opts.ext);
      Generated g = gen.program();
      merge(gen);
      EvalOptions eo;
      eo.ext = opts.ext;
      eo.mutateSkipCaptureSubst = opts.mutateEvaluator;
      std::string residue;
      eo.observer = [&](const std::string& rule, const TermRef& redex, const TermRef& out) {
        if (rule != "beta-v") return;
        const App* a = termAs<App>(redex);
        const Abs* f = a ? termAs<Abs>(a->fn) : nullptr;
        if (!f || freeNames(redex).count(f->param)) return;
        ++resid.samples;
        if (freeNames(out).count(f->param) && residue.empty())
          residue = f->param + " survives in " + printTerm(out);
      };
      std::string nondet;
      auto look = [&](const TermRef& t) {
        if (isValue(t, eo.ext)) return;
        ++det.samples;
        std::size_t n = decompositions(t, eo.ext);
        if (n != 1 && nondet.empty())
          nondet = std::to_string(n) + " decompositions of " + printTerm(t);
      };
      look(g.term);
      evaluate(g.term, opts.fuel, eo, [&](const MachineState& s) { look(s.term); });
      if (!nondet.empty()) fail(det, Violation{det.name, nondet, seed, g.gamma, g.term, g.ext});
      if (!residue.empty())
        fail(resid, Violation{resid.name, residue, seed, g.gamma, g.term, g.ext});
    }
    for (auto* r : {&det, &resid})
      if (wanted(r->name)) report.suites.push_back(*r);
  }

  void regions() {
    SuiteResult rs{"region-safety"};
    Extensions ext = opts.ext;
    ext.regions = true;
    EvalOptions eo;
    eo.ext = ext;
    eo.mutateSkipCaptureSubst = opts.mutateEvaluator;
    for (std::size_t i = 0; i < opts.count; ++i) {
      std::uint64_t seed = seedFor(5, i);
      Generator gen(seed, opts.maxDepth, ext);
      Generated g = gen.program();
      merge(gen);
      ++rs.samples;
      EvalOutcome out = evaluate(g.term, opts.fuel, eo);
      if (out.kind == EvalOutcome::Kind::Done)
        ++rs.tallies["done"];
      else if (out.kind == EvalOutcome::Kind::OutOfFuel)
        ++rs.tallies["out-of-fuel"];
      else
        ++rs.tallies[std::string("stuck:") + stuckName(out.reason)];
      if (out.final.store.size()) ++rs.tallies["allocating"];
      if (out.kind == EvalOutcome::Kind::Stuck && out.reason == StuckReason::DanglingDeref) {
        auto stillFails = [&](const TermRef& t) {
          EvalOutcome again = evaluate(t, opts.fuel, eo);
          return again.kind == EvalOutcome::Kind::Stuck &&
                 again.reason == StuckReason::DanglingDeref;
        };
        TermRef small = shrink(g.gamma, g.term, ext, stillFails);
        fail(rs, Violation{rs.name, out.detail, seed, g.gamma, small, ext});
      }
    }
    if (wanted(rs.name)) report.suites.push_back(rs);
  }

  bool any(std::initializer_list<const char*> names) const {
    for (const char* n : names)
      if (wanted(n)) return true;
    return false;
  }
};

}  // namespace

FuzzReport runFuzz(const FuzzOptions& opts) {
  FuzzReport report;
  Runner r{opts, report};
  if (r.any({"subcapture-reflexivity", "subcapture-transitivity", "subcapture-subset",
             "subcapture-universal", "subcapture-pure-drop"}))
    r.subcaptureLaws();
  if (r.any({"subtype-reflexivity", "subtype-transitivity", "monotone-substitution"}))
    r.subtypeLaws();
  if (r.any({"preservation", "progress", "capture-prediction"})) r.soundness();
  if (r.any({"erasure", "embedding-empty", "embedding-universal"})) r.bridge();
  if (r.any({"determinism", "beta-v-residual"})) r.evaluator();
  if (r.any({"region-safety"})) r.regions();
  return report;
}

}  // namespace cctrack::harness
