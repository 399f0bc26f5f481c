#include "cctrack/eval.hpp"

#include <cstdlib>

namespace cctrack {

const char* stuckName(StuckReason r) {
  switch (r) {
    case StuckReason::UnhandledEffect: return "unhandled-effect";
    case StuckReason::DanglingDeref: return "dangling-deref";
    case StuckReason::UnboundCapability: return "unbound-capability";
    case StuckReason::NoRule: return "no-rule";
  }
  return "unknown";
}

bool isValue(const TermRef& t, Extensions ext) {
  if (termAs<Abs>(t) || termAs<TAbs>(t)) return true;
  if (termAs<Var>(t)) return ext.any();
  if (termAs<PtrVal>(t)) return ext.regions;
  return false;
}

namespace {

using Plug = std::function<TermRef(const TermRef&)>;

struct Signal {
  enum class Kind { Return, Effect, Alloc };
  Kind kind;
  Name cap;
  TermRef value;
  TypeRef elemType;
  Plug plug;
};

struct Outcome {
  enum class Kind { Value, Stepped, Signal, Stuck };
  Kind kind = Kind::Value;
  TermRef term;
  Signal signal{};
  StuckReason reason = StuckReason::NoRule;
  std::string detail;

  static Outcome value() { return {}; }
  static Outcome stepped(TermRef t) {
    Outcome o;
    o.kind = Kind::Stepped;
    o.term = std::move(t);
    return o;
  }
  static Outcome stuck(StuckReason r, std::string detail) {
    Outcome o;
    o.kind = Kind::Stuck;
    o.reason = r;
    o.detail = std::move(detail);
    return o;
  }
  static Outcome raise(Signal s) {
    Outcome o;
    o.kind = Kind::Signal;
    o.signal = std::move(s);
    return o;
  }
};

// A value leaving the scope of x keeps x only in type annotations; x is pure from here on.
TermRef forget(const TermRef& v, const Name& x) { return substCaptInTerm(v, x, CaptureSet{}); }

const char* signalWord(Signal::Kind k) {
  switch (k) {
    case Signal::Kind::Return: return "return";
    case Signal::Kind::Effect: return "do";
    case Signal::Kind::Alloc: return "new";
  }
  return "?";
}

struct Stepper {
  MachineState& st;
  const EvalOptions& opts;
  std::string rule;
  TermRef redex;
  TermRef contractum;

  bool val(const TermRef& t) const { return isValue(t, opts.ext); }

  Outcome contract(const char* r, const TermRef& from, TermRef to) {
    rule = r;
    redex = from;
    contractum = to;
    return Outcome::stepped(std::move(to));
  }

  // Steps a child in evaluation position and rebuilds the parent around it.
  Outcome inside(const TermRef& child, const Plug& rebuild) { return wrap(go(child), rebuild); }

  static Outcome wrap(Outcome o, const Plug& rebuild) {
    switch (o.kind) {
      case Outcome::Kind::Stepped:
        o.term = rebuild(o.term);
        return o;
      case Outcome::Kind::Signal: {
        Plug inner = std::move(o.signal.plug);
        o.signal.plug = [inner, rebuild](const TermRef& hole) { return rebuild(inner(hole)); };
        return o;
      }
      default:
        return o;
    }
  }

  // A signal passing a binder of the same name but of the wrong kind.
  static Outcome wrongBinder(const Signal& s, const char* binder) {
    return Outcome::stuck(StuckReason::NoRule, std::string(signalWord(s.kind)) + " on " + s.cap +
                                                   " meets a " + binder + " binder of that name");
  }

  Outcome go(const TermRef& t) {
    const Span sp = t->span;
    return std::visit(
        overloaded{
            [&](const Var& v) -> Outcome {
              if (val(t)) return Outcome::value();
              return Outcome::stuck(StuckReason::NoRule, "free variable " + v.name);
            },
            [&](const Abs&) -> Outcome { return Outcome::value(); },
            [&](const TAbs&) -> Outcome { return Outcome::value(); },
            [&](const PtrVal&) -> Outcome {
              if (val(t)) return Outcome::value();
              return Outcome::stuck(StuckReason::NoRule, "pointer without regions");
            },
            [&](const App& a) -> Outcome {
              if (!val(a.fn))
                return inside(a.fn, [&a, sp](const TermRef& c) { return app(c, a.arg, sp); });
              if (!val(a.arg))
                return inside(a.arg, [&a, sp](const TermRef& c) { return app(a.fn, c, sp); });
              const Abs* f = termAs<Abs>(a.fn);
              if (!f) return Outcome::stuck(StuckReason::NoRule, "application of a non-function");
              TermRef body = f->body;
              if (!opts.mutateSkipCaptureSubst)
                body = substCaptInTerm(body, f->param, CaptureSet(fv(a.arg)));
              return contract("beta-v", t, substTerm(body, f->param, a.arg));
            },
            [&](const TApp& a) -> Outcome {
              if (!val(a.fn))
                return inside(a.fn, [&a, sp](const TermRef& c) { return tapp(c, a.typeArg, sp); });
              const TAbs* f = termAs<TAbs>(a.fn);
              if (!f)
                return Outcome::stuck(StuckReason::NoRule, "type application of a non-type-function");
              return contract("beta-t", t, substTypeInTerm(f->body, f->tparam, a.typeArg));
            },
            [&](const Handle& h) -> Outcome {
              if (val(h.body)) {
                if (fv(h.body).count(h.cap))
                  return Outcome::stuck(StuckReason::UnboundCapability,
                                        "value leaves the block of " + h.cap);
                return contract("beta-return", t, forget(h.body, h.cap));
              }
              Plug rebuild = [&h, sp](const TermRef& c) {
                return handleReturn(h.cap, h.answerType, c, sp);
              };
              Outcome o = go(h.body);
              if (o.kind != Outcome::Kind::Signal || o.signal.cap != h.cap)
                return wrap(std::move(o), rebuild);
              if (o.signal.kind != Signal::Kind::Return) return wrongBinder(o.signal, "handle");
              return contract("context-return", t, forget(o.signal.value, h.cap));
            },
            [&](const DoReturn& r) -> Outcome {
              if (!val(r.cap))
                return inside(r.cap, [&r, sp](const TermRef& c) { return doReturn(c, r.value, sp); });
              if (!val(r.value))
                return inside(r.value, [&r, sp](const TermRef& c) { return doReturn(r.cap, c, sp); });
              const Var* c = termAs<Var>(r.cap);
              if (!c) return Outcome::stuck(StuckReason::NoRule, "return to a non-capability");
              redex = t;
              return Outcome::raise(
                  Signal{Signal::Kind::Return, c->name, r.value, nullptr,
                         [](const TermRef& hole) { return hole; }});
            },
            [&](const RegionBlock& r) -> Outcome {
              if (val(r.body)) {
                if (fv(r.body).count(r.handle))
                  return Outcome::stuck(StuckReason::UnboundCapability,
                                        "value leaves region " + r.handle);
                if (r.frame && *r.frame < st.store.size()) st.store[*r.frame].live = false;
                return contract("region-exit", t, forget(r.body, r.handle));
              }
              Plug rebuild = [&r, sp](const TermRef& c) {
                return regionBlock(r.handle, c, sp, r.frame);
              };
              Outcome o = go(r.body);
              if (o.kind == Outcome::Kind::Signal && o.signal.kind == Signal::Kind::Return &&
                  o.signal.cap != r.handle && r.frame && *r.frame < st.store.size())
                st.store[*r.frame].live = false;  // a non-local return leaves the region
              if (o.kind != Outcome::Kind::Signal || o.signal.cap != r.handle)
                return wrap(std::move(o), rebuild);
              if (o.signal.kind != Signal::Kind::Alloc) return wrongBinder(o.signal, "region");
              std::size_t frame;
              if (r.frame && *r.frame < st.store.size() && st.store[*r.frame].live) {
                frame = *r.frame;
              } else {
                frame = st.store.size();
                st.store.push_back(RegionFrame{r.handle, true, {}});
              }
              std::size_t loc = st.nextLocation++;
              st.store[frame].cells[loc] = o.signal.value;
              TermRef body = o.signal.plug(ptrVal(loc, r.handle, o.signal.elemType));
              return contract("new", t, regionBlock(r.handle, body, sp, frame));
            },
            [&](const New& n) -> Outcome {
              if (!val(n.init))
                return inside(n.init, [&n, sp](const TermRef& c) {
                  return newPtr(n.handle, n.elemType, c, sp);
                });
              return Outcome::raise(Signal{Signal::Kind::Alloc, n.handle, n.init, n.elemType,
                                           [](const TermRef& hole) { return hole; }});
            },
            [&](const Deref& d) -> Outcome {
              if (!val(d.target))
                return inside(d.target, [sp](const TermRef& c) { return deref(c, sp); });
              const PtrVal* p = termAs<PtrVal>(d.target);
              if (!p) return Outcome::stuck(StuckReason::NoRule, "dereference of a non-pointer");
              for (const auto& frame : st.store) {
                auto it = frame.cells.find(p->location);
                if (it == frame.cells.end()) continue;
                if (!frame.live)
                  return Outcome::stuck(StuckReason::DanglingDeref,
                                        "location " + std::to_string(p->location) +
                                            " of dead region " + frame.region);
                return contract("deref", t, it->second);
              }
              return Outcome::stuck(StuckReason::DanglingDeref,
                                    "unknown location " + std::to_string(p->location));
            },
            [&](const HandleEff& h) -> Outcome {
              if (val(h.body)) {
                if (fv(h.body).count(h.cap))
                  return Outcome::stuck(StuckReason::UnboundCapability,
                                        "value leaves the handler of " + h.cap);
                return contract("beta-handle", t, forget(h.body, h.cap));
              }
              Plug rebuild = [&h, sp](const TermRef& c) {
                return handleEff(h.cap, h.effType, h.hParam, h.hKont, h.handlerBody, c, sp);
              };
              Outcome o = go(h.body);
              if (o.kind != Outcome::Kind::Signal || o.signal.cap != h.cap)
                return wrap(std::move(o), rebuild);
              if (o.signal.kind != Signal::Kind::Effect) return wrongBinder(o.signal, "handler");
              return resume(t, h, o.signal);
            },
            [&](const DoEff& d) -> Outcome {
              if (!val(d.arg))
                return inside(d.arg, [&d, sp](const TermRef& c) { return doEff(d.cap, c, sp); });
              return Outcome::raise(Signal{Signal::Kind::Effect, d.cap, d.arg, nullptr,
                                           [](const TermRef& hole) { return hole; }});
            },
        },
        t->node);
  }

  // context-handle: the continuation reinstates the handler (deep semantics).
  Outcome resume(const TermRef& whole, const HandleEff& h, const Signal& s) {
    const Eff* e = pretypeAs<Eff>(h.effType);
    if (!e) return Outcome::stuck(StuckReason::NoRule, "handler type is not an effect type");
    TermRef value = forget(s.value, h.cap);
    NameSet avoid = allNames(whole);
    for (const auto& n : allNames(value)) avoid.insert(n);
    Name z = freshName("z", avoid);
    avoid.insert(z);
    TermRef cont = abs(z, e->res,
                       handleEff(h.cap, h.effType, h.hParam, h.hKont, h.handlerBody,
                                 s.plug(var(z)), whole->span));
    TermRef body = h.handlerBody;
    Name k = h.hKont;
    if (freeNames(value).count(k)) {
      Name fresh = freshName(k, avoid);
      body = renameTermVar(body, k, fresh);
      k = fresh;
    }
    body = substTerm(substCaptInTerm(body, h.hParam, CaptureSet(fv(value))), h.hParam, value);
    body = substTerm(substCaptInTerm(body, k, CaptureSet(fv(cont))), k, cont);
    return contract("context-handle", whole, body);
  }

};

}  // namespace

StepResult step(const MachineState& s, const EvalOptions& opts) {
  StepResult r;
  r.state = s;
  Stepper stepper{r.state, opts, {}, nullptr, nullptr};
  Outcome o = stepper.go(s.term);
  switch (o.kind) {
    case Outcome::Kind::Value:
      r.kind = StepResult::Kind::Done;
      return r;
    case Outcome::Kind::Stepped:
      r.kind = StepResult::Kind::Stepped;
      r.state.term = o.term;
      r.state.steps = s.steps + 1;
      r.rule = stepper.rule;
      if (opts.observer) opts.observer(stepper.rule, stepper.redex, stepper.contractum);
      return r;
    case Outcome::Kind::Signal:
      r.kind = StepResult::Kind::Stuck;
      r.state = s;
      if (o.signal.kind == Signal::Kind::Effect) {
        r.reason = StuckReason::UnhandledEffect;
        r.detail = "do " + o.signal.cap + " has no enclosing handler";
      } else {
        r.reason = StuckReason::UnboundCapability;
        r.detail = std::string(signalWord(o.signal.kind)) + " on " + o.signal.cap +
                   " has no enclosing binder";
      }
      return r;
    case Outcome::Kind::Stuck:
      r.kind = StepResult::Kind::Stuck;
      r.state = s;
      r.reason = o.reason;
      r.detail = o.detail;
      return r;
  }
  return r;
}

EvalOutcome evaluate(const TermRef& t, std::size_t fuel, const EvalOptions& opts,
                     const std::function<void(const MachineState&)>& onStep) {
  MachineState st;
  st.term = t;
  for (;;) {
    if (st.steps >= fuel) {
      if (isValue(st.term, opts.ext)) break;
      EvalOutcome out;
      out.kind = EvalOutcome::Kind::OutOfFuel;
      out.final = std::move(st);
      return out;
    }
    StepResult r = step(st, opts);
    if (r.kind == StepResult::Kind::Done) break;
    if (r.kind == StepResult::Kind::Stuck) {
      EvalOutcome out;
      out.kind = EvalOutcome::Kind::Stuck;
      out.final = std::move(st);
      out.reason = r.reason;
      out.detail = r.detail;
      return out;
    }
    st = std::move(r.state);
    if (onStep) onStep(st);
  }
  EvalOutcome out;
  out.kind = EvalOutcome::Kind::Done;
  out.final = std::move(st);
  return out;
}

std::size_t defaultFuel() {
  if (const char* env = std::getenv("CCTRACK_FUEL")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 100000;
}

std::size_t decompositions(const TermRef& t, Extensions ext) {
  auto v = [&](const TermRef& x) { return isValue(x, ext) ? 1u : 0u; };
  return std::visit(
      overloaded{
          [&](const App& a) -> std::size_t {
            return decompositions(a.fn, ext) + (v(a.fn) ? decompositions(a.arg, ext) : 0) +
                   (v(a.fn) & v(a.arg));
          },
          [&](const TApp& a) -> std::size_t { return decompositions(a.fn, ext) + v(a.fn); },
          [&](const Handle& h) -> std::size_t { return decompositions(h.body, ext) + v(h.body); },
          [&](const DoReturn& r) -> std::size_t {
            return decompositions(r.cap, ext) + (v(r.cap) ? decompositions(r.value, ext) : 0) +
                   (v(r.cap) & v(r.value));
          },
          [&](const RegionBlock& r) -> std::size_t {
            return decompositions(r.body, ext) + v(r.body);
          },
          [&](const New& n) -> std::size_t { return decompositions(n.init, ext) + v(n.init); },
          [&](const Deref& d) -> std::size_t {
            return decompositions(d.target, ext) + v(d.target);
          },
          [&](const HandleEff& h) -> std::size_t {
            return decompositions(h.body, ext) + v(h.body);
          },
          [&](const DoEff& d) -> std::size_t { return decompositions(d.arg, ext) + v(d.arg); },
          [](const auto&) -> std::size_t { return 0; },
      },
      t->node);
}

}  // namespace cctrack
