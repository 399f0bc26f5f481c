#include "cctrack/fsub.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace cctrack::fsub {

Type tvar(Name n) { return std::make_shared<TypeNode>(TypeNode{TVar{std::move(n)}}); }
Type top() {
  static const Type t = std::make_shared<TypeNode>(TypeNode{Top{}});
  return t;
}
Type arrow(Type from, Type to) {
  return std::make_shared<TypeNode>(TypeNode{Arrow{std::move(from), std::move(to)}});
}
Type all(Name X, Type bound, Type body) {
  return std::make_shared<TypeNode>(TypeNode{All{std::move(X), std::move(bound), std::move(body)}});
}
Term var(Name n) { return std::make_shared<TermNode>(TermNode{Var{std::move(n)}}); }
Term abs(Name x, Type t, Term body) {
  return std::make_shared<TermNode>(TermNode{Abs{std::move(x), std::move(t), std::move(body)}});
}
Term app(Term f, Term a) {
  return std::make_shared<TermNode>(TermNode{App{std::move(f), std::move(a)}});
}
Term tabs(Name X, Type bound, Term body) {
  return std::make_shared<TermNode>(
      TermNode{TAbs{std::move(X), std::move(bound), std::move(body)}});
}
Term tapp(Term f, Type t) {
  return std::make_shared<TermNode>(TermNode{TApp{std::move(f), std::move(t)}});
}

namespace {

void typeNames(const Type& t, NameSet& out, bool freeOnly, std::vector<Name>& bound) {
  std::visit(overloaded{
                 [&](const TVar& v) {
                   if (!freeOnly ||
                       std::find(bound.begin(), bound.end(), v.name) == bound.end())
                     out.insert(v.name);
                 },
                 [&](const Arrow& a) {
                   typeNames(a.from, out, freeOnly, bound);
                   typeNames(a.to, out, freeOnly, bound);
                 },
                 [&](const All& a) {
                   typeNames(a.bound, out, freeOnly, bound);
                   if (!freeOnly) out.insert(a.tparam);
                   bound.push_back(a.tparam);
                   typeNames(a.body, out, freeOnly, bound);
                   bound.pop_back();
                 },
                 [](const Top&) {},
             },
             t->node);
}

NameSet ftv(const Type& t) {
  NameSet out;
  std::vector<Name> bound;
  typeNames(t, out, true, bound);
  return out;
}

NameSet allTypeNames(const Type& t) {
  NameSet out;
  std::vector<Name> bound;
  typeNames(t, out, false, bound);
  return out;
}

bool eqType(const Type& a, const Type& b, std::vector<std::pair<Name, Name>>& env) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const TVar& va) {
            const Name& nb = std::get<TVar>(b->node).name;
            for (auto it = env.rbegin(); it != env.rend(); ++it) {
              bool l = it->first == va.name;
              bool r = it->second == nb;
              if (l || r) return l && r;
            }
            return va.name == nb;
          },
          [&](const Arrow& x) {
            const auto& y = std::get<Arrow>(b->node);
            return eqType(x.from, y.from, env) && eqType(x.to, y.to, env);
          },
          [&](const All& x) {
            const auto& y = std::get<All>(b->node);
            if (!eqType(x.bound, y.bound, env)) return false;
            env.emplace_back(x.tparam, y.tparam);
            bool ok = eqType(x.body, y.body, env);
            env.pop_back();
            return ok;
          },
          [](const Top&) { return true; },
      },
      a->node);
}

}  // namespace

bool alphaEqual(const Type& a, const Type& b) {
  std::vector<std::pair<Name, Name>> env;
  return eqType(a, b, env);
}

bool equal(const Term& a, const Term& b) {
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Var& x) { return x.name == std::get<Var>(b->node).name; },
          [&](const Abs& x) {
            const auto& y = std::get<Abs>(b->node);
            return x.param == y.param && alphaEqual(x.paramType, y.paramType) &&
                   equal(x.body, y.body);
          },
          [&](const App& x) {
            const auto& y = std::get<App>(b->node);
            return equal(x.fn, y.fn) && equal(x.arg, y.arg);
          },
          [&](const TAbs& x) {
            const auto& y = std::get<TAbs>(b->node);
            return x.tparam == y.tparam && alphaEqual(x.bound, y.bound) && equal(x.body, y.body);
          },
          [&](const TApp& x) {
            const auto& y = std::get<TApp>(b->node);
            return equal(x.fn, y.fn) && alphaEqual(x.typeArg, y.typeArg);
          },
      },
      a->node);
}

Type substType(const Type& t, const Name& X, const Type& s) {
  return std::visit(
      overloaded{
          [&](const TVar& v) -> Type { return v.name == X ? s : t; },
          [&](const Arrow& a) -> Type {
            return arrow(substType(a.from, X, s), substType(a.to, X, s));
          },
          [&](const All& a) -> Type {
            Type b = substType(a.bound, X, s);
            if (a.tparam == X) return all(a.tparam, b, a.body);
            Name Y = a.tparam;
            Type body = a.body;
            NameSet sv = ftv(s);
            if (sv.count(Y)) {
              NameSet avoid = allTypeNames(body);
              avoid.insert(sv.begin(), sv.end());
              avoid.insert(X);
              Y = freshName(Y, avoid);
              body = substType(body, a.tparam, tvar(Y));
            }
            return all(Y, b, substType(body, X, s));
          },
          [&](const Top&) -> Type { return t; },
      },
      t->node);
}

namespace {

const Binding* lookup(const Context& ctx, const Name& n, bool isType) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (it->name == n) return it->isType == isType ? &*it : nullptr;
  return nullptr;
}

bool bindsType(const Context& ctx, const Name& n) {
  for (const auto& b : ctx)
    if (b.name == n && b.isType) return true;
  return false;
}

NameSet contextNames(const Context& ctx) {
  NameSet out;
  for (const auto& b : ctx) {
    out.insert(b.name);
    auto more = allTypeNames(b.type);
    out.insert(more.begin(), more.end());
  }
  return out;
}

Type exposeType(const Context& ctx, Type t) {
  for (std::size_t i = 0; i <= ctx.size(); ++i) {
    const TVar* v = std::get_if<TVar>(&t->node);
    if (!v) return t;
    const Binding* b = lookup(ctx, v->name, true);
    if (!b) return t;
    t = b->type;
  }
  return t;
}

struct Guard {};

bool sub(const Context& ctx, const Type& a, const Type& b, std::size_t depth, std::size_t max) {
  if (depth > max) throw Guard{};
  if (std::holds_alternative<Top>(b->node)) return true;
  if (const TVar* va = std::get_if<TVar>(&a->node)) {
    if (const TVar* vb = std::get_if<TVar>(&b->node); vb && vb->name == va->name) return true;
    const Binding* bd = lookup(ctx, va->name, true);
    if (!bd) return false;
    return sub(ctx, bd->type, b, depth + 1, max);
  }
  if (a->node.index() != b->node.index()) return false;
  if (const Arrow* fa = std::get_if<Arrow>(&a->node)) {
    const auto& fb = std::get<Arrow>(b->node);
    return sub(ctx, fb.from, fa->from, depth + 1, max) && sub(ctx, fa->to, fb.to, depth + 1, max);
  }
  if (const All* fa = std::get_if<All>(&a->node)) {
    const auto& fb = std::get<All>(b->node);
    if (!sub(ctx, fb.bound, fa->bound, depth + 1, max)) return false;
    Name X = fb.tparam;
    Type ra = fa->body;
    Type rb = fb.body;
    if (fa->tparam != fb.tparam || bindsType(ctx, X)) {
      NameSet avoid = contextNames(ctx);
      for (const auto& n : allTypeNames(ra)) avoid.insert(n);
      for (const auto& n : allTypeNames(rb)) avoid.insert(n);
      X = freshName(X, avoid);
      ra = substType(ra, fa->tparam, tvar(X));
      rb = substType(rb, fb.tparam, tvar(X));
    }
    Context inner = ctx;
    inner.push_back({true, X, fb.bound});
    return sub(inner, ra, rb, depth + 1, max);
  }
  return false;
}

void wellScoped(const Context& ctx, const Type& t, std::vector<Name>& local) {
  std::visit(overloaded{
                 [&](const TVar& v) {
                   if (std::find(local.begin(), local.end(), v.name) == local.end() &&
                       !lookup(ctx, v.name, true))
                     throw Error("type variable " + v.name + " is not bound");
                 },
                 [&](const Arrow& a) {
                   wellScoped(ctx, a.from, local);
                   wellScoped(ctx, a.to, local);
                 },
                 [&](const All& a) {
                   wellScoped(ctx, a.bound, local);
                   local.push_back(a.tparam);
                   wellScoped(ctx, a.body, local);
                   local.pop_back();
                 },
                 [](const Top&) {},
             },
             t->node);
}

void wellScoped(const Context& ctx, const Type& t) {
  std::vector<Name> local;
  wellScoped(ctx, t, local);
}

}  // namespace

bool subtype(const Context& ctx, const Type& a, const Type& b, std::size_t maxDepth) {
  try {
    return sub(ctx, a, b, 0, maxDepth);
  } catch (const Guard&) {
    return false;
  }
}

Type check(const Context& ctx, const Term& t) {
  return std::visit(
      overloaded{
          [&](const Var& v) -> Type {
            const Binding* b = lookup(ctx, v.name, false);
            if (!b) throw Error("variable " + v.name + " is not bound");
            return b->type;
          },
          [&](const Abs& a) -> Type {
            wellScoped(ctx, a.paramType);
            Context inner = ctx;
            inner.push_back({false, a.param, a.paramType});
            return arrow(a.paramType, check(inner, a.body));
          },
          [&](const App& a) -> Type {
            Type f = check(ctx, a.fn);
            const Arrow* arr = std::get_if<Arrow>(&exposeType(ctx, f)->node);
            if (!arr) throw Error("applied term has type " + print(f) + ", not a function");
            Type arg = check(ctx, a.arg);
            if (!subtype(ctx, arg, arr->from))
              throw Error("argument type " + print(arg) + " is not a subtype of " +
                          print(arr->from));
            return arr->to;
          },
          [&](const TAbs& a) -> Type {
            wellScoped(ctx, a.bound);
            Name X = a.tparam;
            Term body = a.body;
            if (bindsType(ctx, X)) {
              // Shadowing a type variable would confuse earlier bindings; rename it.
              NameSet avoid = contextNames(ctx);
              X = freshName(X, avoid);
              body = [&]() {
                std::function<Term(const Term&)> go = [&](const Term& s) -> Term {
                  return std::visit(
                      overloaded{
                          [&](const Var&) { return s; },
                          [&](const Abs& x) {
                            return abs(x.param, substType(x.paramType, a.tparam, tvar(X)),
                                       go(x.body));
                          },
                          [&](const App& x) { return app(go(x.fn), go(x.arg)); },
                          [&](const TAbs& x) {
                            Type b = substType(x.bound, a.tparam, tvar(X));
                            if (x.tparam == a.tparam) return tabs(x.tparam, b, x.body);
                            return tabs(x.tparam, b, go(x.body));
                          },
                          [&](const TApp& x) {
                            return tapp(go(x.fn), substType(x.typeArg, a.tparam, tvar(X)));
                          },
                      },
                      s->node);
                };
                return go(a.body);
              }();
            }
            Context inner = ctx;
            inner.push_back({true, X, a.bound});
            return all(X, a.bound, check(inner, body));
          },
          [&](const TApp& a) -> Type {
            Type f = check(ctx, a.fn);
            const All* q = std::get_if<All>(&exposeType(ctx, f)->node);
            if (!q) throw Error("type-applied term has type " + print(f) + ", not a forall");
            wellScoped(ctx, a.typeArg);
            if (!subtype(ctx, a.typeArg, q->bound))
              throw Error("type argument " + print(a.typeArg) + " is outside bound " +
                          print(q->bound));
            return substType(q->body, q->tparam, a.typeArg);
          },
      },
      t->node);
}

namespace {

std::string printType(const Type& t, bool arrowLeft) {
  return std::visit(overloaded{
                        [](const TVar& v) { return v.name; },
                        [](const Top&) { return std::string("Top"); },
                        [&](const Arrow& a) {
                          std::string s = printType(a.from, true) + " -> " + printType(a.to, false);
                          return arrowLeft ? "(" + s + ")" : s;
                        },
                        [&](const All& a) {
                          std::string s = "forall[" + a.tparam + " <: " +
                                          printType(a.bound, false) + "] " +
                                          printType(a.body, false);
                          return arrowLeft ? "(" + s + ")" : s;
                        },
                    },
                    t->node);
}

// Levels: 0 anywhere, 1 function position, 2 argument position.
std::string printTerm(const Term& t, int level) {
  return std::visit(
      overloaded{
          [](const Var& v) { return v.name; },
          [&](const Abs& a) {
            std::string s = "\\(" + a.param + ": " + printType(a.paramType, false) + ") " +
                            printTerm(a.body, 0);
            return level > 0 ? "(" + s + ")" : s;
          },
          [&](const TAbs& a) {
            std::string s = "/\\[" + a.tparam + " <: " + printType(a.bound, false) + "] " +
                            printTerm(a.body, 0);
            return level > 0 ? "(" + s + ")" : s;
          },
          [&](const App& a) {
            std::string s = printTerm(a.fn, 1) + " " + printTerm(a.arg, 2);
            return level > 1 ? "(" + s + ")" : s;
          },
          [&](const TApp& a) {
            return printTerm(a.fn, 1) + " [" + printType(a.typeArg, false) + "]";
          },
      },
      t->node);
}

}  // namespace

std::string print(const Type& t) { return printType(t, false); }
std::string print(const Term& t) { return printTerm(t, 0); }

// ---------------------------------------------------------------- bridges

Type eraseType(const TypeRef& t) {
  if (const cctrack::TVar* v = asTVar(t)) return tvar(v->name);
  const Capt& c = *asCapt(t);
  return std::visit(
      overloaded{
          [](const cctrack::Top&) { return top(); },
          [](const Fun& f) { return arrow(eraseType(f.paramType), eraseType(f.result)); },
          [](const TFun& f) { return all(f.tparam, eraseType(f.bound), eraseType(f.result)); },
          [](const auto&) -> Type {
            throw Unsupported("extension types have no F<: erasure");
          },
      },
      c.pre->node);
}

Term eraseTerm(const TermRef& t) {
  return std::visit(
      overloaded{
          [](const cctrack::Var& v) { return var(v.name); },
          [](const cctrack::Abs& a) {
            return abs(a.param, eraseType(a.paramType), eraseTerm(a.body));
          },
          [](const cctrack::App& a) { return app(eraseTerm(a.fn), eraseTerm(a.arg)); },
          [](const cctrack::TAbs& a) {
            return tabs(a.tparam, eraseType(a.bound), eraseTerm(a.body));
          },
          [](const cctrack::TApp& a) { return tapp(eraseTerm(a.fn), eraseType(a.typeArg)); },
          [](const auto&) -> Term {
            throw Unsupported("extension terms have no F<: erasure");
          },
      },
      t->node);
}

Context eraseContext(const cctrack::Context& gamma) {
  Context out;
  for (const auto& b : gamma.bindings())
    out.push_back({b.kind == cctrack::Binding::Kind::Type, b.name, eraseType(b.type)});
  return out;
}

namespace {

void checkEmbedSet(const CaptureSet& c) {
  if (!c.isUniversal() && !c.isEmpty())
    throw std::invalid_argument("embedding needs the empty or the universal capture set");
}

TypeRef embed(const Type& t, const CaptureSet& c) {
  return std::visit(
      overloaded{
          [](const TVar& v) { return cctrack::tvar(v.name); },
          [&](const Top&) { return capt(c, cctrack::top()); },
          [&](const Arrow& a) {
            NameSet avoid = allTypeNames(a.from);
            for (const auto& n : allTypeNames(a.to)) avoid.insert(n);
            return capt(c, fun(freshName("x", avoid), embed(a.from, c), embed(a.to, c)));
          },
          [&](const All& a) { return capt(c, tfun(a.tparam, embed(a.bound, c), embed(a.body, c))); },
      },
      t->node);
}

}  // namespace

TypeRef embedType(const Type& t, const CaptureSet& c) {
  checkEmbedSet(c);
  return embed(t, c);
}

TermRef embedTerm(const Term& t, const CaptureSet& c) {
  checkEmbedSet(c);
  return std::visit(
      overloaded{
          [](const Var& v) { return cctrack::var(v.name); },
          [&](const Abs& a) {
            return cctrack::abs(a.param, embed(a.paramType, c), embedTerm(a.body, c));
          },
          [&](const App& a) { return cctrack::app(embedTerm(a.fn, c), embedTerm(a.arg, c)); },
          [&](const TAbs& a) {
            return cctrack::tabs(a.tparam, embed(a.bound, c), embedTerm(a.body, c));
          },
          [&](const TApp& a) { return cctrack::tapp(embedTerm(a.fn, c), embed(a.typeArg, c)); },
      },
      t->node);
}

cctrack::Context embedContext(const Context& ctx, const CaptureSet& c) {
  checkEmbedSet(c);
  cctrack::Context out;
  for (const auto& b : ctx)
    out = b.isType ? out.extendType(b.name, embed(b.type, c)) : out.extendTerm(b.name, embed(b.type, c));
  return out;
}

}  // namespace cctrack::fsub
