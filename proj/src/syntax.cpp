#include "cctrack/syntax.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "cctrack/diagnostics.hpp"

namespace cctrack {

// ---------------------------------------------------------------- extensions

bool Extensions::parse(const std::string& list, Extensions& out, std::string* bad) {
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t\r");
    if (b == std::string::npos) continue;
    item = item.substr(b, e - b + 1);
    if (item == "returns") out.returns = true;
    else if (item == "regions") out.regions = true;
    else if (item == "effects") out.effects = true;
    else if (item == "all") out = all();
    else {
      if (bad) *bad = item;
      return false;
    }
  }
  return true;
}

std::string Extensions::str() const {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += ", ";
    s += name;
  };
  add(returns, "returns");
  add(regions, "regions");
  add(effects, "effects");
  return s;
}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok { Ident, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '#') {
      // Pragmas are read separately; the lexer skips the line.
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), line, col});
      advance(j - i);
      continue;
    }
    static const char* multi[] = {"/\\", "<:", "=>"};
    bool matched = false;
    for (const char* m : multi) {
      std::size_t n = std::char_traits<char>::length(m);
      if (src.compare(i, n, m) == 0) {
        out.push_back({Tok::Punct, m, line, col});
        advance(n);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string("()[]{},:=\\!*").find(c) != std::string::npos) {
      out.push_back({Tok::Punct, std::string(1, c), line, col});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", Span{line, col, line, col});
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

Extensions pragmaExtensions(const std::string& src) {
  Extensions ext;
  std::stringstream ss(src);
  std::string lineText;
  int line = 0;
  while (std::getline(ss, lineText)) {
    ++line;
    auto b = lineText.find_first_not_of(" \t");
    if (b == std::string::npos || lineText.compare(b, 4, "#ext") != 0) continue;
    std::string bad;
    if (!Extensions::parse(lineText.substr(b + 4), ext, &bad))
      throw ParseError("unknown extension '" + bad + "'", Span{line, 1, line, 1});
  }
  return ext;
}

// ---------------------------------------------------------------- parser

const std::set<std::string> kCoreKeywords = {"forall", "Top", "Bot", "assume", "def", "main",
                                             "alias"};

class Parser {
 public:
  Parser(std::vector<Token> toks, Extensions ext, std::vector<Alias> aliases = {})
      : toks_(std::move(toks)), ext_(ext), aliases_(std::move(aliases)) {
    keywords_ = kCoreKeywords;
    if (ext_.returns) keywords_.insert({"handle", "in", "return", "Return"});
    if (ext_.regions) keywords_.insert({"region", "new", "Region", "Ptr", "in"});
    if (ext_.effects) keywords_.insert({"handle", "in", "handler", "do", "Eff"});
  }

  SourceProgram program() {
    SourceProgram p;
    p.extensions = ext_;
    while (!atEnd()) {
      const Token& t = peek();
      Span sp{t.line, t.column, t.line, t.column};
      if (isKw("alias")) {
        next();
        Alias a = aliasBody();
        aliases_.push_back(a);
        Declaration d{Declaration::Kind::Alias, a.name, nullptr, nullptr, aliases_.size() - 1, sp};
        p.decls.push_back(d);
      } else if (isKw("assume")) {
        next();
        Name n = ident("a name");
        if (accept("<:")) {
          p.decls.push_back({Declaration::Kind::AssumeType, n, type(), nullptr, 0, sp});
        } else {
          expect(":");
          p.decls.push_back({Declaration::Kind::AssumeTerm, n, type(), nullptr, 0, sp});
        }
      } else if (isKw("def")) {
        next();
        Name n = ident("a definition name");
        TypeRef ascribed;
        if (accept(":")) ascribed = type();
        expect("=");
        TermRef body = term();
        p.decls.push_back({Declaration::Kind::Def, n, ascribed, body, 0, sp});
      } else if (isKw("main")) {
        next();
        for (const auto& d : p.decls)
          if (d.kind == Declaration::Kind::Main) fail("at most one main term");
        p.decls.push_back({Declaration::Kind::Main, "main", nullptr, term(), 0, sp});
      } else {
        fail("a declaration (alias, assume, def, main)");
      }
    }
    p.aliases = aliases_;
    return p;
  }

  TypeRef wholeType() {
    TypeRef t = type();
    if (!atEnd()) fail("end of input");
    return t;
  }

  TermRef wholeTerm() {
    TermRef t = term();
    if (!atEnd()) fail("end of input");
    return t;
  }

 private:
  // -------------------------------------------------------------- tokens

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool atEnd() const { return peek().kind == Tok::End; }
  bool isPunct(const char* p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool isKw(const char* k) const {
    return peek().kind == Tok::Ident && peek().text == k && keywords_.count(k);
  }
  bool isPlainIdent(std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && !keywords_.count(peek(k).text);
  }
  bool accept(const char* p) {
    if (!isPunct(p)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError("expected " + expected + ", found " + found,
                     Span{t.line, t.column, t.line, t.column + static_cast<int>(t.text.size())});
  }

  void expect(const char* p) {
    if (!accept(p)) fail(std::string("'") + p + "'");
  }
  void expectKw(const char* k) {
    if (!isKw(k)) fail(std::string("'") + k + "'");
    next();
  }
  Name ident(const char* what) {
    if (!isPlainIdent()) fail(what);
    return next().text;
  }

  Span spanFrom(const Token& start) const {
    const Token& last = toks_[pos_ == 0 ? 0 : std::min(pos_ - 1, toks_.size() - 1)];
    return Span{start.line, start.column, last.line,
                last.column + static_cast<int>(last.text.size())};
  }

  // -------------------------------------------------------------- aliases

  const Alias* findAlias(const Name& n) const {
    for (auto it = aliases_.rbegin(); it != aliases_.rend(); ++it)
      if (it->name == n) return &*it;
    return nullptr;
  }

  std::vector<TypeRef> aliasArgs(const Alias& a) {
    std::vector<TypeRef> args;
    if (a.params.empty()) return args;
    expect("[");
    args.push_back(type());
    while (accept(",")) args.push_back(type());
    expect("]");
    if (args.size() != a.params.size())
      fail(std::to_string(a.params.size()) + " arguments for " + a.name);
    return args;
  }

  // Substitutes alias parameters simultaneously by first renaming them apart.
  template <class T, class Subst>
  T instantiate(const Alias& a, T body, const std::vector<TypeRef>& args, Subst subst) {
    std::vector<Name> tmp;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
      tmp.push_back("%" + std::to_string(i));
      body = subst(body, a.params[i], tvar(tmp.back()));
    }
    for (std::size_t i = 0; i < a.params.size(); ++i) body = subst(body, tmp[i], args[i]);
    return body;
  }

  Alias aliasBody() {
    Alias a;
    a.name = ident("an alias name");
    if (accept("[")) {
      a.params.push_back(ident("a parameter name"));
      while (accept(",")) a.params.push_back(ident("a parameter name"));
      expect("]");
    }
    expect("=");
    bool pre = false;
    if (isPunct("{")) {
      pre = false;
    } else if (isPlainIdent()) {
      const Alias* other = findAlias(peek().text);
      pre = other && other->isPretype();
    } else {
      pre = true;
    }
    if (pre) a.pretype = pretype();
    else a.type = type();
    return a;
  }

  // -------------------------------------------------------------- types

  CaptureSet captureSet() {
    expect("{");
    if (accept("*")) {
      expect("}");
      return CaptureSet::universal();
    }
    NameSet names;
    if (!isPunct("}")) {
      names.insert(ident("a variable"));
      while (accept(",")) names.insert(ident("a variable"));
    }
    expect("}");
    return CaptureSet(std::move(names));
  }

  TypeRef type() {
    if (isPunct("{")) {
      CaptureSet c = captureSet();
      return capt(std::move(c), pretype());
    }
    if (isPlainIdent()) {
      Name n = next().text;
      if (const Alias* a = findAlias(n)) {
        if (a->isPretype()) fail("a capture set before pretype alias " + n);
        Alias copy = *a;
        auto args = aliasArgs(copy);
        return instantiate(copy, copy.type, args, [](const TypeRef& t, const Name& x,
                                                      const TypeRef& s) {
          return substType(t, x, s);
        });
      }
      return tvar(n);
    }
    fail("a type");
  }

  PretypeRef pretype() {
    if (isKw("Top")) {
      next();
      return top();
    }
    if (isKw("Bot")) fail("a pretype (Bot is internal)");
    if (isKw("forall")) {
      next();
      if (accept("(")) {
        Name x = ident("a parameter name");
        expect(":");
        TypeRef s = type();
        expect(")");
        return fun(x, s, type());
      }
      expect("[");
      Name X = ident("a type parameter name");
      expect("<:");
      TypeRef s = type();
      expect("]");
      return tfun(X, s, type());
    }
    if (ext_.returns && isKw("Return")) {
      next();
      expect("[");
      TypeRef t = type();
      expect("]");
      return returnCap(t);
    }
    if (ext_.regions && isKw("Region")) {
      next();
      return region();
    }
    if (ext_.regions && isKw("Ptr")) {
      next();
      expect("[");
      TypeRef t = type();
      expect("]");
      return ptr(t);
    }
    if (ext_.effects && isKw("Eff")) {
      next();
      expect("[");
      TypeRef a = type();
      expect(",");
      TypeRef b = type();
      expect("]");
      return eff(a, b);
    }
    if (isPlainIdent()) {
      const Alias* a = findAlias(peek().text);
      if (a && a->isPretype()) {
        next();
        Alias copy = *a;
        auto args = aliasArgs(copy);
        return instantiate(copy, copy.pretype, args, [](const PretypeRef& u, const Name& x,
                                                         const TypeRef& s) {
          return substTypeInPretype(u, x, s);
        });
      }
    }
    fail("a pretype");
  }

  // A capability annotation: a type, or a bare pretype that is taken as {*}.
  TypeRef capabilityType() {
    if (isPunct("{")) return type();
    if (isPlainIdent()) {
      const Alias* a = findAlias(peek().text);
      if (!a || !a->isPretype()) return type();
    }
    return capt(CaptureSet::universal(), pretype());
  }

  // -------------------------------------------------------------- terms

  bool startsGreedy() const {
    return isPunct("\\") || isPunct("/\\") || isKw("handle") || isKw("return") ||
           isKw("region") || isKw("new") || isKw("do");
  }
  bool startsAtom() const { return isPlainIdent() || isPunct("(") || isPunct("!"); }

  TermRef term() {
    const Token& start = peek();
    TermRef head;
    if (startsGreedy()) return greedy();
    if (!startsAtom()) fail("a term");
    head = atom();
    for (;;) {
      if (isPunct("[")) {
        next();
        TypeRef t = type();
        expect("]");
        head = tapp(head, t, spanFrom(start));
      } else if (startsAtom()) {
        TermRef arg = atom();
        head = app(head, arg, spanFrom(start));
      } else if (startsGreedy()) {
        TermRef arg = greedy();
        head = app(head, arg, spanFrom(start));
        return head;
      } else {
        return head;
      }
    }
  }

  TermRef atom() {
    const Token& start = peek();
    if (accept("!")) {
      TermRef target = atom();
      return deref(target, spanFrom(start));
    }
    if (accept("(")) {
      TermRef t = term();
      expect(")");
      return t;
    }
    Name n = ident("a term");
    return var(n, spanFrom(start));
  }

  TermRef greedy() {
    const Token& start = peek();
    if (accept("\\")) {
      expect("(");
      Name x = ident("a parameter name");
      expect(":");
      TypeRef s = type();
      expect(")");
      TermRef body = term();
      return abs(x, s, body, spanFrom(start));
    }
    if (accept("/\\")) {
      expect("[");
      Name X = ident("a type parameter name");
      expect("<:");
      TypeRef s = type();
      expect("]");
      TermRef body = term();
      return tabs(X, s, body, spanFrom(start));
    }
    if (isKw("handle")) {
      next();
      Name x = ident("a capability name");
      expect(":");
      if (ext_.effects) {
        TypeRef t = capabilityType();
        if (accept("=")) {
          expectKw("handler");
          expect("(");
          Name y = ident("a handler parameter");
          expect(",");
          Name k = ident("a continuation name");
          expect(")");
          expect("=>");
          TermRef s = term();
          expectKw("in");
          TermRef body = term();
          return handleEff(x, t, y, k, s, body, spanFrom(start));
        }
        if (!ext_.returns) fail("'='");
        expectKw("in");
        TermRef body = term();
        return handleReturn(x, t, body, spanFrom(start));
      }
      TypeRef t = type();
      expectKw("in");
      TermRef body = term();
      return handleReturn(x, t, body, spanFrom(start));
    }
    if (isKw("return")) {
      next();
      TermRef cap = atom();
      TermRef value = term();
      return doReturn(cap, value, spanFrom(start));
    }
    if (isKw("region")) {
      next();
      Name x = ident("a region name");
      expectKw("in");
      TermRef body = term();
      return regionBlock(x, body, spanFrom(start));
    }
    if (isKw("new")) {
      next();
      Name x = ident("a region name");
      expect("[");
      TypeRef t = type();
      expect("]");
      TermRef init = term();
      return newPtr(x, t, init, spanFrom(start));
    }
    if (isKw("do")) {
      next();
      Name x = ident("a capability name");
      TermRef arg = term();
      return doEff(x, arg, spanFrom(start));
    }
    fail("a term");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Extensions ext_;
  std::set<std::string> keywords_;
  std::vector<Alias> aliases_;
};

// ---------------------------------------------------------------- printer

// Matches `pattern` against `target`, binding alias parameters. Binder names must agree.
struct AliasMatcher {
  const std::vector<Name>& params;
  std::map<Name, TypeRef> bound;
  std::vector<Name> localTypes;

  bool isParam(const Name& n) const {
    if (std::find(localTypes.begin(), localTypes.end(), n) != localTypes.end()) return false;
    return std::find(params.begin(), params.end(), n) != params.end();
  }

  bool type(const TypeRef& p, const TypeRef& t) {
    if (const TVar* v = asTVar(p); v && isParam(v->name)) {
      auto it = bound.find(v->name);
      if (it != bound.end()) return equal(it->second, t);
      bound[v->name] = t;
      return true;
    }
    if (p->node.index() != t->node.index()) return false;
    if (const TVar* v = asTVar(p)) return v->name == asTVar(t)->name;
    const Capt& cp = *asCapt(p);
    const Capt& ct = *asCapt(t);
    return cp.captures == ct.captures && pre(cp.pre, ct.pre);
  }

  bool pre(const PretypeRef& p, const PretypeRef& t) {
    if (p->node.index() != t->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const Fun& a) {
              const auto& b = std::get<Fun>(t->node);
              return a.param == b.param && type(a.paramType, b.paramType) &&
                     type(a.result, b.result);
            },
            [&](const TFun& a) {
              const auto& b = std::get<TFun>(t->node);
              if (a.tparam != b.tparam || !type(a.bound, b.bound)) return false;
              localTypes.push_back(a.tparam);
              bool ok = type(a.result, b.result);
              localTypes.pop_back();
              return ok;
            },
            [&](const ReturnCap& a) { return type(a.answer, std::get<ReturnCap>(t->node).answer); },
            [&](const Ptr& a) { return type(a.pointee, std::get<Ptr>(t->node).pointee); },
            [&](const Eff& a) {
              const auto& b = std::get<Eff>(t->node);
              return type(a.arg, b.arg) && type(a.res, b.res);
            },
            [](const auto&) { return true; },
        },
        p->node);
  }
};

class Printer {
 public:
  explicit Printer(const PrintOptions& opts) : opts_(opts) {}

  std::string type(const TypeRef& t) {
    if (auto folded = foldType(t)) return *folded;
    if (const TVar* v = asTVar(t)) return v->name;
    const Capt& c = *asCapt(t);
    return printCaptureSet(c.captures) + " " + pretype(c.pre);
  }

  std::string pretype(const PretypeRef& u) {
    if (auto folded = foldPretype(u)) return *folded;
    return std::visit(
        overloaded{
            [](const Top&) { return std::string("Top"); },
            [](const Bottom&) { return std::string("Bot"); },
            [&](const Fun& f) {
              return "forall(" + f.param + ": " + type(f.paramType) + ") " + type(f.result);
            },
            [&](const TFun& f) {
              return "forall[" + f.tparam + " <: " + type(f.bound) + "] " + type(f.result);
            },
            [&](const ReturnCap& r) { return "Return[" + type(r.answer) + "]"; },
            [](const RegionCap&) { return std::string("Region"); },
            [&](const Ptr& p) { return "Ptr[" + type(p.pointee) + "]"; },
            [&](const Eff& e) { return "Eff[" + type(e.arg) + ", " + type(e.res) + "]"; },
        },
        u->node);
  }

  // Levels: 0 anywhere, 1 head of an application, 2 argument.
  std::string term(const TermRef& t, int level) {
    auto greedy = [&](std::string s) { return level > 0 ? "(" + s + ")" : s; };
    return std::visit(
        overloaded{
            [&](const Var& v) { return v.name; },
            [&](const Abs& a) {
              return greedy("\\(" + a.param + ": " + type(a.paramType) + ") " + term(a.body, 0));
            },
            [&](const TAbs& a) {
              return greedy("/\\[" + a.tparam + " <: " + type(a.bound) + "] " + term(a.body, 0));
            },
            [&](const App& a) {
              std::string s = term(a.fn, 1) + " " + term(a.arg, 2);
              return level > 1 ? "(" + s + ")" : s;
            },
            [&](const TApp& a) {
              std::string s = term(a.fn, 1) + " [" + type(a.typeArg) + "]";
              return level > 1 ? "(" + s + ")" : s;
            },
            [&](const Handle& h) {
              return greedy("handle " + h.cap + " : " + type(h.answerType) + " in " +
                            term(h.body, 0));
            },
            [&](const DoReturn& r) {
              return greedy("return " + term(r.cap, 3) + " " + term(r.value, 0));
            },
            [&](const RegionBlock& r) {
              return greedy("region " + r.handle + " in " + term(r.body, 0));
            },
            [&](const New& n) {
              return greedy("new " + n.handle + " [" + type(n.elemType) + "] " + term(n.init, 0));
            },
            [&](const Deref& d) { return "!" + term(d.target, 3); },
            [&](const HandleEff& h) {
              bool wrap = !termAs<Var>(h.handlerBody) && !termAs<App>(h.handlerBody) &&
                          !termAs<TApp>(h.handlerBody) && !termAs<Deref>(h.handlerBody);
              std::string s = term(h.handlerBody, 0);
              if (wrap) s = "(" + s + ")";
              return greedy("handle " + h.cap + " : " + type(h.effType) + " = handler(" +
                            h.hParam + ", " + h.hKont + ") => " + s + " in " + term(h.body, 0));
            },
            [&](const DoEff& d) { return greedy("do " + d.cap + " " + term(d.arg, 0)); },
            [&](const PtrVal& p) {
              return "ptr#" + std::to_string(p.location) + "@" + p.region;
            },
        },
        t->node);
  }

 private:
  std::optional<std::string> applied(const Alias& a, const std::map<Name, TypeRef>& bound) {
    std::string s = a.name;
    if (a.params.empty()) return s;
    s += "[";
    for (std::size_t i = 0; i < a.params.size(); ++i) {
      auto it = bound.find(a.params[i]);
      if (it == bound.end()) return std::nullopt;
      if (i) s += ", ";
      s += type(it->second);
    }
    return s + "]";
  }

  std::optional<std::string> foldType(const TypeRef& t) {
    if (!opts_.aliases || asTVar(t)) return std::nullopt;
    for (auto it = opts_.aliases->rbegin(); it != opts_.aliases->rend(); ++it) {
      if (it->isPretype()) continue;
      AliasMatcher m{it->params, {}, {}};
      if (m.type(it->type, t))
        if (auto s = applied(*it, m.bound)) return s;
    }
    return std::nullopt;
  }

  std::optional<std::string> foldPretype(const PretypeRef& u) {
    if (!opts_.aliases) return std::nullopt;
    for (auto it = opts_.aliases->rbegin(); it != opts_.aliases->rend(); ++it) {
      if (!it->isPretype()) continue;
      AliasMatcher m{it->params, {}, {}};
      if (m.pre(it->pretype, u))
        if (auto s = applied(*it, m.bound)) return s;
    }
    return std::nullopt;
  }

  const PrintOptions& opts_;
};

}  // namespace

std::string printCaptureSet(const CaptureSet& c) {
  if (c.isUniversal()) return "{*}";
  std::string s = "{";
  bool first = true;
  for (const auto& x : c.vars()) {
    if (!first) s += ", ";
    s += x;
    first = false;
  }
  return s + "}";
}

std::string printType(const TypeRef& t, const PrintOptions& opts) { return Printer(opts).type(t); }
std::string printPretype(const PretypeRef& u, const PrintOptions& opts) {
  return Printer(opts).pretype(u);
}
std::string printTerm(const TermRef& t, const PrintOptions& opts) {
  return Printer(opts).term(t, 0);
}

SourceProgram parseProgram(const std::string& source, Extensions ext) {
  Extensions fromPragma = pragmaExtensions(source);
  ext.returns |= fromPragma.returns;
  ext.regions |= fromPragma.regions;
  ext.effects |= fromPragma.effects;
  Parser p(lex(source), ext);
  return p.program();
}

TypeRef parseType(const std::string& source, Extensions ext, const std::vector<Alias>* aliases) {
  Parser p(lex(source), ext, aliases ? *aliases : std::vector<Alias>{});
  return p.wholeType();
}

TermRef parseTerm(const std::string& source, Extensions ext, const std::vector<Alias>* aliases) {
  Parser p(lex(source), ext, aliases ? *aliases : std::vector<Alias>{});
  return p.wholeTerm();
}

std::string printProgram(const SourceProgram& p) {
  std::string out;
  if (p.extensions.any()) out += "#ext " + p.extensions.str() + "\n";
  for (const auto& d : p.decls) {
    std::vector<Alias> visible;
    switch (d.kind) {
      case Declaration::Kind::Alias: {
        const Alias& a = p.aliases[d.aliasIndex];
        visible.assign(p.aliases.begin(), p.aliases.begin() + static_cast<long>(d.aliasIndex));
        PrintOptions opts{&visible};
        out += "alias " + a.name;
        if (!a.params.empty()) {
          out += "[";
          for (std::size_t i = 0; i < a.params.size(); ++i) out += (i ? ", " : "") + a.params[i];
          out += "]";
        }
        out += " = " + (a.isPretype() ? printPretype(a.pretype, opts) : printType(a.type, opts));
        out += "\n";
        continue;
      }
      default:
        break;
    }
    // Later declarations see every alias declared so far.
    std::size_t count = 0;
    for (const auto& e : p.decls) {
      if (&e == &d) break;
      if (e.kind == Declaration::Kind::Alias) ++count;
    }
    visible.assign(p.aliases.begin(), p.aliases.begin() + static_cast<long>(count));
    PrintOptions opts{&visible};
    switch (d.kind) {
      case Declaration::Kind::AssumeTerm:
        out += "assume " + d.name + " : " + printType(d.type, opts) + "\n";
        break;
      case Declaration::Kind::AssumeType:
        out += "assume " + d.name + " <: " + printType(d.type, opts) + "\n";
        break;
      case Declaration::Kind::Def:
        out += "def " + d.name;
        if (d.type) out += " : " + printType(d.type, opts);
        out += " = " + printTerm(d.term, opts) + "\n";
        break;
      case Declaration::Kind::Main:
        out += "main " + printTerm(d.term, opts) + "\n";
        break;
      case Declaration::Kind::Alias:
        break;
    }
  }
  return out;
}

}  // namespace cctrack
