#include "cctrack/program.hpp"

#include "json.hpp"

#include "cctrack/subtype.hpp"
#include "cctrack/wellformed.hpp"

namespace cctrack {

Elaborated elaborate(const SourceProgram& p) {
  Elaborated out;
  NameSet declared;
  auto fresh = [&](const Name& n, Span sp) {
    if (!declared.insert(n).second) {
      TypeError err(ErrorKind::IllScoped, "name " + n + " is declared twice", sp);
      err.variable = n;
      throw err;
    }
  };
  auto inlineDefs = [&](TermRef t) {
    for (auto it = out.defs.rbegin(); it != out.defs.rend(); ++it)
      if (fv(t).count(it->name)) t = substTerm(t, it->name, it->body);
    return t;
  };
  for (const auto& d : p.decls) {
    switch (d.kind) {
      case Declaration::Kind::AssumeTerm:
        fresh(d.name, d.span);
        out.gamma = out.gamma.extendTerm(d.name, d.type);
        break;
      case Declaration::Kind::AssumeType:
        fresh(d.name, d.span);
        out.gamma = out.gamma.extendType(d.name, d.type);
        break;
      case Declaration::Kind::Def:
        fresh(d.name, d.span);
        out.defs.push_back({d.name, inlineDefs(d.term), d.type, d.span});
        break;
      case Declaration::Kind::Main:
        out.main = inlineDefs(d.term);
        out.mainSpan = d.span;
        break;
      case Declaration::Kind::Alias:
        break;
    }
  }
  return out;
}

CheckReport checkProgram(const SourceProgram& p, TypingStats* stats) {
  CheckReport r;
  Elaborated e;
  try {
    e = elaborate(p);
  } catch (const TypeError& err) {
    r.ok = false;
    r.error = err;
    r.errorDecl = err.variable.value_or("");
    return r;
  }
  // Assumptions first: each must be well-formed in the ones before it.
  Context prefix;
  for (const auto& b : e.gamma.bindings()) {
    try {
      wfTopLevel(prefix, b.type);
    } catch (const TypeError& err) {
      r.ok = false;
      r.error = err;
      r.errorDecl = b.name;
      return r;
    }
    prefix = b.kind == Binding::Kind::Term ? prefix.extendTerm(b.name, b.type)
                                           : prefix.extendType(b.name, b.type);
  }
  Typer typer(p.extensions, stats);
  for (const auto& d : e.defs) {
    try {
      TypeRef t = typer.synth(e.gamma, d.body);
      if (d.ascription) {
        wfTopLevel(e.gamma, d.ascription);
        if (!typer.subtype(e.gamma, t, d.ascription)) {
          TypeError err(ErrorKind::Mismatch, "definition " + d.name + " does not have its declared type",
                        d.span);
          err.expected = d.ascription;
          err.found = t;
          throw err;
        }
        t = d.ascription;
      }
      r.defs.push_back({d.name, t});
    } catch (TypeError& err) {
      if (err.span.line == 0) err.span = d.span;
      r.ok = false;
      r.error = err;
      r.errorDecl = d.name;
      return r;
    }
  }
  if (e.main) {
    try {
      r.mainType = typer.synth(e.gamma, *e.main);
    } catch (TypeError& err) {
      if (err.span.line == 0) err.span = e.mainSpan;
      r.ok = false;
      r.error = err;
      r.errorDecl = "main";
    }
  }
  return r;
}

std::string renderType(const TypeRef& t, const SourceProgram& p) {
  PrintOptions opts{&p.aliases};
  return printType(t, opts);
}

std::string renderTerm(const TermRef& t, const SourceProgram& p) {
  PrintOptions opts{&p.aliases};
  return printTerm(t, opts);
}

namespace {

nlohmann::json spanJson(const Span& s) {
  return {{"line", s.line}, {"column", s.column}, {"endLine", s.endLine},
          {"endColumn", s.endColumn}};
}

}  // namespace

std::string checkReportJson(const CheckReport& r, const SourceProgram& p) {
  nlohmann::json j;
  j["ok"] = r.ok;
  nlohmann::json defs = nlohmann::json::array();
  for (const auto& d : r.defs) defs.push_back({{"name", d.name}, {"type", renderType(d.type, p)}});
  j["defs"] = defs;
  j["type"] = r.mainType ? nlohmann::json(renderType(*r.mainType, p)) : nlohmann::json(nullptr);
  if (r.error) {
    const TypeError& e = *r.error;
    nlohmann::json err;
    err["kind"] = kindName(e.kind);
    err["span"] = spanJson(e.span);
    err["message"] = e.message;
    err["expected"] = e.expected ? nlohmann::json(renderType(*e.expected, p)) : nlohmann::json(nullptr);
    err["found"] = e.found ? nlohmann::json(renderType(*e.found, p)) : nlohmann::json(nullptr);
    err["variable"] = e.variable ? nlohmann::json(*e.variable) : nlohmann::json(nullptr);
    err["rule"] = e.rule.empty() ? nlohmann::json(nullptr) : nlohmann::json(e.rule);
    err["declaration"] = r.errorDecl;
    j["error"] = err;
  } else {
    j["error"] = nullptr;
  }
  return j.dump(2);
}

std::string parseErrorJson(const ParseError& e) {
  nlohmann::json j;
  j["ok"] = false;
  j["defs"] = nlohmann::json::array();
  j["type"] = nullptr;
  j["error"] = {{"kind", "parse"},      {"span", spanJson(e.span)}, {"message", e.what()},
                {"expected", nullptr},  {"found", nullptr},         {"variable", nullptr},
                {"rule", nullptr},      {"declaration", ""}};
  return j.dump(2);
}

std::string describe(const TypeError& e, const SourceProgram& p) {
  std::string s = std::to_string(e.span.line) + ":" + std::to_string(e.span.column) + ": " +
                  kindName(e.kind) + ": " + e.message;
  if (e.expected) s += "\n  expected: " + renderType(*e.expected, p);
  if (e.found) s += "\n  found:    " + renderType(*e.found, p);
  return s;
}

}  // namespace cctrack
