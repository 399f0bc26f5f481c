// One line per acceptance criterion. Exit status is 0 only when every line passes.
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cctrack/capture.hpp"
#include "cctrack/harness.hpp"
#include "cctrack/program.hpp"
#include "cctrack/subtype.hpp"
#include "cctrack/syntax.hpp"
#include "cctrack/typing.hpp"

using namespace cctrack;
using nlohmann::json;

namespace {

struct Cli {
  int status = -1;
  std::string out;
};

Cli cli(const std::string& args) {
  Cli r;
  std::string cmd = std::string(CCTRACK_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string corpus(const std::string& name) { return std::string(CCTRACK_CORPUS_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Line {
  bool ok = true;
  std::string note;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!note.empty()) note += "; ";
      note += what;
    }
  }
};

int failures = 0;

void report(int n, const std::string& title, const Line& l, const std::string& detail = "") {
  if (!l.ok) ++failures;
  std::cout << (l.ok ? "PASS " : "FAIL ") << n << " " << title;
  if (!l.ok)
    std::cout << ": " << l.note;
  else if (!detail.empty())
    std::cout << ": " << detail;
  std::cout << std::endl;
}

// ------------------------------------------------------------------ schema subset
// Enough of JSON Schema for the shipped document: type, enum, required, properties,
// additionalProperties, items, oneOf, minLength, minimum.

bool hasType(const json& v, const std::string& t) {
  if (t == "null") return v.is_null();
  if (t == "boolean") return v.is_boolean();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  if (t == "string") return v.is_string();
  if (t == "array") return v.is_array();
  if (t == "object") return v.is_object();
  return false;
}

bool validate(const json& v, const json& s, const std::string& at, std::string& why) {
  auto bad = [&](const std::string& m) {
    why = at + ": " + m;
    return false;
  };
  if (s.contains("type")) {
    bool any = false;
    if (s["type"].is_array()) {
      for (const auto& t : s["type"]) any = any || hasType(v, t.get<std::string>());
    } else {
      any = hasType(v, s["type"].get<std::string>());
    }
    if (!any) return bad("wrong type");
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == v;
    if (!found) return bad("not in enum");
  }
  if (s.contains("minLength") && v.is_string() && v.get<std::string>().size() < s["minLength"])
    return bad("too short");
  if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>())
    return bad("below minimum");
  if (s.contains("oneOf")) {
    int matched = 0;
    std::string ignored;
    for (const auto& alt : s["oneOf"]) matched += validate(v, alt, at, ignored) ? 1 : 0;
    if (matched != 1) return bad("oneOf matched " + std::to_string(matched));
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& k : s["required"])
        if (!v.contains(k.get<std::string>())) return bad("missing " + k.get<std::string>());
    for (const auto& [k, val] : v.items()) {
      if (s.contains("properties") && s["properties"].contains(k)) {
        if (!validate(val, s["properties"][k], at + "." + k, why)) return false;
      } else if (s.value("additionalProperties", true) == false) {
        return bad("unexpected " + k);
      }
    }
  }
  if (v.is_array() && s.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!validate(v[i], s["items"], at + "[" + std::to_string(i) + "]", why)) return false;
  }
  return true;
}

// ------------------------------------------------------------------ criteria

std::map<std::string, std::string> defLines(const std::string& out, std::string* last) {
  std::map<std::string, std::string> defs;
  for (const auto& l : lines(out)) {
    auto pos = l.find(" : ");
    if (pos != std::string::npos) defs[l.substr(0, pos)] = l.substr(pos + 3);
    else if (last) *last = l;
  }
  return defs;
}

void goldenTypings() {
  Line l;
  Cli r = cli("check " + corpus("logger.cc"));
  l.require(r.status == 0, "logger.cc not accepted");
  std::string mainType;
  auto defs = defLines(r.out, &mainType);
  const std::map<std::string, std::string> want = {
      {"fileLogger", "{File} Logger"},
      {"printLogger", "{Console} Logger"},
      {"pureLogger", "{} Logger"},
      {"warn", "{} forall(log: {*} Logger) {log} Logger"},
      {"someLogger", "{File} Logger"},
  };
  for (const auto& [name, type] : want)
    l.require(defs[name] == type, name + " printed as '" + defs[name] + "'");
  l.require(mainType == "{Console} Logger", "warn printLogger printed as '" + mainType + "'");
  report(1, "golden typings", l, "6 logger types match");
}

void goldenRejections() {
  Line l;
  struct Case {
    const char* file;
    const char* kind;
    const char* rule;  // empty: not an escape
    const char* variable;
  };
  for (const Case& c : {Case{"f_rejected.cc", "polarity", "", "x"},
                        Case{"escape_return.cc", "escape", "return-escape", "r"},
                        Case{"effects_escape.cc", "escape", "handle-result-escape", "x"},
                        Case{"effects_thunk.cc", "escape", "handle-argument-escape", "x"}}) {
    Cli r = cli("check --json " + corpus(c.file));
    json j = json::parse(r.out, nullptr, false);
    if (r.status != 1 || j.is_discarded() || j["ok"] != false) {
      l.require(false, std::string(c.file) + " not rejected");
      continue;
    }
    const json& e = j["error"];
    l.require(e["kind"] == c.kind, std::string(c.file) + " kind " + e["kind"].dump());
    if (*c.rule) l.require(e["rule"] == c.rule, std::string(c.file) + " rule " + e["rule"].dump());
    l.require(e["variable"] == c.variable,
              std::string(c.file) + " names " + e["variable"].dump());
  }
  report(2, "golden rejections", l,
         "f polarity, return escape names r, handler result and argument escapes");
}

void goldenAcceptances() {
  Line l;
  Cli r = cli("check " + corpus("fg.cc"));
  l.require(r.status == 0, "fg.cc not accepted");
  auto defs = defLines(r.out, nullptr);
  l.require(defs.count("f'") == 1, "f' has no type");
  l.require(defs["g"] == "{} forall(x: {*} U) {x} U", "g printed as '" + defs["g"] + "'");
  report(3, "golden acceptances", l, "g : " + defs["g"]);
}

void listTypes() {
  Line l;
  SourceProgram p = parseProgram(slurp(corpus("list.cc")));
  CheckReport rep = checkProgram(p);
  l.require(rep.ok, "list.cc rejected");
  std::map<std::string, TypeRef> got;
  for (const auto& d : rep.defs) got[d.name] = d.type;
  auto parse = [&](const std::string& s) { return parseType(s, Extensions::none(), &p.aliases); };
  // The printed signatures leave pure capture sets empty; sc-var makes {xs} and {} equivalent
  // when xs is pure, so the synthesized type is compared after dropping pure variables and also
  // by mutual subtyping.
  const std::map<std::string, std::string> printed = {
      {"map",
       "{} forall[A <: {} Top] {} forall[B <: {} Top] {} forall(xs: List[A]) {} forall(f: {*} "
       "forall(a: A) B) List[B]"},
      {"map2",
       "{} forall[A <: {} Top] {} forall[B <: {} Top] {} forall(f: {*} forall(a: A) B) {f} "
       "forall(xs: List[A]) List[B]"},
      {"pureMap",
       "{} forall[A <: {} Top] {} forall[B <: {} Top] {} forall(xs: List[A]) {} forall(f: {} "
       "forall(a: A) B) List[B]"},
      // nil and cons have no printed signature; these are the types their derivations give.
      {"nil", "{} forall[T <: {*} Top] List[T]"},
      {"cons",
       "{} forall[T <: {*} Top] {} forall(hd: T) {hd} forall(tl: List[T]) {hd} forall[C <: "
       "{*} Top] {hd} forall(g: Op[T, C]) {g, hd} forall(s: C) C"},
  };
  Context empty;
  for (const auto& [name, text] : printed) {
    if (!got.count(name)) {
      l.require(false, name + " missing");
      continue;
    }
    TypeRef want = parse(text);
    TypeRef have = got[name];
    if (name == "nil") {
      // nil's body captures nothing, so it sits below the list type.
      l.require(subtype(empty, have, want), "nil not a List[T]");
      continue;
    }
    l.require(alphaEqual(dropPureVariables(empty, have), want),
              name + " is " + renderType(have, p));
    l.require(subtype(empty, have, want) && subtype(empty, want, have),
              name + " not equivalent");
  }
  report(4, "list encodings", l, "nil cons map map2 pureMap");
}

void subcaptureExamples() {
  Line l;
  auto ctx = [](const std::string& src) {
    return elaborate(parseProgram(src, Extensions::all())).gamma;
  };
  auto cs = [](const std::string& s) { return asCapt(parseType(s + " Top"))->captures; };
  Context logger = ctx("assume y : {*} Top\nassume x : {y} Top");
  l.require(subcapture(logger, cs("{x}"), cs("{y}")), "x:{y} does not give {x} <: {y}");
  l.require(!subcapture(logger, cs("{y}"), cs("{x}")), "{y} <: {x} derived");
  Context pure = ctx("assume x : {} Top");
  l.require(subcapture(pure, cs("{x}"), cs("{}")), "pure x does not drop");
  Context mixed = ctx("assume y : {} Top\nassume x : {*} Top");
  l.require(subcapture(mixed, cs("{x, y}"), cs("{x}")), "{x, y} <: {x} not derived");
  report(5, "subcapture examples", l, "4 of 4");
}

void properties(const harness::FuzzReport& r) {
  Line l;
  std::string counts;
  for (const char* name : {"subcapture-reflexivity", "subcapture-transitivity", "subcapture-subset",
                           "monotone-substitution", "preservation", "progress",
                           "capture-prediction", "erasure", "embedding-empty",
                           "embedding-universal"}) {
    const harness::SuiteResult* s = r.suite(name);
    if (!s) {
      l.require(false, std::string(name) + " did not run");
      continue;
    }
    l.require(s->samples >= 10000, std::string(name) + " ran " + std::to_string(s->samples));
    l.require(s->failures == 0,
              std::string(name) + " failed " + std::to_string(s->failures) +
                  (s->first ? " (" + s->first->clause + ")" : ""));
    if (!counts.empty()) counts += ", ";
    counts += std::string(name) + " " + std::to_string(s->samples);
  }
  report(6, "property suites", l, counts + " samples, 0 failures");
}

void determinism(const harness::FuzzReport& r) {
  Line l;
  const harness::SuiteResult* det = r.suite("determinism");
  const harness::SuiteResult* res = r.suite("beta-v-residual");
  l.require(det && det->samples >= 10000 && det->failures == 0, "determinism suite");
  l.require(res && res->samples >= 10000 && res->failures == 0, "beta-v residual suite");
  report(7, "evaluator determinism", l,
         det ? std::to_string(det->samples) + " non-value states, 1 decomposition each" : "");
}

void regionSafety(const harness::FuzzReport& r) {
  Line l;
  const harness::SuiteResult* rs = r.suite("region-safety");
  std::size_t dangling = 0, regions = 0;
  if (rs) {
    auto it = rs->tallies.find("stuck:dangling-deref");
    if (it != rs->tallies.end()) dangling = it->second;
    regions = r.coverage.count("region") ? r.coverage.at("region") : 0;
  }
  l.require(rs && rs->samples > 0 && rs->failures == 0 && dangling == 0,
            "dangling-deref on generated programs: " + std::to_string(dangling));
  l.require(regions > 0, "no region blocks generated");
  Cli typed = cli("check " + corpus("dangling.cc"));
  l.require(typed.status == 1, "hand-written dangling program typechecks");
  Cli ran = cli("eval --json " + corpus("dangling.cc"));
  json j = json::parse(ran.out, nullptr, false);
  l.require(ran.status == 2 && !j.is_discarded() && j["reason"] == "dangling-deref",
            "hand-written dangling program did not report dangling-deref");
  report(8, "region safety", l,
         std::to_string(rs ? rs->samples : 0) + " programs, 0 dangling; bypassed checker gives "
         "dangling-deref");
}

void roundTrip() {
  Line l;
  json schema = json::parse(slurp(CCTRACK_SCHEMA), nullptr, false);
  l.require(!schema.is_discarded(), "schema unreadable");
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(CCTRACK_CORPUS_DIR)) {
    if (entry.path().extension() != ".cc") continue;
    ++files;
    std::string name = entry.path().filename().string();
    SourceProgram a = parseProgram(slurp(entry.path().string()));
    std::string once = printProgram(a);
    SourceProgram b = parseProgram(once);
    bool same = printProgram(b) == once && a.decls.size() == b.decls.size() &&
                a.extensions == b.extensions;
    for (std::size_t i = 0; same && i < a.decls.size(); ++i) {
      if (a.decls[i].term) same = alphaEqual(a.decls[i].term, b.decls[i].term);
      if (same && a.decls[i].type) same = alphaEqual(a.decls[i].type, b.decls[i].type);
    }
    l.require(same, name + " changes under parse and print");

    Cli r = cli("check --json " + entry.path().string());
    json j = json::parse(r.out, nullptr, false);
    std::string why;
    l.require(!j.is_discarded() && validate(j, schema, "$", why), name + " " + why);
    Cli again = cli("check --json " + entry.path().string());
    l.require(again.out == r.out, name + " JSON differs between runs");
  }
  l.require(files >= 10, "corpus has " + std::to_string(files) + " files");
  report(9, "round trip and schema", l, std::to_string(files) + " corpus files");
}

}  // namespace

int main() {
  goldenTypings();
  goldenRejections();
  goldenAcceptances();
  listTypes();
  subcaptureExamples();

  harness::FuzzOptions opts;
  opts.seed = 1;
  opts.count = 10000;
  harness::FuzzReport fuzz = harness::runFuzz(opts);
  properties(fuzz);
  determinism(fuzz);
  regionSafety(fuzz);

  roundTrip();
  return failures == 0 ? 0 : 1;
}
