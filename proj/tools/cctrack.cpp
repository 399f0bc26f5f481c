#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cctrack/eval.hpp"
#include "cctrack/fsub.hpp"
#include "cctrack/harness.hpp"
#include "cctrack/program.hpp"
#include "cctrack/syntax.hpp"
#include "cctrack/typing.hpp"

using namespace cctrack;
using nlohmann::json;

namespace {

constexpr int kUsage = 64;

bool readFile(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Loads and parses a source file. Returns an exit code on failure.
std::optional<int> load(const std::string& path, const std::string& extList, bool asJson,
                        SourceProgram& out) {
  Extensions ext;
  std::string bad;
  if (!extList.empty() && !Extensions::parse(extList, ext, &bad)) {
    std::cerr << "cctrack: unknown extension '" << bad << "'\n";
    return kUsage;
  }
  std::string src;
  if (!readFile(path, src)) {
    std::cerr << "cctrack: cannot read " << path << "\n";
    return kUsage;
  }
  try {
    out = parseProgram(src, ext);
  } catch (const ParseError& e) {
    if (asJson)
      std::cout << parseErrorJson(e) << "\n";
    else
      std::cerr << path << ":" << e.span.line << ":" << e.span.column << ": parse: " << e.what()
                << "\n";
    return 1;
  }
  return std::nullopt;
}

int runCheck(const std::string& path, const std::string& extList, bool asJson) {
  SourceProgram p;
  if (auto rc = load(path, extList, asJson, p)) return *rc;
  CheckReport r = checkProgram(p);
  if (asJson) {
    std::cout << checkReportJson(r, p) << "\n";
    return r.ok ? 0 : 1;
  }
  for (const auto& d : r.defs) std::cout << d.name << " : " << renderType(d.type, p) << "\n";
  if (!r.ok) {
    std::cerr << path << ":" << describe(*r.error, p) << "\n";
    return 1;
  }
  if (r.mainType) std::cout << renderType(*r.mainType, p) << "\n";
  return 0;
}

int runEval(const std::string& path, const std::string& extList, bool trace,
            std::optional<std::size_t> maxSteps, bool checkEach, bool asJson) {
  SourceProgram p;
  if (auto rc = load(path, extList, asJson, p)) return *rc;
  Elaborated e;
  try {
    e = elaborate(p);
  } catch (const TypeError& err) {
    std::cerr << path << ":" << describe(err, p) << "\n";
    return 1;
  }
  if (!e.main) {
    std::cerr << "cctrack: " << path << " has no main term\n";
    return kUsage;
  }
  Extensions ext = p.extensions;
  TypeRef mainType;
  if (checkEach) {
    CheckReport r = checkProgram(p);
    if (!r.ok) {
      std::cerr << path << ":" << describe(*r.error, p) << "\n";
      return 1;
    }
    mainType = *r.mainType;
  }

  EvalOptions opts;
  opts.ext = ext;
  json steps = json::array();
  std::string preservation;
  auto onStep = [&](const MachineState& s) {
    std::string printed = renderTerm(s.term, p);
    if (trace) {
      if (asJson)
        steps.push_back({{"step", s.steps}, {"term", printed}});
      else
        std::cout << "step " << s.steps << ": " << printed << "\n";
    }
    if (checkEach && preservation.empty()) {
      try {
        cctrack::check(e.gamma, s.term, mainType, ext);
      } catch (const TypeError& err) {
        preservation = "step " + std::to_string(s.steps) + ": " + err.what();
      }
    }
  };
  std::size_t fuel = maxSteps ? *maxSteps : defaultFuel();
  EvalOutcome out = evaluate(*e.main, fuel, opts, onStep);

  int rc = 0;
  json j;
  j["steps"] = out.final.steps;
  switch (out.kind) {
    case EvalOutcome::Kind::Done:
      j["outcome"] = "done";
      j["value"] = renderTerm(out.final.term, p);
      break;
    case EvalOutcome::Kind::Stuck:
      j["outcome"] = "stuck";
      j["reason"] = stuckName(out.reason);
      j["detail"] = out.detail;
      j["term"] = renderTerm(out.final.term, p);
      rc = 2;
      break;
    case EvalOutcome::Kind::OutOfFuel:
      j["outcome"] = "out-of-fuel";
      j["term"] = renderTerm(out.final.term, p);
      rc = 3;
      break;
  }
  if (checkEach) j["preservation"] = preservation.empty() ? json(nullptr) : json(preservation);
  if (asJson) {
    if (trace) j["trace"] = steps;
    std::cout << j.dump(2) << "\n";
  } else {
    switch (out.kind) {
      case EvalOutcome::Kind::Done:
        std::cout << "Done after " << out.final.steps << " steps: " << j["value"].get<std::string>()
                  << "\n";
        break;
      case EvalOutcome::Kind::Stuck:
        std::cout << "Stuck (" << stuckName(out.reason) << ") after " << out.final.steps
                  << " steps: " << out.detail << "\n";
        break;
      case EvalOutcome::Kind::OutOfFuel:
        std::cout << "OutOfFuel after " << out.final.steps << " steps\n";
        break;
    }
    if (!preservation.empty()) std::cout << "preservation failed at " << preservation << "\n";
  }
  if (rc == 0 && !preservation.empty()) rc = 1;
  return rc;
}

int runErase(const std::string& path, const std::string& extList) {
  SourceProgram p;
  if (auto rc = load(path, extList, false, p)) return *rc;
  try {
    Elaborated e = elaborate(p);
    if (!e.main) {
      std::cerr << "cctrack: " << path << " has no main term\n";
      return kUsage;
    }
    fsub::Term t = fsub::eraseTerm(*e.main);
    fsub::Type ty = fsub::check(fsub::eraseContext(e.gamma), t);
    std::cout << fsub::print(t) << "\n" << fsub::print(ty) << "\n";
  } catch (const fsub::Unsupported& err) {
    std::cerr << path << ": erase: " << err.what() << "\n";
    return 1;
  } catch (const fsub::Error& err) {
    std::cerr << path << ": F<: type error: " << err.what() << "\n";
    return 1;
  } catch (const TypeError& err) {
    std::cerr << path << ":" << describe(err, p) << "\n";
    return 1;
  }
  return 0;
}

int runFuzz(harness::FuzzOptions opts, const std::string& extList, bool asJson) {
  std::string bad;
  if (!extList.empty() && !Extensions::parse(extList, opts.ext, &bad)) {
    std::cerr << "cctrack: unknown extension '" << bad << "'\n";
    return kUsage;
  }
  for (const auto& s : opts.only) {
    auto names = harness::suiteNames();
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      std::cerr << "cctrack: unknown suite '" << s << "'\n";
      return kUsage;
    }
  }
  harness::FuzzReport r = harness::runFuzz(opts);
  if (asJson) {
    json j;
    j["ok"] = r.ok();
    j["seed"] = opts.seed;
    j["suites"] = json::array();
    for (const auto& s : r.suites) {
      json sj{{"name", s.name}, {"samples", s.samples}, {"failures", s.failures},
              {"tallies", s.tallies}};
      if (s.first) sj["clause"] = s.first->clause;
      j["suites"].push_back(sj);
    }
    j["coverage"] = r.coverage;
    j["counterexamples"] = r.crashFiles;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& s : r.suites) {
      std::cout << s.name << ": " << s.samples << " samples, " << s.failures << " failures";
      if (s.first) std::cout << " (" << s.first->clause << ")";
      std::cout << "\n";
    }
    std::cout << "coverage:";
    for (const auto& [rule, n] : r.coverage) std::cout << " " << rule << "=" << n;
    std::cout << "\n";
    for (const auto& f : r.crashFiles) std::cout << "counterexample written to " << f << "\n";
  }
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capture-tracking calculus checker and evaluator", "cctrack"};
  app.require_subcommand(1);

  std::string file, extList;
  bool asJson = false;

  auto* check = app.add_subcommand("check", "Type check a program");
  check->add_option("file", file, "Source file")->required();
  check->add_option("--ext", extList, "Extensions: returns,regions,effects");
  check->add_flag("--json", asJson, "Machine-readable output");

  bool trace = false, checkEach = false;
  std::optional<std::size_t> maxSteps;
  auto* eval = app.add_subcommand("eval", "Evaluate a program");
  eval->add_option("file", file, "Source file")->required();
  eval->add_option("--ext", extList, "Extensions: returns,regions,effects");
  eval->add_flag("--trace", trace, "Print every intermediate term");
  eval->add_option("--max-steps", maxSteps, "Step budget");
  eval->add_flag("--check-each-step", checkEach, "Re-check the main type after every step");
  eval->add_flag("--json", asJson, "Machine-readable output");

  auto* erase = app.add_subcommand("erase", "Print the F<: erasure of main and its type");
  erase->add_option("file", file, "Source file")->required();
  erase->add_option("--ext", extList, "Extensions: returns,regions,effects");

  harness::FuzzOptions fo;
  auto* fuzz = app.add_subcommand("fuzz", "Run the metatheory property suites");
  fuzz->add_option("--seed", fo.seed, "Seed");
  fuzz->add_option("--count", fo.count, "Samples per suite");
  fuzz->add_option("--max-depth", fo.maxDepth, "Generator depth")->check(CLI::PositiveNumber);
  fuzz->add_option("--ext", extList, "Extensions: returns,regions,effects");
  fuzz->add_option("--fuel", fo.fuel, "Step budget per generated program");
  fuzz->add_option("--crash-dir", fo.crashDir, "Directory for counterexample files");
  fuzz->add_option("--suite", fo.only, "Run only the named suites");
  fuzz->add_flag("--mutate-evaluator", fo.mutateEvaluator,
                 "Inject an evaluator fault to exercise the harness");
  fuzz->add_flag("--json", asJson, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (check->parsed()) return runCheck(file, extList, asJson);
  if (eval->parsed()) return runEval(file, extList, trace, maxSteps, checkEach, asJson);
  if (erase->parsed()) return runErase(file, extList);
  if (fuzz->parsed()) return runFuzz(fo, extList, asJson);
  return kUsage;
}
