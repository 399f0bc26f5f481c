#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cctrack/ast.hpp"
#include "cctrack/eval.hpp"
#include "cctrack/extensions.hpp"
#include "cctrack/typing.hpp"

namespace cctrack::harness {

struct Generated {
  Context gamma;
  TermRef term;
  TypeRef type;
  Extensions ext;
};

/// Builds terms from their typing rules, so every output is accepted by synth.
class Generator {
 public:
  Generator(std::uint64_t seed, std::size_t maxDepth, Extensions ext);

  /// A closed program. Returns a smaller term when the budget runs out.
  Generated program();
  /// A program under a random context of term and type variables.
  Generated openProgram();
  /// A random well-formed context.
  Context context();
  /// A type well formed under gamma.
  TypeRef type(const Context& gamma, std::size_t depth);
  /// A capture set over the term variables of gamma, sometimes {*}.
  CaptureSet captureSet(const Context& gamma);

  /// Typing-rule counts over every accepted output, plus "sc-var" for subcapture dereferences.
  const std::map<std::string, std::size_t>& coverage() const { return coverage_; }

  std::mt19937_64& rng() { return rng_; }

 private:
  struct Scope;
  TermRef ofType(Scope& s, const TypeRef& target, std::size_t depth);
  TermRef anyTerm(Scope& s, std::size_t depth);
  TermRef function(Scope& s, std::size_t depth);
  TermRef tryVar(Scope& s, const TypeRef& target);
  TermRef effectful(Scope& s, const TypeRef& target, std::size_t depth);
  TypeRef simpleType(const Context& gamma, std::size_t depth, const NameSet& allowed);
  Generated finish(const Context& gamma, const TermRef& t, const TypeRef& target);
  std::size_t pick(std::size_t n);
  bool coin(double p);

  std::mt19937_64 rng_;
  std::size_t maxDepth_;
  Extensions ext_;
  std::map<std::string, std::size_t> coverage_;
  std::size_t fresh_ = 0;
};

/// One failed property instance, already shrunk.
struct Violation {
  std::string property;
  std::string clause;
  std::uint64_t seed = 0;
  Context gamma;
  TermRef term;
  Extensions ext;
};

struct SoundnessReport {
  bool ok = true;
  EvalOutcome::Kind outcome = EvalOutcome::Kind::Done;
  StuckReason reason = StuckReason::NoRule;
  std::size_t steps = 0;
  /// Which assertion failed: "preservation", "progress" or "capture-prediction".
  std::string failed;
  std::string detail;
};

/// Runs t and asserts preservation after every step, progress when gamma holds only term
/// variables, and capture prediction on the final value.
SoundnessReport checkSoundnessRun(const Context& gamma, const TermRef& t, const TypeRef& type,
                                  std::size_t fuel, const EvalOptions& opts);

/// Greedy shrinking: repeatedly replaces t by a smaller subterm or a simplified node while
/// `stillFails` holds and the candidate still typechecks.
TermRef shrink(const Context& gamma, const TermRef& t, Extensions ext,
               const std::function<bool(const TermRef&)>& stillFails);

/// Source text reproducing a violation, with the context as assume declarations.
std::string counterexampleSource(const Violation& v);

struct SuiteResult {
  SuiteResult() = default;
  explicit SuiteResult(std::string n) : name(std::move(n)) {}

  std::string name;
  std::size_t samples = 0;
  std::size_t failures = 0;
  std::optional<Violation> first;
  /// Suite-specific tallies, e.g. "done", "stuck:dangling-deref".
  std::map<std::string, std::size_t> tallies;
};

struct FuzzOptions {
  std::uint64_t seed = 1;
  std::size_t count = 10000;
  std::size_t maxDepth = 4;
  Extensions ext = Extensions::none();
  std::size_t fuel = 2000;
  /// Directory for counterexample files; empty disables writing.
  std::string crashDir;
  /// Evaluator fault injection, used to check the harness catches it.
  bool mutateEvaluator = false;
  /// Suite names to run; empty runs all.
  std::vector<std::string> only;
};

struct FuzzReport {
  std::vector<SuiteResult> suites;
  std::map<std::string, std::size_t> coverage;
  std::vector<std::string> crashFiles;
  bool ok() const;
  const SuiteResult* suite(const std::string& name) const;
};

/// Names of every suite runFuzz knows.
std::vector<std::string> suiteNames();

FuzzReport runFuzz(const FuzzOptions& opts);

}  // namespace cctrack::harness
