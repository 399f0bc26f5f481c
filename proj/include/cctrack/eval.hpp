#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cctrack/ast.hpp"
#include "cctrack/extensions.hpp"

namespace cctrack {

enum class StuckReason { UnhandledEffect, DanglingDeref, UnboundCapability, NoRule };
const char* stuckName(StuckReason r);

struct RegionFrame {
  Name region;
  bool live = true;
  std::map<std::size_t, TermRef> cells;
};

struct MachineState {
  TermRef term;
  std::vector<RegionFrame> store;
  std::size_t nextLocation = 0;
  std::size_t steps = 0;
};

/// Reported once per step: rule name, the contracted redex and its replacement.
using StepObserver =
    std::function<void(const std::string& rule, const TermRef& redex, const TermRef& contractum)>;

struct EvalOptions {
  Extensions ext = Extensions::all();
  StepObserver observer;
  /// Test-only fault injection: beta-v skips the capture-set substitution.
  bool mutateSkipCaptureSubst = false;
};

struct StepResult {
  enum class Kind { Stepped, Done, Stuck };
  Kind kind = Kind::Done;
  MachineState state;
  std::string rule;
  StuckReason reason = StuckReason::NoRule;
  std::string detail;
};

bool isValue(const TermRef& t, Extensions ext);

StepResult step(const MachineState& s, const EvalOptions& opts = {});

struct EvalOutcome {
  enum class Kind { Done, Stuck, OutOfFuel };
  Kind kind = Kind::Done;
  MachineState final;
  StuckReason reason = StuckReason::NoRule;
  std::string detail;
};

/// Steps until a value, a stuck state or the fuel runs out. `onStep` sees every new state.
EvalOutcome evaluate(const TermRef& t, std::size_t fuel, const EvalOptions& opts = {},
                     const std::function<void(const MachineState&)>& onStep = {});

/// Default step budget; CCTRACK_FUEL overrides it.
std::size_t defaultFuel();

/// Counts the ways t splits into an evaluation context around a primitive redex.
/// Written independently of step; a non-value should have exactly one.
std::size_t decompositions(const TermRef& t, Extensions ext);

}  // namespace cctrack
