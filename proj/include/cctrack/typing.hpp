#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "cctrack/ast.hpp"
#include "cctrack/capture.hpp"
#include "cctrack/diagnostics.hpp"
#include "cctrack/extensions.hpp"

namespace cctrack {

/// How often each typing rule fired. Keys are rule names such as "app" or "handle-eff".
struct TypingStats {
  std::map<std::string, std::size_t> rules;
  SubcaptureStats subcapture;
};

class Typer {
 public:
  explicit Typer(Extensions ext = Extensions::all(), TypingStats* stats = nullptr,
                 std::size_t maxDepth = 512)
      : ext_(ext), stats_(stats), maxDepth_(maxDepth) {}

  /// Synthesizes the type of t. Throws TypeError.
  TypeRef synth(const Context& gamma, const TermRef& t);
  /// Synthesizes and checks the result against `expected` by subsumption. Handlers,
  /// regions and applications fall back to using `expected` as their answer type.
  void check(const Context& gamma, const TermRef& t, const TypeRef& expected);
  /// Subtyping that raises a depth error instead of silently answering false.
  bool subtype(const Context& gamma, const TypeRef& a, const TypeRef& b);

 private:
  TypeRef synthInner(const Context& gamma, const TermRef& t);
  TypeRef regionRule(const Context& gamma, const RegionBlock& r, const TermRef& t,
                     const TypeRef* expected);
  TypeRef handleEffRule(const Context& gamma, const HandleEff& h, const TermRef& t,
                        const TypeRef* expected);
  bool checkAgainst(const Context& gamma, const TermRef& t, const TypeRef& expected);
  void need(bool enabled, const char* construct, const TermRef& t) const;
  void count(const char* rule);

  Extensions ext_;
  TypingStats* stats_;
  std::size_t maxDepth_;
};

TypeRef synth(const Context& gamma, const TermRef& t, Extensions ext = Extensions::all());
void check(const Context& gamma, const TermRef& t, const TypeRef& expected,
           Extensions ext = Extensions::all());

/// Removes from every capture set the variables that subcapture {}. Binders are
/// entered so locally bound pure parameters are dropped too.
TypeRef dropPureVariables(const Context& gamma, const TypeRef& t);

}  // namespace cctrack
