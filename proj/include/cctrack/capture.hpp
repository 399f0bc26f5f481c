#pragma once

#include <cstddef>

#include "cctrack/ast.hpp"

namespace cctrack {

/// Counters for which subcapturing rules fired. Used for generator coverage.
struct SubcaptureStats {
  std::size_t calls = 0;
  std::size_t scVar = 0;
};

/// Capture set of a type; type variables resolve through their bounds.
/// Throws TypeError (ill-scoped) on an unbound type variable.
CaptureSet cv(const TypeRef& t, const Context& gamma);

/// Decides gamma |- c1 <: c2. Throws TypeError (ill-scoped) if c1 names an unbound variable.
bool subcapture(const Context& gamma, const CaptureSet& c1, const CaptureSet& c2,
                SubcaptureStats* stats = nullptr);

}  // namespace cctrack
