#pragma once

#include "cctrack/ast.hpp"

namespace cctrack {

/// Checks gamma ; aPlus ; aMinus |- t wf. Throws TypeError (ill-scoped or polarity).
void wfType(const Context& gamma, const NameSet& aPlus, const NameSet& aMinus, const TypeRef& t);

/// wfType with both polarity sets equal to the term variables of gamma.
void wfTopLevel(const Context& gamma, const TypeRef& t);

/// Every binding is well-formed in the prefix before it.
void wfContext(const Context& gamma);

}  // namespace cctrack
