#include "cctrack/diagnostics.hpp"

namespace cctrack {

const char* kindName(ErrorKind k) {
  switch (k) {
    case ErrorKind::IllScoped: return "ill-scoped";
    case ErrorKind::Polarity: return "polarity";
    case ErrorKind::Mismatch: return "mismatch";
    case ErrorKind::NotAFunction: return "not-a-function";
    case ErrorKind::Escape: return "escape";
    case ErrorKind::ExtensionDisabled: return "extension-disabled";
    case ErrorKind::Depth: return "depth";
  }
  return "unknown";
}

}  // namespace cctrack
