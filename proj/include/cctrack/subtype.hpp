#pragma once

#include <cstddef>

#include "cctrack/ast.hpp"
#include "cctrack/capture.hpp"

namespace cctrack {

/// Subtyping decision with a recursion-depth guard. A run that hits the guard answers
/// "not a subtype" and sets depthExceeded.
class SubtypeChecker {
 public:
  explicit SubtypeChecker(std::size_t maxDepth = 512, SubcaptureStats* stats = nullptr)
      : maxDepth_(maxDepth), stats_(stats) {}

  bool subtype(const Context& gamma, const TypeRef& a, const TypeRef& b);
  bool subpretype(const Context& gamma, const PretypeRef& a, const PretypeRef& b);

  bool depthExceeded() const { return depthExceeded_; }

 private:
  bool sub(const Context& gamma, const TypeRef& a, const TypeRef& b, std::size_t depth);
  bool subPre(const Context& gamma, const PretypeRef& a, const PretypeRef& b, std::size_t depth);
  bool same(const Context& gamma, const TypeRef& a, const TypeRef& b, std::size_t depth);

  std::size_t maxDepth_;
  SubcaptureStats* stats_;
  bool depthExceeded_ = false;
};

bool subtype(const Context& gamma, const TypeRef& a, const TypeRef& b);
bool subpretype(const Context& gamma, const PretypeRef& a, const PretypeRef& b);

/// Replaces a type variable by its bound until a capture-annotated type or an
/// unbound variable remains.
TypeRef expose(const Context& gamma, const TypeRef& t);

}  // namespace cctrack
