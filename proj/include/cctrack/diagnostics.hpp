#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "cctrack/ast.hpp"

namespace cctrack {

enum class ErrorKind { IllScoped, Polarity, Mismatch, NotAFunction, Escape, ExtensionDisabled, Depth };

/// Stable lowercase name used in JSON output, e.g. "ill-scoped".
const char* kindName(ErrorKind k);

class TypeError : public std::runtime_error {
 public:
  TypeError(ErrorKind kind, std::string message, Span span = {})
      : std::runtime_error(message), kind(kind), span(span), message(std::move(message)) {}

  ErrorKind kind;
  Span span;
  std::string message;
  std::optional<TypeRef> expected;
  std::optional<TypeRef> found;
  /// Offending variable for scope, polarity and escape errors.
  std::optional<Name> variable;
  /// Finer tag naming the failed premise, e.g. "handle-argument-escape".
  std::string rule;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, Span span) : std::runtime_error(message), span(span) {}
  Span span;
};

}  // namespace cctrack
