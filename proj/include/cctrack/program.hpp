#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cctrack/ast.hpp"
#include "cctrack/diagnostics.hpp"
#include "cctrack/syntax.hpp"
#include "cctrack/typing.hpp"

namespace cctrack {

/// A program with definitions expanded in place. Definitions behave as macros: each
/// later use is replaced by the definition body.
struct Elaborated {
  Context gamma;  // assumptions, in order
  struct Def {
    Name name;
    TermRef body;
    TypeRef ascription;  // may be null
    Span span;
  };
  std::vector<Def> defs;
  std::optional<TermRef> main;
  Span mainSpan;
};

/// Throws TypeError when a name is declared twice or a definition is used before it exists.
Elaborated elaborate(const SourceProgram& p);

struct CheckReport {
  bool ok = true;
  struct DefType {
    Name name;
    TypeRef type;
  };
  std::vector<DefType> defs;
  std::optional<TypeRef> mainType;
  std::optional<TypeError> error;
  /// Declaration the error belongs to ("main", a def name, or an assumption).
  std::string errorDecl;
};

CheckReport checkProgram(const SourceProgram& p, TypingStats* stats = nullptr);

/// Prints a type folding the program's aliases.
std::string renderType(const TypeRef& t, const SourceProgram& p);
std::string renderTerm(const TermRef& t, const SourceProgram& p);

/// JSON document for `check --json`.
std::string checkReportJson(const CheckReport& r, const SourceProgram& p);
std::string parseErrorJson(const ParseError& e);

/// Human-readable diagnostic, "line:col: kind: message".
std::string describe(const TypeError& e, const SourceProgram& p);

}  // namespace cctrack
