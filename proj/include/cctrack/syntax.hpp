#pragma once

#include <string>
#include <vector>

#include "cctrack/ast.hpp"
#include "cctrack/extensions.hpp"

namespace cctrack {

/// `alias Name[P1, P2] = body`. The body is either a type or a bare pretype.
struct Alias {
  Name name;
  std::vector<Name> params;
  TypeRef type;        // set for type aliases
  PretypeRef pretype;  // set for pretype aliases
  bool isPretype() const { return pretype != nullptr; }
};

struct PrintOptions {
  /// Aliases folded back into their names when the printed shape matches.
  const std::vector<Alias>* aliases = nullptr;
};

std::string printType(const TypeRef& t, const PrintOptions& opts = {});
std::string printPretype(const PretypeRef& u, const PrintOptions& opts = {});
std::string printCaptureSet(const CaptureSet& c);
std::string printTerm(const TermRef& t, const PrintOptions& opts = {});

struct Declaration {
  enum class Kind { AssumeTerm, AssumeType, Def, Main, Alias };
  Kind kind;
  Name name;
  TypeRef type;                  // AssumeTerm type, AssumeType bound, optional Def ascription
  TermRef term;                  // Def body or Main term
  std::size_t aliasIndex = 0;    // into SourceProgram::aliases
  Span span;
};

struct SourceProgram {
  Extensions extensions;
  std::vector<Alias> aliases;
  std::vector<Declaration> decls;
};

/// Parses a whole program. `ext` is merged with any `#ext` pragma in the source.
SourceProgram parseProgram(const std::string& source, Extensions ext = {});

/// Parses a standalone type or term. Aliases from `aliases` are expanded.
TypeRef parseType(const std::string& source, Extensions ext = Extensions::all(),
                  const std::vector<Alias>* aliases = nullptr);
TermRef parseTerm(const std::string& source, Extensions ext = Extensions::all(),
                  const std::vector<Alias>* aliases = nullptr);

/// Renders a program back to source. Parsing the result gives back the same declarations.
std::string printProgram(const SourceProgram& p);

}  // namespace cctrack
