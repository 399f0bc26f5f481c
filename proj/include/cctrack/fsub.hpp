#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cctrack/ast.hpp"

namespace cctrack::fsub {

struct TypeNode;
struct TermNode;
using Type = std::shared_ptr<const TypeNode>;
using Term = std::shared_ptr<const TermNode>;

struct TVar {
  Name name;
};
struct Top {};
struct Arrow {
  Type from;
  Type to;
};
struct All {
  Name tparam;
  Type bound;
  Type body;
};
struct TypeNode {
  std::variant<TVar, Top, Arrow, All> node;
};

struct Var {
  Name name;
};
struct Abs {
  Name param;
  Type paramType;
  Term body;
};
struct App {
  Term fn;
  Term arg;
};
struct TAbs {
  Name tparam;
  Type bound;
  Term body;
};
struct TApp {
  Term fn;
  Type typeArg;
};
struct TermNode {
  std::variant<Var, Abs, App, TAbs, TApp> node;
};

Type tvar(Name n);
Type top();
Type arrow(Type from, Type to);
Type all(Name X, Type bound, Type body);
Term var(Name n);
Term abs(Name x, Type t, Term body);
Term app(Term f, Term a);
Term tabs(Name X, Type bound, Term body);
Term tapp(Term f, Type t);

bool alphaEqual(const Type& a, const Type& b);
bool equal(const Term& a, const Term& b);
Type substType(const Type& t, const Name& X, const Type& s);

struct Binding {
  bool isType;
  Name name;
  Type type;
};
using Context = std::vector<Binding>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when erasing an extension construct, which has no F<: image.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full F<: subtyping. Depth-guarded; hitting the guard answers false.
bool subtype(const Context& ctx, const Type& a, const Type& b, std::size_t maxDepth = 512);

/// Algorithmic F<: type checking. Throws Error.
Type check(const Context& ctx, const Term& t);

std::string print(const Type& t);
std::string print(const Term& t);

// ---------------------------------------------------------------- bridges

Type eraseType(const TypeRef& t);
Term eraseTerm(const TermRef& t);
Context eraseContext(const cctrack::Context& gamma);

/// Annotates every pretype with c, which must be {} or {*}.
TypeRef embedType(const Type& t, const CaptureSet& c);
TermRef embedTerm(const Term& t, const CaptureSet& c);
cctrack::Context embedContext(const Context& ctx, const CaptureSet& c);

}  // namespace cctrack::fsub
