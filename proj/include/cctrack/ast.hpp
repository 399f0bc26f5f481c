#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace cctrack {

using Name = std::string;
using NameSet = std::set<Name>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Source position of a term, 1-based. A zero line means "synthesized".
struct Span {
  int line = 0;
  int column = 0;
  int endLine = 0;
  int endColumn = 0;
};

/// Either the universal set {*} or a finite set of term variables.
class CaptureSet {
 public:
  CaptureSet() = default;
  CaptureSet(std::initializer_list<Name> names) : vars_(names) {}
  explicit CaptureSet(NameSet names) : vars_(std::move(names)) {}

  static CaptureSet universal() {
    CaptureSet c;
    c.universal_ = true;
    return c;
  }
  static CaptureSet empty() { return {}; }

  bool isUniversal() const { return universal_; }
  bool isEmpty() const { return !universal_ && vars_.empty(); }
  /// Finite members; empty for the universal set.
  const NameSet& vars() const { return vars_; }
  /// Membership where the universal set contains every variable.
  bool mentions(const Name& x) const { return universal_ || vars_.count(x) > 0; }
  /// Literal membership in a concrete set.
  bool containsLiterally(const Name& x) const { return !universal_ && vars_.count(x) > 0; }

  friend bool operator==(const CaptureSet&, const CaptureSet&) = default;

 private:
  bool universal_ = false;
  NameSet vars_;
};

CaptureSet csUnion(const CaptureSet& a, const CaptureSet& b);
/// Set difference; {*} \ C = {*}, and a concrete set minus {*} is empty.
CaptureSet csMinus(const CaptureSet& a, const CaptureSet& b);
/// [x := c] target
CaptureSet substCapt(const CaptureSet& target, const Name& x, const CaptureSet& c);

struct TypeNode;
struct PretypeNode;
struct TermNode;
using TypeRef = std::shared_ptr<const TypeNode>;
using PretypeRef = std::shared_ptr<const PretypeNode>;
using TermRef = std::shared_ptr<const TermNode>;

// ---------------------------------------------------------------- types

struct TVar {
  Name name;
};
struct Capt {
  CaptureSet captures;
  PretypeRef pre;
};

struct TypeNode {
  std::variant<TVar, Capt> node;
};

struct Top {};
struct Bottom {};
struct Fun {
  Name param;
  TypeRef paramType;
  TypeRef result;
};
struct TFun {
  Name tparam;
  TypeRef bound;
  TypeRef result;
};
struct ReturnCap {
  TypeRef answer;
};
struct RegionCap {};
struct Ptr {
  TypeRef pointee;
};
struct Eff {
  TypeRef arg;
  TypeRef res;
};

struct PretypeNode {
  std::variant<Top, Bottom, Fun, TFun, ReturnCap, RegionCap, Ptr, Eff> node;
};

TypeRef tvar(Name name);
TypeRef capt(CaptureSet c, PretypeRef pre);
PretypeRef top();
PretypeRef bottom();
PretypeRef fun(Name param, TypeRef paramType, TypeRef result);
PretypeRef tfun(Name tparam, TypeRef bound, TypeRef result);
PretypeRef returnCap(TypeRef answer);
PretypeRef region();
PretypeRef ptr(TypeRef pointee);
PretypeRef eff(TypeRef arg, TypeRef res);

inline const Capt* asCapt(const TypeRef& t) { return std::get_if<Capt>(&t->node); }
inline const TVar* asTVar(const TypeRef& t) { return std::get_if<TVar>(&t->node); }
template <class P>
const P* pretypeAs(const TypeRef& t) {
  const Capt* c = asCapt(t);
  return c ? std::get_if<P>(&c->pre->node) : nullptr;
}

// ---------------------------------------------------------------- terms

struct Var {
  Name name;
};
struct Abs {
  Name param;
  TypeRef paramType;
  TermRef body;
};
struct TAbs {
  Name tparam;
  TypeRef bound;
  TermRef body;
};
struct App {
  TermRef fn;
  TermRef arg;
};
struct TApp {
  TermRef fn;
  TypeRef typeArg;
};
/// `handle x : T in body` -- a block the capability x can return from.
struct Handle {
  Name cap;
  TypeRef answerType;
  TermRef body;
};
/// `return cap value`
struct DoReturn {
  TermRef cap;
  TermRef value;
};
/// `region x in body`. `frame` is set at run time once the region owns a store frame.
struct RegionBlock {
  Name handle;
  TermRef body;
  std::optional<std::size_t> frame;
};
/// `new x [T] init`
struct New {
  Name handle;
  TypeRef elemType;
  TermRef init;
};
/// `! target`
struct Deref {
  TermRef target;
};
/// `handle x : Eff[A,B] = handler(y, k) => handlerBody in body`
struct HandleEff {
  Name cap;
  TypeRef effType;
  Name hParam;
  Name hKont;
  TermRef handlerBody;
  TermRef body;
};
/// `do x arg`
struct DoEff {
  Name cap;
  TermRef arg;
};
/// Runtime pointer into the region store. Never produced by the parser.
struct PtrVal {
  std::size_t location;
  Name region;
  TypeRef elemType;
};

struct TermNode {
  std::variant<Var, Abs, TAbs, App, TApp, Handle, DoReturn, RegionBlock, New, Deref,
               HandleEff, DoEff, PtrVal>
      node;
  Span span;
};

TermRef var(Name name, Span span = {});
TermRef abs(Name param, TypeRef paramType, TermRef body, Span span = {});
TermRef tabs(Name tparam, TypeRef bound, TermRef body, Span span = {});
TermRef app(TermRef fn, TermRef arg, Span span = {});
TermRef tapp(TermRef fn, TypeRef typeArg, Span span = {});
TermRef handleReturn(Name cap, TypeRef answer, TermRef body, Span span = {});
TermRef doReturn(TermRef cap, TermRef value, Span span = {});
TermRef regionBlock(Name handle, TermRef body, Span span = {},
                    std::optional<std::size_t> frame = std::nullopt);
TermRef newPtr(Name handle, TypeRef elemType, TermRef init, Span span = {});
TermRef deref(TermRef target, Span span = {});
TermRef handleEff(Name cap, TypeRef effType, Name hParam, Name hKont, TermRef handlerBody,
                  TermRef body, Span span = {});
TermRef doEff(Name cap, TermRef arg, Span span = {});
TermRef ptrVal(std::size_t location, Name region, TypeRef elemType);

template <class N>
const N* termAs(const TermRef& t) {
  return std::get_if<N>(&t->node);
}

// ---------------------------------------------------------------- equality

/// Structural equality; binder names must match exactly. Spans are ignored.
bool equal(const TypeRef& a, const TypeRef& b);
bool equal(const PretypeRef& a, const PretypeRef& b);
bool equal(const TermRef& a, const TermRef& b);
/// Equality up to renaming of bound term and type variables.
bool alphaEqual(const TypeRef& a, const TypeRef& b);
bool alphaEqual(const PretypeRef& a, const PretypeRef& b);
bool alphaEqual(const TermRef& a, const TermRef& b);

// ---------------------------------------------------------------- free names

/// Free term-position variables. Capture-set occurrences are excluded.
NameSet fv(const TermRef& t);
/// Free term variables occurring in capture sets of a type.
NameSet captureVars(const TypeRef& t);
NameSet captureVars(const PretypeRef& t);
NameSet freeTypeVars(const TypeRef& t);
NameSet freeTypeVars(const PretypeRef& t);
/// Every free name of any sort: term positions, capture sets, type variables.
NameSet freeNames(const TermRef& t);
NameSet freeNames(const TypeRef& t);
/// Every name occurring anywhere, bound or free.
NameSet allNames(const TermRef& t);
NameSet allNames(const TypeRef& t);

/// `base` if it is not in `avoid`, otherwise the first `base_N` that is not.
Name freshName(const Name& base, const NameSet& avoid);

// ---------------------------------------------------------------- substitution

TypeRef substCaptInType(const TypeRef& t, const Name& x, const CaptureSet& c);
PretypeRef substCaptInPretype(const PretypeRef& u, const Name& x, const CaptureSet& c);
TermRef substCaptInTerm(const TermRef& t, const Name& x, const CaptureSet& c);

/// Capture-avoiding [x := v] over term positions only.
TermRef substTerm(const TermRef& t, const Name& x, const TermRef& v);

TypeRef substType(const TypeRef& t, const Name& X, const TypeRef& s);
PretypeRef substTypeInPretype(const PretypeRef& u, const Name& X, const TypeRef& s);
TermRef substTypeInTerm(const TermRef& t, const Name& X, const TypeRef& s);

/// Renames a free term variable everywhere (term positions and capture sets).
TermRef renameTermVar(const TermRef& t, const Name& from, const Name& to);
TypeRef renameTermVar(const TypeRef& t, const Name& from, const Name& to);

/// Number of nodes, used by the shrinker and generators.
std::size_t termSize(const TermRef& t);
std::size_t typeSize(const TypeRef& t);

// ---------------------------------------------------------------- contexts

struct Binding {
  enum class Kind { Term, Type };
  Kind kind;
  Name name;
  /// The term's type, or the type variable's upper bound.
  TypeRef type;
};

/// Ordered typing context. Persistent: extension shares the prefix.
class Context {
 public:
  Context() = default;

  Context extendTerm(Name x, TypeRef t) const;
  Context extendType(Name X, TypeRef bound) const;

  const Binding* lookup(const Name& name) const;
  std::optional<TypeRef> termType(const Name& x) const;
  std::optional<TypeRef> typeBound(const Name& X) const;
  bool binds(const Name& name) const { return lookup(name) != nullptr; }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  /// Names bound as term variables.
  NameSet termNames() const;
  NameSet allNames() const;
  /// Bindings oldest first.
  std::vector<Binding> bindings() const;

 private:
  struct Node {
    Binding binding;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head_;
  std::size_t size_ = 0;
};

}  // namespace cctrack
