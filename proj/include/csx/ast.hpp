#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace csx {

/// Source range of an AST node: file id plus byte offsets [begin, end).
///
/// Spans are source metadata. They never participate in AST equality, so
/// two trees parsed from differently formatted text compare equal.
struct Span {
  std::uint32_t file = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  friend bool operator==(const Span&, const Span&) { return true; }
};

Span merge(const Span& a, const Span& b);

struct Ident {
  std::string text;
  Span span;

  bool operator==(const Ident&) const = default;
};

/// Identifier rules: `[A-Za-z][A-Za-z0-9]*`, not a keyword.
bool is_keyword(std::string_view text);
bool is_valid_ident(std::string_view text);

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies };

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);
bool is_arithmetic(BinaryOp op);
bool is_comparison(BinaryOp op);
bool is_logical(BinaryOp op);

struct ExprNode;

/// Immutable, shared expression tree. Copies share nodes; node addresses are
/// stable for the lifetime of any copy and key the semantic annotations.
class Expr {
public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  const ExprNode& operator*() const { return *node_; }
  const ExprNode* operator->() const { return node_.get(); }
  const ExprNode* get() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

  /// Structural equality, span-insensitive.
  friend bool operator==(const Expr& a, const Expr& b);

private:
  std::shared_ptr<const ExprNode> node_;
};

struct IntLit {
  std::int64_t value;
  bool operator==(const IntLit&) const = default;
};
struct BoolLit {
  bool value;
  bool operator==(const BoolLit&) const = default;
};
struct Ref {
  std::string name;
  bool operator==(const Ref&) const = default;
};
struct Proj {
  Expr base;
  std::string member;
  bool operator==(const Proj&) const = default;
};
struct Unary {
  UnaryOp op;
  Expr operand;
  bool operator==(const Unary&) const = default;
};
struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
  bool operator==(const Binary&) const = default;
};

struct ExprNode {
  std::variant<IntLit, BoolLit, Ref, Proj, Unary, Binary> kind;
  Span span;
};

Expr make_int(std::int64_t value, Span span = {});
Expr make_bool(bool value, Span span = {});
Expr make_ref(std::string name, Span span = {});
Expr make_proj(Expr base, std::string member, Span span = {});
Expr make_unary(UnaryOp op, Expr operand, Span span = {});
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs, Span span = {});

/// `int`, `bool`, or the name of a user-defined type.
struct TypeRef {
  std::string name;
  Span span;

  bool is_primitive() const { return name == "int" || name == "bool"; }
  bool operator==(const TypeRef&) const = default;
};

/// A `name: Type` pair. Used for defining properties, locations, action
/// location parameters and action parameters.
struct Field {
  Ident name;
  TypeRef type;
  bool operator==(const Field&) const = default;
};

struct DerivedDef {
  Ident name;
  Expr body;
  bool operator==(const DerivedDef&) const = default;
};

struct TypeDef {
  Ident name;
  std::vector<Field> props;
  std::vector<DerivedDef> derived;
  std::vector<Expr> constraints;
  Span span;
  bool operator==(const TypeDef&) const = default;
};

struct ActionDef {
  Ident name;
  std::vector<Field> loc_params;
  std::vector<Field> params;
  std::vector<DerivedDef> derived;
  std::vector<Expr> constraints;
  Span span;
  bool operator==(const ActionDef&) const = default;
};

struct ComponentDef {
  Ident name;
  Ident action;
  std::vector<Ident> loc_args;
  std::vector<Expr> constraints;
  Span span;
  bool operator==(const ComponentDef&) const = default;
};

struct DeviceDef {
  Ident name;
  std::vector<Field> locations;
  std::vector<ComponentDef> components;
  std::vector<DerivedDef> derived;
  std::vector<Expr> constraints;
  Span span;
  bool operator==(const DeviceDef&) const = default;
};

/// Dotted chain rooted at a location or component, e.g. `block.sheet.width`.
struct Path {
  std::vector<Ident> parts;
  bool operator==(const Path&) const = default;
  std::string str() const;
  Span span() const;
};

enum class Sort { Int, Bool };
std::string_view to_string(Sort sort);

using Literal = std::variant<std::int64_t, bool>;
std::string to_string(const Literal& lit);

struct Binding {
  Path path;
  Literal value;
  bool operator==(const Binding&) const = default;
};

enum class Sense { Minimize, Maximize };
std::string_view to_string(Sense sense);

struct Objective {
  Sense sense;
  Expr expr;
  bool operator==(const Objective&) const = default;
};

/// One expectation together with the scenario context it is evaluated
/// under. Produced by desugaring; never written by the parser.
struct TestCase {
  Expr expectation;
  std::vector<Binding> bindings;
  std::vector<Expr> constraints;
  std::optional<Objective> objective;
  bool operator==(const TestCase&) const = default;
};

struct ScenarioDef {
  Ident name;
  Ident device;
  std::vector<Binding> bindings;
  std::vector<Expr> constraints;
  std::optional<Objective> objective;
  std::vector<Expr> expectations;
  std::vector<TestCase> tests;
  Span span;
  bool operator==(const ScenarioDef&) const = default;
};

struct Spec {
  std::vector<TypeDef> types;
  std::vector<ActionDef> actions;
  std::vector<DeviceDef> devices;
  std::vector<ScenarioDef> scenarios;
  bool operator==(const Spec&) const = default;

  bool empty() const {
    return types.empty() && actions.empty() && devices.empty() && scenarios.empty();
  }

  const TypeDef* find_type(std::string_view name) const;
  const ActionDef* find_action(std::string_view name) const;
  const DeviceDef* find_device(std::string_view name) const;
  const ScenarioDef* find_scenario(std::string_view name) const;
};

/// Appends all definitions of `other` to `into`, keeping kind order.
void append(Spec& into, Spec other);

} // namespace csx
