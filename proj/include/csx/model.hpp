#pragma once

#include "csx/ast.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace csx {

/// Ordered list of name parts; `qualified_name` joins them with `_`.
using Namespace = std::vector<std::string>;

std::string qualified_name(const Namespace& ns);

struct FlatNode;

/// Expression over model variables. Immutable, shared, structurally compared.
class FlatExpr {
public:
  FlatExpr() = default;
  explicit FlatExpr(std::shared_ptr<const FlatNode> node) : node_(std::move(node)) {}

  const FlatNode& operator*() const { return *node_; }
  const FlatNode* operator->() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

  friend bool operator==(const FlatExpr& a, const FlatExpr& b);

private:
  std::shared_ptr<const FlatNode> node_;
};

struct FInt {
  std::int64_t value;
  bool operator==(const FInt&) const = default;
};
struct FBool {
  bool value;
  bool operator==(const FBool&) const = default;
};
struct FVar {
  std::string name;
  bool operator==(const FVar&) const = default;
};
struct FUnary {
  UnaryOp op;
  FlatExpr operand;
  bool operator==(const FUnary&) const = default;
};
struct FBinary {
  BinaryOp op;
  FlatExpr lhs;
  FlatExpr rhs;
  bool operator==(const FBinary&) const = default;
};

struct FlatNode {
  std::variant<FInt, FBool, FVar, FUnary, FBinary> kind;
};

FlatExpr fint(std::int64_t v);
FlatExpr fbool(bool v);
FlatExpr fvar(std::string name);
FlatExpr funary(UnaryOp op, FlatExpr operand);
FlatExpr fbinary(BinaryOp op, FlatExpr lhs, FlatExpr rhs);

struct VarDecl {
  std::string name;
  Sort sort;
  bool operator==(const VarDecl&) const = default;
};

struct FlatObjective {
  Sense sense;
  FlatExpr expr;
  bool operator==(const FlatObjective&) const = default;
};

class MalformedModel : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The denotation of a device, type or action: variables, boolean
/// constraints and an optional integer objective.
struct ConstraintModel {
  std::vector<VarDecl> vars;
  std::vector<FlatExpr> constraints;
  std::optional<FlatObjective> objective;

  bool operator==(const ConstraintModel&) const = default;

  const VarDecl* find(std::string_view name) const;

  /// Throws MalformedModel on duplicate or undeclared variables and on
  /// sort errors (non-bool constraint, non-int objective, mixed operands).
  void validate() const;
};

/// Sort of `e` given the model's declarations. Throws MalformedModel.
Sort sort_of(const ConstraintModel& m, const FlatExpr& e);

/// Variable names referenced by `e`, in first-occurrence order.
std::vector<std::string> free_vars(const FlatExpr& e);

enum class Dialect { Interchange, Debug };

/// Interchange: `var int : x;` / `constraint <e>;` / `solve ...;` lines in a
/// MiniZinc-compatible subset. Debug: a readable dump.
std::string render_model(const ConstraintModel& m, Dialect dialect = Dialect::Interchange);
std::string render_flat(const FlatExpr& e);

} // namespace csx
