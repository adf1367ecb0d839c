#pragma once

#include "csx/ast.hpp"
#include "csx/diagnostic.hpp"

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace csx {

/// What a reference or projection resolves to.
enum class DeclKind {
  TypeProp,       // defining property of `owner` type
  TypeDerived,    // derived property of `owner` type
  ActionLocParam, // location parameter of `owner` action
  ActionParam,    // parameter of `owner` action
  ActionDerived,  // derived property of `owner` action
  DeviceLocation, // location of `owner` device
  DeviceComponent,
  DeviceDerived,
  ComponentParam, // bare parameter inside component `index` of `owner` device
  Self,           // `self` inside component `index` of `owner` device
};

struct Decl {
  DeclKind kind;
  std::string owner;
  std::size_t index = 0;
  std::size_t sub = 0; // parameter index for ComponentParam
  bool operator==(const Decl&) const = default;
};

/// Static type of an expression.
struct Ty {
  enum class Kind { Int, Bool, Record, Component, Error };
  Kind kind = Kind::Error;
  std::string name; // record type name, or action name of a component

  static Ty integer() { return {Kind::Int, {}}; }
  static Ty boolean() { return {Kind::Bool, {}}; }
  static Ty record(std::string type) { return {Kind::Record, std::move(type)}; }
  static Ty component(std::string action) { return {Kind::Component, std::move(action)}; }
  static Ty error() { return {}; }

  bool is_primitive() const { return kind == Kind::Int || kind == Kind::Bool; }
  std::string str() const;
  bool operator==(const Ty&) const = default;
};

Ty type_of_ref(const TypeRef& ref);

struct ExprInfo {
  Ty type;
  std::optional<Decl> decl;
};

/// Per-node annotations keyed by node identity. Chains to a parent so job
/// expressions can be analyzed on top of an existing analysis.
class Annotations {
public:
  explicit Annotations(std::shared_ptr<const Annotations> parent = nullptr)
      : parent_(std::move(parent)) {}

  const ExprInfo* find(const ExprNode* node) const;
  void set(const ExprNode* node, ExprInfo info) { map_[node] = std::move(info); }
  std::size_t local_size() const { return map_.size(); }

private:
  std::shared_ptr<const Annotations> parent_;
  std::unordered_map<const ExprNode*, ExprInfo> map_;
};

/// A well-formed specification together with name-binding and typing
/// information for every expression node.
class TypedSpec {
public:
  TypedSpec(std::shared_ptr<const Spec> spec, std::shared_ptr<const Annotations> ann)
      : spec_(std::move(spec)), ann_(std::move(ann)) {}

  const Spec& spec() const { return *spec_; }
  const std::shared_ptr<const Spec>& spec_ptr() const { return spec_; }
  const std::shared_ptr<const Annotations>& annotations() const { return ann_; }

  /// Throws std::logic_error for nodes that were never analyzed.
  const ExprInfo& info(const Expr& e) const;
  const Ty& type_of(const Expr& e) const { return info(e).type; }
  const Decl* decl_of(const Expr& e) const;

  const TypeDef& type(std::string_view name) const;
  const ActionDef& action(std::string_view name) const;
  const DeviceDef& device(std::string_view name) const;

  /// Body of the derived property named by a TypeDerived, ActionDerived or
  /// DeviceDerived declaration.
  const DerivedDef& derived(const Decl& decl) const;

private:
  std::shared_ptr<const Spec> spec_;
  std::shared_ptr<const Annotations> ann_;
};

struct AnalysisResult {
  std::optional<TypedSpec> typed;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return typed.has_value(); }
};

/// Name binding, type checking and well-formedness (including both cycle
/// checks). `typed` is set iff no error diagnostics were produced.
AnalysisResult analyze(Spec spec);

/// Cycles in the nesting of types through their defining properties.
std::vector<Diagnostic> check_type_cycles(const Spec& spec);

/// Cycles among derived properties through their bodies' references.
std::vector<Diagnostic> check_derived_cycles(const TypedSpec& tspec);

/// Analyzes extra expressions in the scope of `device` (job constraints,
/// objectives, hover queries). The result shares the original analysis.
AnalysisResult analyze_in_device(const TypedSpec& tspec, std::string_view device,
                                 const std::vector<Expr>& exprs);

/// A primitive leaf of a device configuration: a location property path
/// (`block.sheet.width`) or a component parameter (`mill.depth`).
struct Leaf {
  std::vector<std::string> path;
  Sort sort;

  std::string dotted() const;
  bool operator==(const Leaf&) const = default;
};

/// Leaves in declaration order: locations depth-first, then components.
std::vector<Leaf> device_leaves(const TypedSpec& tspec, const DeviceDef& device);

/// Leaves of a single value of user type `type`, relative to that value.
std::vector<Leaf> type_leaves(const TypedSpec& tspec, const TypeDef& type);

/// Resolves a job path to a device leaf. Returns an error message on failure.
struct LeafResolution {
  std::optional<Leaf> leaf;
  std::string error;
};
LeafResolution resolve_leaf(const TypedSpec& tspec, const DeviceDef& device, const Path& path);

} // namespace csx
