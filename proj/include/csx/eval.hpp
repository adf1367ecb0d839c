#pragma once

#include "csx/fd/solver.hpp"
#include "csx/lower.hpp"
#include "csx/sema.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace csx {

struct Value;

/// A model `(M, x = v)`: an ordered list of bindings where lookup finds the
/// most recent binding of a name.
class ModelValue {
public:
  /// Extends the model with `name = value`; earlier bindings of the same
  /// name stay but are shadowed.
  ModelValue& bind(std::string name, Value value);

  const Value* lookup(std::string_view name) const;

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Value>& values() const { return values_; }
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }

  friend bool operator==(const ModelValue& a, const ModelValue& b);

private:
  std::vector<std::string> names_;
  std::vector<Value> values_;
};

struct Value {
  std::variant<std::int64_t, bool, ModelValue> v;

  Value(std::int64_t i) : v(i) {}
  Value(bool b) : v(b) {}
  Value(ModelValue m) : v(std::move(m)) {}

  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_model() const { return std::holds_alternative<ModelValue>(v); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const ModelValue& as_model() const { return std::get<ModelValue>(v); }

  bool operator==(const Value& o) const { return v == o.v; }
};

/// `{w = 10, h = 20}` style rendering, nested for models.
std::string to_string(const Value& v);

/// A referenced name has no binding: the configuration is not total.
class MissingBinding : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Enumeration refused because the box holds too many configurations.
class SpaceTooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Where an expression is evaluated: `root` holds the device's locations
/// and components, `local` the value whose properties or parameters bare
/// names refer to, and `renaming` maps action location parameters.
struct EvalContext {
  const ModelValue* root = nullptr;
  const ModelValue* local = nullptr;
  const Renaming* renaming = nullptr;
};

/// Evaluates an analyzed expression. Boolean connectives short-circuit.
/// Throws MissingBinding and std::overflow_error.
Value eval_expr(const TypedSpec& tspec, const Expr& e, const EvalContext& ctx);

/// Evaluates an expression analyzed in device scope against a device
/// configuration.
Value eval_in_device(const TypedSpec& tspec, const ModelValue& config, const Expr& e);

/// Whether `config` is a valid configuration of `device`: every location
/// and component is bound with values of the right sorts and all type,
/// action, component and device constraints hold. Throws MissingBinding.
bool satisfies(const TypedSpec& tspec, std::string_view device, const ModelValue& config);

/// Every valid configuration in `box`, in lexicographic order of the
/// device's leaves (booleans false first, integers ascending). Throws
/// SpaceTooLarge when the box holds more than `max_space` candidates.
std::vector<ModelValue> enumerate(const TypedSpec& tspec, std::string_view device,
                                  const fd::DomainBox& box,
                                  std::uint64_t max_space = 10'000'000);

/// Configuration -> assignment over the device's qualified variable names.
fd::Assignment flatten(const TypedSpec& tspec, std::string_view device, const ModelValue& config);

/// Assignment -> configuration, following the device's declaration order.
ModelValue lift(const TypedSpec& tspec, std::string_view device, const fd::Assignment& a);

/// Value at a leaf path of a configuration, or nullptr.
const Value* value_at(const ModelValue& config, const std::vector<std::string>& path);

} // namespace csx
