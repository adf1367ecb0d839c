#include "csx/ast.hpp"

#include <algorithm>
#include <array>

namespace csx {

Span merge(const Span& a, const Span& b) {
  return Span{a.file, std::min(a.begin, b.begin), std::max(a.end, b.end)};
}

namespace {

constexpr std::array<std::string_view, 23> kKeywords = {
    "type",     "action",   "device",  "component", "location", "parameter",
    "derived",  "scenario", "objective", "minimize", "maximize", "int",
    "bool",     "true",     "false",   "for",       "expect",   "and",
    "or",       "not",      "implies", "self",      "inhab"};

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

} // namespace

bool is_keyword(std::string_view text) {
  return std::find(kKeywords.begin(), kKeywords.end(), text) != kKeywords.end();
}

bool is_valid_ident(std::string_view text) {
  if (text.empty() || !is_alpha(text.front()))
    return false;
  for (char c : text)
    if (!is_alpha(c) && !is_digit(c))
      return false;
  return !is_keyword(text);
}

std::string_view to_string(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "not"; }

std::string_view to_string(BinaryOp op) {
  switch (op) {
  case BinaryOp::Add: return "+";
  case BinaryOp::Sub: return "-";
  case BinaryOp::Mul: return "*";
  case BinaryOp::Eq: return "==";
  case BinaryOp::Ne: return "!=";
  case BinaryOp::Lt: return "<";
  case BinaryOp::Le: return "<=";
  case BinaryOp::Gt: return ">";
  case BinaryOp::Ge: return ">=";
  case BinaryOp::And: return "and";
  case BinaryOp::Or: return "or";
  case BinaryOp::Implies: return "implies";
  }
  return "?";
}

bool is_arithmetic(BinaryOp op) {
  return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul;
}

bool is_comparison(BinaryOp op) {
  switch (op) {
  case BinaryOp::Eq:
  case BinaryOp::Ne:
  case BinaryOp::Lt:
  case BinaryOp::Le:
  case BinaryOp::Gt:
  case BinaryOp::Ge: return true;
  default: return false;
  }
}

bool is_logical(BinaryOp op) {
  return op == BinaryOp::And || op == BinaryOp::Or || op == BinaryOp::Implies;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.get() == b.get())
    return true;
  if (!a || !b)
    return false;
  return a->kind == b->kind;
}

namespace {
Expr wrap(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }
} // namespace

Expr make_int(std::int64_t value, Span span) { return wrap({IntLit{value}, span}); }
Expr make_bool(bool value, Span span) { return wrap({BoolLit{value}, span}); }
Expr make_ref(std::string name, Span span) { return wrap({Ref{std::move(name)}, span}); }
Expr make_proj(Expr base, std::string member, Span span) {
  return wrap({Proj{std::move(base), std::move(member)}, span});
}
Expr make_unary(UnaryOp op, Expr operand, Span span) {
  return wrap({Unary{op, std::move(operand)}, span});
}
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs, Span span) {
  return wrap({Binary{op, std::move(lhs), std::move(rhs)}, span});
}

std::string Path::str() const {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty())
      out += '.';
    out += p.text;
  }
  return out;
}

Span Path::span() const {
  if (parts.empty())
    return {};
  return merge(parts.front().span, parts.back().span);
}

std::string_view to_string(Sort sort) { return sort == Sort::Int ? "int" : "bool"; }

std::string to_string(const Literal& lit) {
  if (const auto* b = std::get_if<bool>(&lit))
    return *b ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(lit));
}

std::string_view to_string(Sense sense) {
  return sense == Sense::Minimize ? "minimize" : "maximize";
}

namespace {
template <class T>
const T* find_named(const std::vector<T>& defs, std::string_view name) {
  for (const auto& d : defs)
    if (d.name.text == name)
      return &d;
  return nullptr;
}
} // namespace

const TypeDef* Spec::find_type(std::string_view name) const { return find_named(types, name); }
const ActionDef* Spec::find_action(std::string_view name) const { return find_named(actions, name); }
const DeviceDef* Spec::find_device(std::string_view name) const { return find_named(devices, name); }
const ScenarioDef* Spec::find_scenario(std::string_view name) const {
  return find_named(scenarios, name);
}

void append(Spec& into, Spec other) {
  auto move_all = [](auto& dst, auto& src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
  };
  move_all(into.types, other.types);
  move_all(into.actions, other.actions);
  move_all(into.devices, other.devices);
  move_all(into.scenarios, other.scenarios);
}

} // namespace csx
