#include "csx/fd/solver.hpp"

#include <limits>
#include <stdexcept>

namespace csx::fd {

std::string to_string(const Scalar& s) {
  if (const auto* b = std::get_if<bool>(&s))
    return *b ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(s));
}

std::string_view to_string(Status s) {
  switch (s) {
  case Status::Sat: return "sat";
  case Status::Opt: return "optimal";
  case Status::Unsat: return "unsat";
  case Status::Exhausted: return "exhausted";
  }
  return "?";
}

namespace {
void check_bound(std::int64_t v) {
  if (v > kMaxBound || v < -kMaxBound)
    throw std::invalid_argument("domain bound " + std::to_string(v) + " exceeds +/-" +
                                std::to_string(kMaxBound));
}
} // namespace

DomainBox::DomainBox(std::int64_t lo, std::int64_t hi) { set_default(lo, hi); }

void DomainBox::set_default(std::int64_t lo, std::int64_t hi) {
  check_bound(lo);
  check_bound(hi);
  default_ = {lo, hi};
}

void DomainBox::set(const std::string& var, std::int64_t lo, std::int64_t hi) {
  check_bound(lo);
  check_bound(hi);
  ints_[var] = {lo, hi};
}

void DomainBox::fix(const std::string& var, bool value) { bools_[var] = value; }

Interval DomainBox::int_domain(const std::string& var) const {
  auto it = ints_.find(var);
  return it == ints_.end() ? default_ : it->second;
}

std::optional<bool> DomainBox::bool_fixed(const std::string& var) const {
  auto it = bools_.find(var);
  if (it == bools_.end())
    return std::nullopt;
  return it->second;
}

std::string DomainBox::key() const {
  std::string out = "[" + std::to_string(default_.lo) + "," + std::to_string(default_.hi) + "]";
  for (const auto& [name, d] : ints_)
    out += " " + name + "=[" + std::to_string(d.lo) + "," + std::to_string(d.hi) + "]";
  for (const auto& [name, b] : bools_)
    out += " " + name + "=" + (b ? "true" : "false");
  return out;
}

void Assignment::set(const std::string& var, Scalar value) {
  for (auto& [name, v] : entries_) {
    if (name == var) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(var, value);
}

const Scalar* Assignment::find(std::string_view var) const {
  for (const auto& [name, v] : entries_)
    if (name == var)
      return &v;
  return nullptr;
}

std::int64_t Assignment::int_of(std::string_view var) const {
  const Scalar* s = find(var);
  if (s == nullptr || !std::holds_alternative<std::int64_t>(*s))
    throw std::out_of_range("no integer value for '" + std::string(var) + "'");
  return std::get<std::int64_t>(*s);
}

bool Assignment::bool_of(std::string_view var) const {
  const Scalar* s = find(var);
  if (s == nullptr || !std::holds_alternative<bool>(*s))
    throw std::out_of_range("no boolean value for '" + std::string(var) + "'");
  return std::get<bool>(*s);
}

namespace {

using I128 = __int128;

struct Val {
  bool is_bool;
  bool b;
  I128 i;
};

I128 arith(BinaryOp op, I128 a, I128 b) {
  I128 out = 0;
  bool overflow = false;
  switch (op) {
  case BinaryOp::Add: overflow = __builtin_add_overflow(a, b, &out); break;
  case BinaryOp::Sub: overflow = __builtin_sub_overflow(a, b, &out); break;
  case BinaryOp::Mul: overflow = __builtin_mul_overflow(a, b, &out); break;
  default: throw MalformedModel("unsupported operator");
  }
  if (overflow)
    throw std::overflow_error("integer overflow in evaluation");
  return out;
}

Val eval(const FlatExpr& e, const Assignment& a) {
  return std::visit(
      [&](const auto& n) -> Val {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FInt>) {
          return {false, false, n.value};
        } else if constexpr (std::is_same_v<T, FBool>) {
          return {true, n.value, 0};
        } else if constexpr (std::is_same_v<T, FVar>) {
          const Scalar* s = a.find(n.name);
          if (s == nullptr)
            throw MalformedModel("no value for variable '" + n.name + "'");
          if (const auto* b = std::get_if<bool>(s))
            return {true, *b, 0};
          return {false, false, std::get<std::int64_t>(*s)};
        } else if constexpr (std::is_same_v<T, FUnary>) {
          Val v = eval(n.operand, a);
          if (n.op == UnaryOp::Not) {
            if (!v.is_bool)
              throw MalformedModel("'not' applied to an integer");
            return {true, !v.b, 0};
          }
          if (v.is_bool)
            throw MalformedModel("'-' applied to a boolean");
          return {false, false, -v.i};
        } else {
          // Logical operators short-circuit.
          if (is_logical(n.op)) {
            Val l = eval(n.lhs, a);
            if (!l.is_bool)
              throw MalformedModel("logical operator applied to an integer");
            if (n.op == BinaryOp::And && !l.b)
              return {true, false, 0};
            if (n.op == BinaryOp::Or && l.b)
              return {true, true, 0};
            if (n.op == BinaryOp::Implies && !l.b)
              return {true, true, 0};
            Val r = eval(n.rhs, a);
            if (!r.is_bool)
              throw MalformedModel("logical operator applied to an integer");
            return {true, r.b, 0};
          }
          Val l = eval(n.lhs, a);
          Val r = eval(n.rhs, a);
          if (n.op == BinaryOp::Eq || n.op == BinaryOp::Ne) {
            if (l.is_bool != r.is_bool)
              throw MalformedModel("comparison of different sorts");
            bool eq = l.is_bool ? l.b == r.b : l.i == r.i;
            return {true, n.op == BinaryOp::Eq ? eq : !eq, 0};
          }
          if (l.is_bool || r.is_bool)
            throw MalformedModel("arithmetic on a boolean");
          switch (n.op) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
          case BinaryOp::Mul: return {false, false, arith(n.op, l.i, r.i)};
          case BinaryOp::Lt: return {true, l.i < r.i, 0};
          case BinaryOp::Le: return {true, l.i <= r.i, 0};
          case BinaryOp::Gt: return {true, l.i > r.i, 0};
          case BinaryOp::Ge: return {true, l.i >= r.i, 0};
          default: break;
          }
          throw MalformedModel("unsupported operator");
        }
      },
      e->kind);
}

} // namespace

Scalar eval_flat(const FlatExpr& e, const Assignment& a) {
  Val v = eval(e, a);
  if (v.is_bool)
    return v.b;
  if (v.i > std::numeric_limits<std::int64_t>::max() ||
      v.i < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("integer result does not fit 64 bits");
  return static_cast<std::int64_t>(v.i);
}

bool evaluate(const ConstraintModel& m, const Assignment& a) {
  for (const auto& v : m.vars) {
    const Scalar* s = a.find(v.name);
    if (s == nullptr)
      throw MalformedModel("assignment has no value for '" + v.name + "'");
    if (std::holds_alternative<bool>(*s) != (v.sort == Sort::Bool))
      throw MalformedModel("value of '" + v.name + "' has the wrong sort");
  }
  for (const auto& c : m.constraints) {
    Val v = eval(c, a);
    if (!v.is_bool)
      throw MalformedModel("constraint is not boolean");
    if (!v.b)
      return false;
  }
  return true;
}

} // namespace csx::fd
