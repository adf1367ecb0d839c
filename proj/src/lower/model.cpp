#include "csx/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace csx {

std::string qualified_name(const Namespace& ns) {
  std::string out;
  for (const auto& p : ns) {
    if (!out.empty())
      out += '_';
    out += p;
  }
  return out;
}

bool operator==(const FlatExpr& a, const FlatExpr& b) {
  if (a.node_ == b.node_)
    return true;
  if (!a.node_ || !b.node_)
    return false;
  return a.node_->kind == b.node_->kind;
}

namespace {
FlatExpr wrap(FlatNode n) { return FlatExpr(std::make_shared<const FlatNode>(std::move(n))); }
} // namespace

FlatExpr fint(std::int64_t v) { return wrap({FInt{v}}); }
FlatExpr fbool(bool v) { return wrap({FBool{v}}); }
FlatExpr fvar(std::string name) { return wrap({FVar{std::move(name)}}); }
FlatExpr funary(UnaryOp op, FlatExpr operand) { return wrap({FUnary{op, std::move(operand)}}); }
FlatExpr fbinary(BinaryOp op, FlatExpr lhs, FlatExpr rhs) {
  return wrap({FBinary{op, std::move(lhs), std::move(rhs)}});
}

const VarDecl* ConstraintModel::find(std::string_view name) const {
  for (const auto& v : vars)
    if (v.name == name)
      return &v;
  return nullptr;
}

Sort sort_of(const ConstraintModel& m, const FlatExpr& e) {
  return std::visit(
      [&](const auto& n) -> Sort {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FInt>) {
          return Sort::Int;
        } else if constexpr (std::is_same_v<T, FBool>) {
          return Sort::Bool;
        } else if constexpr (std::is_same_v<T, FVar>) {
          const VarDecl* d = m.find(n.name);
          if (d == nullptr)
            throw MalformedModel("undeclared variable '" + n.name + "'");
          return d->sort;
        } else if constexpr (std::is_same_v<T, FUnary>) {
          Sort want = n.op == UnaryOp::Neg ? Sort::Int : Sort::Bool;
          if (sort_of(m, n.operand) != want)
            throw MalformedModel("operand of '" + std::string(to_string(n.op)) + "' has wrong sort");
          return want;
        } else {
          Sort l = sort_of(m, n.lhs);
          Sort r = sort_of(m, n.rhs);
          auto need = [&](Sort s) {
            if (l != s || r != s)
              throw MalformedModel("operands of '" + std::string(to_string(n.op)) +
                                   "' have wrong sort");
          };
          if (is_arithmetic(n.op)) {
            need(Sort::Int);
            return Sort::Int;
          }
          if (is_logical(n.op)) {
            need(Sort::Bool);
            return Sort::Bool;
          }
          if (n.op == BinaryOp::Eq || n.op == BinaryOp::Ne) {
            if (l != r)
              throw MalformedModel("operands of '" + std::string(to_string(n.op)) +
                                   "' have different sorts");
            return Sort::Bool;
          }
          need(Sort::Int);
          return Sort::Bool;
        }
      },
      e->kind);
}

void ConstraintModel::validate() const {
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (v.name.empty())
      throw MalformedModel("variable with empty name");
    if (!seen.insert(v.name).second)
      throw MalformedModel("duplicate variable '" + v.name + "'");
  }
  for (const auto& c : constraints)
    if (sort_of(*this, c) != Sort::Bool)
      throw MalformedModel("constraint is not boolean: " + render_flat(c));
  if (objective && sort_of(*this, objective->expr) != Sort::Int)
    throw MalformedModel("objective is not an integer expression");
}

namespace {

void collect_vars(const FlatExpr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FVar>) {
          if (std::find(out.begin(), out.end(), n.name) == out.end())
            out.push_back(n.name);
        } else if constexpr (std::is_same_v<T, FUnary>) {
          collect_vars(n.operand, out);
        } else if constexpr (std::is_same_v<T, FBinary>) {
          collect_vars(n.lhs, out);
          collect_vars(n.rhs, out);
        }
      },
      e->kind);
}

std::string_view interchange_op(BinaryOp op) {
  switch (op) {
  case BinaryOp::And: return "/\\";
  case BinaryOp::Or: return "\\/";
  case BinaryOp::Implies: return "->";
  default: return to_string(op);
  }
}

void render(std::ostream& os, const FlatExpr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FInt>) {
          os << n.value;
        } else if constexpr (std::is_same_v<T, FBool>) {
          os << (n.value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, FVar>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, FUnary>) {
          os << '(' << (n.op == UnaryOp::Neg ? "-" : "not ");
          render(os, n.operand);
          os << ')';
        } else {
          os << '(';
          render(os, n.lhs);
          os << ' ' << interchange_op(n.op) << ' ';
          render(os, n.rhs);
          os << ')';
        }
      },
      e->kind);
}

} // namespace

std::vector<std::string> free_vars(const FlatExpr& e) {
  std::vector<std::string> out;
  collect_vars(e, out);
  return out;
}

std::string render_flat(const FlatExpr& e) {
  std::ostringstream os;
  render(os, e);
  return os.str();
}

std::string render_model(const ConstraintModel& m, Dialect dialect) {
  std::ostringstream os;
  if (dialect == Dialect::Interchange) {
    for (const auto& v : m.vars)
      os << "var " << to_string(v.sort) << " : " << v.name << ";\n";
    for (const auto& c : m.constraints) {
      os << "constraint ";
      render(os, c);
      os << ";\n";
    }
    if (m.objective) {
      os << "solve " << to_string(m.objective->sense) << ' ';
      render(os, m.objective->expr);
      os << ";\n";
    } else {
      os << "solve satisfy;\n";
    }
    return os.str();
  }

  os << "model: " << m.vars.size() << " variables, " << m.constraints.size()
     << " constraints\n";
  os << "variables:\n";
  for (const auto& v : m.vars)
    os << "  " << v.name << ": " << to_string(v.sort) << '\n';
  os << "constraints:\n";
  for (std::size_t i = 0; i < m.constraints.size(); ++i) {
    os << "  #" << i << "  ";
    render(os, m.constraints[i]);
    os << '\n';
  }
  if (m.objective) {
    os << "objective: " << to_string(m.objective->sense) << ' ';
    render(os, m.objective->expr);
    os << '\n';
  }
  return os.str();
}

} // namespace csx
