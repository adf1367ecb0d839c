#include "csx/syntax.hpp"

#include <sstream>

namespace csx {
namespace {

// Binding strength, loosest first. Mirrors the parser's precedence climb.
enum Prec : int {
  kImplies = 1,
  kOr = 2,
  kAnd = 3,
  kNot = 4,
  kCmp = 5,
  kAdd = 6,
  kMul = 7,
  kNeg = 8,
  kAtom = 9,
};

int binary_prec(BinaryOp op) {
  switch (op) {
  case BinaryOp::Implies: return kImplies;
  case BinaryOp::Or: return kOr;
  case BinaryOp::And: return kAnd;
  case BinaryOp::Add:
  case BinaryOp::Sub: return kAdd;
  case BinaryOp::Mul: return kMul;
  default: return kCmp;
  }
}

int prec(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>)
          return n.value < 0 ? kNeg : kAtom;
        else if constexpr (std::is_same_v<T, Unary>)
          return n.op == UnaryOp::Neg ? kNeg : kNot;
        else if constexpr (std::is_same_v<T, Binary>)
          return binary_prec(n.op);
        else
          return kAtom;
      },
      e->kind);
}

void print(std::ostream& os, const Expr& e);

void print_at(std::ostream& os, const Expr& e, int min_prec) {
  if (prec(e) < min_prec) {
    os << '(';
    print(os, e);
    os << ')';
  } else {
    print(os, e);
  }
}

std::string to_text(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

void print(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          os << n.value;
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          os << (n.value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, Ref>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, Proj>) {
          print_at(os, n.base, kAtom);
          os << '.' << n.member;
        } else if constexpr (std::is_same_v<T, Unary>) {
          if (n.op == UnaryOp::Not) {
            os << "not ";
            print_at(os, n.operand, kNot);
          } else {
            // `-5` would read back as a negative literal.
            std::string inner = to_text(n.operand);
            bool digit_start = !inner.empty() && inner.front() >= '0' && inner.front() <= '9';
            os << '-';
            if (digit_start || prec(n.operand) < kNeg)
              os << '(' << inner << ')';
            else
              os << inner;
          }
        } else if constexpr (std::is_same_v<T, Binary>) {
          const int p = binary_prec(n.op);
          int left = p;
          int right = p + 1;
          if (n.op == BinaryOp::Implies) {
            left = p + 1;
            right = p;
          } else if (p == kCmp) {
            left = p + 1;
          }
          print_at(os, n.lhs, left);
          os << ' ' << to_string(n.op) << ' ';
          print_at(os, n.rhs, right);
        }
      },
      e->kind);
}

void print_constraints(std::ostream& os, const std::vector<Expr>& cs, const char* indent) {
  for (const auto& c : cs) {
    os << indent << '[';
    print(os, c);
    os << "]\n";
  }
}

void print_derived(std::ostream& os, const std::vector<DerivedDef>& ds) {
  for (const auto& d : ds) {
    os << "  derived " << d.name.text << " = ";
    print(os, d.body);
    os << '\n';
  }
}

} // namespace

std::string pretty_print(const Expr& expr) { return to_text(expr); }

std::string pretty_print(const Spec& spec) {
  std::ostringstream os;
  bool first = true;
  auto separate = [&] {
    if (!first)
      os << '\n';
    first = false;
  };

  for (const auto& t : spec.types) {
    separate();
    os << "type " << t.name.text << " {\n";
    for (const auto& p : t.props)
      os << "  " << p.name.text << ": " << p.type.name << '\n';
    print_derived(os, t.derived);
    print_constraints(os, t.constraints, "  ");
    os << "}\n";
  }

  for (const auto& a : spec.actions) {
    separate();
    os << "action " << a.name.text << '(';
    for (std::size_t i = 0; i < a.loc_params.size(); ++i) {
      if (i)
        os << ", ";
      os << a.loc_params[i].name.text << ": " << a.loc_params[i].type.name;
    }
    os << ") {\n";
    for (const auto& p : a.params)
      os << "  parameter " << p.name.text << ": " << p.type.name << '\n';
    print_derived(os, a.derived);
    print_constraints(os, a.constraints, "  ");
    os << "}\n";
  }

  for (const auto& d : spec.devices) {
    separate();
    os << "device " << d.name.text << " {\n";
    for (const auto& l : d.locations)
      os << "  location " << l.name.text << ": " << l.type.name << '\n';
    for (const auto& c : d.components) {
      os << "  component " << c.name.text << " = " << c.action.text << '(';
      for (std::size_t i = 0; i < c.loc_args.size(); ++i) {
        if (i)
          os << ", ";
        os << c.loc_args[i].text;
      }
      os << ')';
      if (c.constraints.empty()) {
        os << '\n';
      } else {
        os << " {\n";
        print_constraints(os, c.constraints, "    ");
        os << "  }\n";
      }
    }
    print_derived(os, d.derived);
    print_constraints(os, d.constraints, "  ");
    os << "}\n";
  }

  for (const auto& s : spec.scenarios) {
    separate();
    os << "scenario " << s.name.text << " for " << s.device.text << " {\n";
    for (const auto& b : s.bindings)
      os << "  " << b.path.str() << " = " << to_string(b.value) << '\n';
    print_constraints(os, s.constraints, "  ");
    if (s.objective) {
      os << "  objective " << to_string(s.objective->sense) << ' ';
      print(os, s.objective->expr);
      os << '\n';
    }
    for (const auto& e : s.expectations) {
      os << "  expect [";
      print(os, e);
      os << "]\n";
    }
    os << "}\n";
  }
  return os.str();
}

} // namespace csx
