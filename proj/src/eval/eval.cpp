#include "csx/eval.hpp"

#include <limits>
#include <sstream>

namespace csx {

ModelValue& ModelValue::bind(std::string name, Value value) {
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return *this;
}

const Value* ModelValue::lookup(std::string_view name) const {
  for (std::size_t i = names_.size(); i-- > 0;)
    if (names_[i] == name)
      return &values_[i];
  return nullptr;
}

bool operator==(const ModelValue& a, const ModelValue& b) {
  return a.names_ == b.names_ && a.values_ == b.values_;
}

std::string to_string(const Value& v) {
  if (v.is_bool())
    return v.as_bool() ? "true" : "false";
  if (v.is_int())
    return std::to_string(v.as_int());
  std::string out = "{";
  const auto& m = v.as_model();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i)
      out += ", ";
    out += m.names()[i] + " = " + to_string(m.values()[i]);
  }
  return out + "}";
}

namespace {

using I128 = __int128;

Value from_int(I128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("integer overflow in evaluation");
  return Value(static_cast<std::int64_t>(v));
}

bool is_derived(DeclKind k) {
  return k == DeclKind::TypeDerived || k == DeclKind::ActionDerived ||
         k == DeclKind::DeviceDerived;
}

class Evaluator {
public:
  explicit Evaluator(const TypedSpec& tspec) : ts_(tspec) {}

  Value eval(const Expr& e, const EvalContext& c) {
    return std::visit([&](const auto& n) { return node(n, e, c); }, e->kind);
  }

private:
  Value node(const IntLit& n, const Expr&, const EvalContext&) { return Value(n.value); }
  Value node(const BoolLit& n, const Expr&, const EvalContext&) { return Value(n.value); }

  Value node(const Unary& n, const Expr&, const EvalContext& c) {
    Value v = eval(n.operand, c);
    if (n.op == UnaryOp::Not)
      return Value(!v.as_bool());
    return from_int(-static_cast<I128>(v.as_int()));
  }

  Value node(const Binary& n, const Expr&, const EvalContext& c) {
    if (is_logical(n.op)) {
      const bool l = eval(n.lhs, c).as_bool();
      if (n.op == BinaryOp::And && !l)
        return Value(false);
      if (n.op == BinaryOp::Or && l)
        return Value(true);
      if (n.op == BinaryOp::Implies && !l)
        return Value(true);
      return Value(eval(n.rhs, c).as_bool());
    }
    Value l = eval(n.lhs, c);
    Value r = eval(n.rhs, c);
    switch (n.op) {
    case BinaryOp::Eq: return Value(l == r);
    case BinaryOp::Ne: return Value(!(l == r));
    default: break;
    }
    const I128 a = l.as_int(), b = r.as_int();
    switch (n.op) {
    case BinaryOp::Add: return from_int(a + b);
    case BinaryOp::Sub: return from_int(a - b);
    case BinaryOp::Mul: return from_int(a * b); // |a|, |b| < 2^63 so the product fits
    case BinaryOp::Lt: return Value(a < b);
    case BinaryOp::Le: return Value(a <= b);
    case BinaryOp::Gt: return Value(a > b);
    case BinaryOp::Ge: return Value(a >= b);
    default: break;
    }
    throw std::logic_error("unsupported operator");
  }

  static const Value& lookup(const ModelValue* m, const std::string& name) {
    const Value* v = m ? m->lookup(name) : nullptr;
    if (v == nullptr)
      throw MissingBinding("no binding for '" + name + "'");
    return *v;
  }

  const Decl& decl(const Expr& e) {
    const Decl* d = ts_.decl_of(e);
    if (d == nullptr)
      throw std::logic_error("unresolved reference in evaluation");
    return *d;
  }

  Value node(const Ref& n, const Expr& e, const EvalContext& c) {
    const Decl& d = decl(e);
    switch (d.kind) {
    case DeclKind::TypeProp:
    case DeclKind::ActionParam:
    case DeclKind::ComponentParam: return lookup(c.local, n.name);
    case DeclKind::ActionLocParam: {
      if (c.renaming) {
        auto it = c.renaming->find(n.name);
        if (it != c.renaming->end())
          return lookup(c.root, it->second);
      }
      return lookup(c.root, n.name);
    }
    case DeclKind::DeviceLocation:
    case DeclKind::DeviceComponent: return lookup(c.root, n.name);
    case DeclKind::Self:
      if (c.local == nullptr)
        throw MissingBinding("no binding for 'self'");
      return Value(*c.local);
    case DeclKind::TypeDerived:
    case DeclKind::ActionDerived: return eval(ts_.derived(d).body, c);
    case DeclKind::DeviceDerived:
      return eval(ts_.derived(d).body, EvalContext{c.root, c.root, nullptr});
    }
    throw std::logic_error("unexpected declaration");
  }

  Value node(const Proj& n, const Expr& e, const EvalContext& c) {
    const Decl& d = decl(e);
    Value base = eval(n.base, c);
    if (!base.is_model())
      throw std::logic_error("projection off a primitive value");
    const ModelValue& m = base.as_model();
    if (!is_derived(d.kind))
      return lookup(&m, n.member);
    if (d.kind == DeclKind::TypeDerived)
      return eval(ts_.derived(d).body, EvalContext{c.root, &m, nullptr});
    // Action derived property through a component (or `self`).
    const Decl& bd = decl(n.base);
    const auto& comp = ts_.device(bd.owner).components.at(bd.index);
    Renaming r = component_renaming(ts_, comp);
    return eval(ts_.derived(d).body, EvalContext{c.root, &m, &r});
  }

  const TypedSpec& ts_;
};

bool has_sort(const Value& v, const std::string& prim) {
  return prim == "int" ? v.is_int() : v.is_bool();
}

class Checker {
public:
  Checker(const TypedSpec& tspec, const ModelValue& root) : ts_(tspec), root_(root), ev_(tspec) {}

  bool type_value(const TypeDef& t, const Value& v) {
    if (!v.is_model())
      return false;
    const ModelValue& m = v.as_model();
    for (const auto& p : t.props) {
      const Value* pv = m.lookup(p.name.text);
      if (pv == nullptr)
        throw MissingBinding("no binding for property '" + p.name.text + "'");
      if (p.type.is_primitive()) {
        if (!has_sort(*pv, p.type.name))
          return false;
      } else if (!type_value(ts_.type(p.type.name), *pv)) {
        return false;
      }
    }
    return all_true(t.constraints, EvalContext{&root_, &m, nullptr});
  }

  bool all_true(const std::vector<Expr>& cs, const EvalContext& c) {
    for (const auto& e : cs)
      if (!ev_.eval(e, c).as_bool())
        return false;
    return true;
  }

  bool device(const DeviceDef& d) {
    for (const auto& l : d.locations) {
      const Value* v = root_.lookup(l.name.text);
      if (v == nullptr)
        throw MissingBinding("no binding for location '" + l.name.text + "'");
      if (!type_value(ts_.type(l.type.name), *v))
        return false;
    }
    for (const auto& comp : d.components) {
      const Value* v = root_.lookup(comp.name.text);
      if (v == nullptr)
        throw MissingBinding("no binding for component '" + comp.name.text + "'");
      if (!v->is_model())
        return false;
      const ModelValue& m = v->as_model();
      const auto& action = ts_.action(comp.action.text);
      for (const auto& p : action.params) {
        const Value* pv = m.lookup(p.name.text);
        if (pv == nullptr)
          throw MissingBinding("no binding for parameter '" + comp.name.text + "." +
                               p.name.text + "'");
        if (!has_sort(*pv, p.type.name))
          return false;
      }
      Renaming r = component_renaming(ts_, comp);
      if (!all_true(action.constraints, EvalContext{&root_, &m, &r}))
        return false;
      if (!all_true(comp.constraints, EvalContext{&root_, &m, nullptr}))
        return false;
    }
    return all_true(d.constraints, EvalContext{&root_, &root_, nullptr});
  }

private:
  const TypedSpec& ts_;
  const ModelValue& root_;
  Evaluator ev_;
};

} // namespace

Value eval_expr(const TypedSpec& tspec, const Expr& e, const EvalContext& ctx) {
  return Evaluator(tspec).eval(e, ctx);
}

Value eval_in_device(const TypedSpec& tspec, const ModelValue& config, const Expr& e) {
  return eval_expr(tspec, e, EvalContext{&config, &config, nullptr});
}

bool satisfies(const TypedSpec& tspec, std::string_view device, const ModelValue& config) {
  return Checker(tspec, config).device(tspec.device(device));
}

const Value* value_at(const ModelValue& config, const std::vector<std::string>& path) {
  const ModelValue* m = &config;
  const Value* v = nullptr;
  for (const auto& part : path) {
    if (m == nullptr)
      return nullptr;
    v = m->lookup(part);
    if (v == nullptr)
      return nullptr;
    m = v->is_model() ? &v->as_model() : nullptr;
  }
  return v;
}

fd::Assignment flatten(const TypedSpec& tspec, std::string_view device, const ModelValue& config) {
  fd::Assignment a;
  for (const auto& leaf : device_leaves(tspec, tspec.device(device))) {
    const Value* v = value_at(config, leaf.path);
    if (v == nullptr)
      throw MissingBinding("no binding for '" + leaf.dotted() + "'");
    if (v->is_int())
      a.set(qualified_name(leaf.path), v->as_int());
    else if (v->is_bool())
      a.set(qualified_name(leaf.path), v->as_bool());
    else
      throw MissingBinding("'" + leaf.dotted() + "' is not a primitive value");
  }
  return a;
}

namespace {

ModelValue lift_type(const TypedSpec& tspec, const TypeDef& t, Namespace& ns,
                     const fd::Assignment& a) {
  ModelValue m;
  for (const auto& p : t.props) {
    ns.push_back(p.name.text);
    if (p.type.is_primitive()) {
      const auto name = qualified_name(ns);
      const fd::Scalar* s = a.find(name);
      if (s == nullptr)
        throw MissingBinding("assignment has no value for '" + name + "'");
      if (const auto* b = std::get_if<bool>(s))
        m.bind(p.name.text, Value(*b));
      else
        m.bind(p.name.text, Value(std::get<std::int64_t>(*s)));
    } else {
      m.bind(p.name.text, lift_type(tspec, tspec.type(p.type.name), ns, a));
    }
    ns.pop_back();
  }
  return m;
}

} // namespace

ModelValue lift(const TypedSpec& tspec, std::string_view device, const fd::Assignment& a) {
  const DeviceDef& d = tspec.device(device);
  ModelValue root;
  for (const auto& l : d.locations) {
    Namespace ns{l.name.text};
    root.bind(l.name.text, lift_type(tspec, tspec.type(l.type.name), ns, a));
  }
  for (const auto& comp : d.components) {
    ModelValue m;
    for (const auto& p : tspec.action(comp.action.text).params) {
      const auto name = qualified_name({comp.name.text, p.name.text});
      const fd::Scalar* s = a.find(name);
      if (s == nullptr)
        throw MissingBinding("assignment has no value for '" + name + "'");
      if (const auto* b = std::get_if<bool>(s))
        m.bind(p.name.text, Value(*b));
      else
        m.bind(p.name.text, Value(std::get<std::int64_t>(*s)));
    }
    root.bind(comp.name.text, std::move(m));
  }
  return root;
}

std::vector<ModelValue> enumerate(const TypedSpec& tspec, std::string_view device,
                                  const fd::DomainBox& box, std::uint64_t max_space) {
  const auto leaves = device_leaves(tspec, tspec.device(device));
  struct Axis {
    std::string name;
    bool is_bool;
    std::int64_t lo, hi;
  };
  std::vector<Axis> axes;
  long double space = 1;
  for (const auto& leaf : leaves) {
    Axis ax{qualified_name(leaf.path), leaf.sort == Sort::Bool, 0, 1};
    if (ax.is_bool) {
      if (auto fixed = box.bool_fixed(ax.name))
        ax.lo = ax.hi = *fixed;
    } else {
      auto dom = box.int_domain(ax.name);
      ax.lo = dom.lo;
      ax.hi = dom.hi;
    }
    if (ax.lo > ax.hi)
      return {};
    space *= static_cast<long double>(ax.hi - ax.lo + 1);
    if (space > static_cast<long double>(max_space))
      throw SpaceTooLarge("configuration space exceeds " + std::to_string(max_space) +
                          " candidates");
    axes.push_back(ax);
  }

  std::vector<ModelValue> out;
  std::vector<std::int64_t> cur;
  for (const auto& ax : axes)
    cur.push_back(ax.lo);
  while (true) {
    fd::Assignment a;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      if (axes[i].is_bool)
        a.set(axes[i].name, cur[i] != 0);
      else
        a.set(axes[i].name, cur[i]);
    }
    ModelValue m = lift(tspec, device, a);
    if (satisfies(tspec, device, m))
      out.push_back(std::move(m));
    // Odometer: the last leaf varies fastest.
    std::size_t i = axes.size();
    while (i > 0) {
      --i;
      if (cur[i] < axes[i].hi) {
        ++cur[i];
        break;
      }
      cur[i] = axes[i].lo;
      if (i == 0)
        return out;
    }
    if (axes.empty())
      return out;
  }
}

} // namespace csx
