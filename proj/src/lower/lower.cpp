#include "csx/lower.hpp"

#include <stdexcept>

namespace csx {
namespace {

struct Ctx {
  Namespace ns;
  Renaming r;
};

bool is_derived(DeclKind k) {
  return k == DeclKind::TypeDerived || k == DeclKind::ActionDerived ||
         k == DeclKind::DeviceDerived;
}

Namespace extend(Namespace ns, const std::string& part) {
  ns.push_back(part);
  return ns;
}

class Lowerer {
public:
  explicit Lowerer(const TypedSpec& tspec) : ts_(tspec) {}

  FlatExpr value(const Expr& e, const Ctx& c) {
    return std::visit(
        [&](const auto& n) -> FlatExpr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return fint(n.value);
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return fbool(n.value);
          } else if constexpr (std::is_same_v<T, Unary>) {
            return funary(n.op, value(n.operand, c));
          } else if constexpr (std::is_same_v<T, Binary>) {
            return fbinary(n.op, value(n.lhs, c), value(n.rhs, c));
          } else {
            const Decl& d = decl(e);
            if (is_derived(d.kind)) {
              auto [body, inner] = derived_target(e, d, c);
              return value(body, inner);
            }
            return fvar(qualified_name(path(e, c)));
          }
        },
        e->kind);
  }

  // Qualified name parts of a reference or projection that denotes a
  // location, component, property or parameter.
  Namespace path(const Expr& e, const Ctx& c) {
    const Decl& d = decl(e);
    if (is_derived(d.kind)) {
      auto [body, inner] = derived_target(e, d, c);
      return path(body, inner);
    }
    if (const auto* ref = std::get_if<Ref>(&e->kind)) {
      switch (d.kind) {
      case DeclKind::TypeProp:
      case DeclKind::ActionParam:
      case DeclKind::ComponentParam: return extend(c.ns, ref->name);
      case DeclKind::ActionLocParam: {
        auto it = c.r.find(ref->name);
        return {it != c.r.end() ? it->second : ref->name};
      }
      case DeclKind::DeviceLocation:
      case DeclKind::DeviceComponent: return {ref->name};
      case DeclKind::Self: return c.ns;
      default: break;
      }
    } else if (const auto* proj = std::get_if<Proj>(&e->kind)) {
      return extend(path(proj->base, c), proj->member);
    }
    throw std::logic_error("expression does not denote a named value");
  }

  void location(ConstraintModel& m, const Namespace& ns, const TypeDef& type) {
    for (const auto& p : type.props) {
      Namespace sub = extend(ns, p.name.text);
      if (p.type.name == "int")
        m.vars.push_back({qualified_name(sub), Sort::Int});
      else if (p.type.name == "bool")
        m.vars.push_back({qualified_name(sub), Sort::Bool});
      else
        location(m, sub, ts_.type(p.type.name));
    }
    Ctx c{ns, {}};
    for (const auto& con : type.constraints)
      m.constraints.push_back(value(con, c));
  }

  void params(ConstraintModel& m, const Namespace& ns, const ActionDef& action) {
    for (const auto& p : action.params)
      m.vars.push_back({qualified_name(extend(ns, p.name.text)),
                        p.type.name == "int" ? Sort::Int : Sort::Bool});
  }

private:
  const Decl& decl(const Expr& e) {
    const Decl* d = ts_.decl_of(e);
    if (d == nullptr)
      throw std::logic_error("unresolved reference in lowering");
    return *d;
  }

  // Body of the referenced derived property and the context of its owner.
  std::pair<Expr, Ctx> derived_target(const Expr& e, const Decl& d, const Ctx& c) {
    const Expr& body = ts_.derived(d).body;
    const auto* proj = std::get_if<Proj>(&e->kind);
    if (d.kind == DeclKind::DeviceDerived)
      return {body, Ctx{}};
    if (proj == nullptr)
      return {body, c};
    Namespace base = path(proj->base, c);
    if (d.kind == DeclKind::TypeDerived)
      return {body, Ctx{base, {}}};
    const Decl& bd = decl(proj->base);
    const auto& comp = ts_.device(bd.owner).components.at(bd.index);
    return {body, Ctx{base, component_renaming(ts_, comp)}};
  }

  const TypedSpec& ts_;
};

} // namespace

Renaming component_renaming(const TypedSpec& tspec, const ComponentDef& comp) {
  const auto& action = tspec.action(comp.action.text);
  Renaming r;
  for (std::size_t i = 0; i < action.loc_params.size() && i < comp.loc_args.size(); ++i)
    r[action.loc_params[i].name.text] = comp.loc_args[i].text;
  return r;
}

FlatExpr lower_expr(const TypedSpec& tspec, const Expr& e, const Namespace& ns,
                    const Renaming& r) {
  return Lowerer(tspec).value(e, Ctx{ns, r});
}

FlatExpr lower_device_expr(const TypedSpec& tspec, const Expr& e) {
  return lower_expr(tspec, e, {}, {});
}

ConstraintModel lower_device(const TypedSpec& tspec, std::string_view device) {
  const DeviceDef& d = tspec.device(device);
  Lowerer lw(tspec);
  ConstraintModel m;
  for (const auto& l : d.locations)
    lw.location(m, {l.name.text}, tspec.type(l.type.name));
  for (const auto& comp : d.components) {
    const auto& action = tspec.action(comp.action.text);
    Namespace ns{comp.name.text};
    lw.params(m, ns, action);
    Ctx inst{ns, component_renaming(tspec, comp)};
    for (const auto& c : action.constraints)
      m.constraints.push_back(lw.value(c, inst));
    Ctx own{ns, {}};
    for (const auto& c : comp.constraints)
      m.constraints.push_back(lw.value(c, own));
  }
  for (const auto& c : d.constraints)
    m.constraints.push_back(lw.value(c, Ctx{}));
  return m;
}

ConstraintModel lower_type_inhabitance(const TypedSpec& tspec, std::string_view type) {
  Lowerer lw(tspec);
  ConstraintModel m;
  lw.location(m, {std::string(kInhab)}, tspec.type(type));
  return m;
}

ConstraintModel lower_action_inhabitance(const TypedSpec& tspec, std::string_view action) {
  const ActionDef& a = tspec.action(action);
  Lowerer lw(tspec);
  ConstraintModel m;
  Renaming identity;
  for (const auto& l : a.loc_params) {
    lw.location(m, {l.name.text}, tspec.type(l.type.name));
    identity[l.name.text] = l.name.text;
  }
  Namespace ns{std::string(kInhab)};
  lw.params(m, ns, a);
  for (const auto& c : a.constraints)
    m.constraints.push_back(lw.value(c, Ctx{ns, identity}));
  return m;
}

} // namespace csx
