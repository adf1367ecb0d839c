#include "csx/sema.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace csx {

std::string Ty::str() const {
  switch (kind) {
  case Kind::Int: return "int";
  case Kind::Bool: return "bool";
  case Kind::Record: return name;
  case Kind::Component: return "component of " + name;
  case Kind::Error: return "<error>";
  }
  return "?";
}

Ty type_of_ref(const TypeRef& ref) {
  if (ref.name == "int")
    return Ty::integer();
  if (ref.name == "bool")
    return Ty::boolean();
  return Ty::record(ref.name);
}

const ExprInfo* Annotations::find(const ExprNode* node) const {
  for (const Annotations* a = this; a != nullptr; a = a->parent_.get()) {
    auto it = a->map_.find(node);
    if (it != a->map_.end())
      return &it->second;
  }
  return nullptr;
}

const ExprInfo& TypedSpec::info(const Expr& e) const {
  const ExprInfo* info = ann_->find(e.get());
  if (info == nullptr)
    throw std::logic_error("expression was not analyzed");
  return *info;
}

const Decl* TypedSpec::decl_of(const Expr& e) const {
  const auto& i = info(e);
  return i.decl ? &*i.decl : nullptr;
}

const TypeDef& TypedSpec::type(std::string_view name) const {
  if (const auto* t = spec_->find_type(name))
    return *t;
  throw std::out_of_range("unknown type '" + std::string(name) + "'");
}

const ActionDef& TypedSpec::action(std::string_view name) const {
  if (const auto* a = spec_->find_action(name))
    return *a;
  throw std::out_of_range("unknown action '" + std::string(name) + "'");
}

const DeviceDef& TypedSpec::device(std::string_view name) const {
  if (const auto* d = spec_->find_device(name))
    return *d;
  throw std::out_of_range("unknown device '" + std::string(name) + "'");
}

const DerivedDef& TypedSpec::derived(const Decl& decl) const {
  switch (decl.kind) {
  case DeclKind::TypeDerived: return type(decl.owner).derived.at(decl.index);
  case DeclKind::ActionDerived: return action(decl.owner).derived.at(decl.index);
  case DeclKind::DeviceDerived: return device(decl.owner).derived.at(decl.index);
  default: throw std::logic_error("declaration is not a derived property");
  }
}

namespace {

struct Scope {
  enum class Kind { Type, Action, Component, Device };
  Kind kind;
  const TypeDef* type = nullptr;
  const ActionDef* action = nullptr;
  const DeviceDef* device = nullptr;
  std::size_t component = 0;
};

template <class T>
std::optional<std::size_t> index_of(const std::vector<T>& items, std::string_view name) {
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].name.text == name)
      return i;
  return std::nullopt;
}

class Analyzer {
public:
  Analyzer(const Spec& spec, Annotations& ann, std::vector<Diagnostic>& diags)
      : spec_(spec), ann_(ann), diags_(diags) {}

  void run() {
    check_unique_top_level();
    for (const auto& t : spec_.types)
      check_type(t);
    for (const auto& a : spec_.actions)
      check_action(a);
    for (const auto& d : spec_.devices)
      check_device(d);
    for (const auto& s : spec_.scenarios)
      check_scenario(s);
  }

  Ty check_in_device(const DeviceDef& device, const Expr& e) {
    return check(e, Scope{Scope::Kind::Device, nullptr, nullptr, &device});
  }

private:
  void error(Span span, std::string message) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(message), span});
  }

  // --- definitions --------------------------------------------------------

  void check_unique_top_level() {
    auto unique = [&](const auto& defs, const char* kind) {
      std::map<std::string, bool> seen;
      for (const auto& d : defs) {
        if (!seen.emplace(d.name.text, true).second)
          error(d.name.span, std::string("duplicate ") + kind + " '" + d.name.text + "'");
      }
    };
    unique(spec_.types, "type");
    unique(spec_.actions, "action");
    unique(spec_.devices, "device");
    unique(spec_.scenarios, "scenario");
  }

  void check_member_names(const std::vector<const Ident*>& names) {
    std::map<std::string, bool> seen;
    for (const Ident* n : names)
      if (!seen.emplace(n->text, true).second)
        error(n->span, "duplicate member '" + n->text + "'");
  }

  void check_field_type(const Field& f, bool allow_prim, bool allow_user) {
    if (f.type.is_primitive()) {
      if (!allow_prim)
        error(f.type.span, "'" + f.name.text + "' must have a user-defined type, found " +
                               f.type.name);
      return;
    }
    if (!allow_user) {
      error(f.type.span, "parameter '" + f.name.text + "' must have type int or bool");
      return;
    }
    if (spec_.find_type(f.type.name) == nullptr)
      error(f.type.span, "unknown type '" + f.type.name + "'");
  }

  void check_constraint(const Expr& e, const Scope& scope) {
    Ty t = check(e, scope);
    if (t.kind != Ty::Kind::Bool && t.kind != Ty::Kind::Error)
      error(e->span, "constraint must be of type bool, found " + t.str());
  }

  void check_type(const TypeDef& t) {
    std::vector<const Ident*> names;
    for (const auto& p : t.props)
      names.push_back(&p.name);
    for (const auto& d : t.derived)
      names.push_back(&d.name);
    check_member_names(names);
    for (const auto& p : t.props)
      check_field_type(p, true, true);
    Scope scope{Scope::Kind::Type, &t};
    for (std::size_t i = 0; i < t.derived.size(); ++i)
      derived_type(DeclKind::TypeDerived, t.name.text, i);
    for (const auto& c : t.constraints)
      check_constraint(c, scope);
  }

  void check_action(const ActionDef& a) {
    std::vector<const Ident*> names;
    for (const auto& p : a.loc_params)
      names.push_back(&p.name);
    for (const auto& p : a.params)
      names.push_back(&p.name);
    for (const auto& d : a.derived)
      names.push_back(&d.name);
    check_member_names(names);
    for (const auto& p : a.loc_params)
      check_field_type(p, false, true);
    for (const auto& p : a.params)
      check_field_type(p, true, false);
    Scope scope{Scope::Kind::Action, nullptr, &a};
    for (std::size_t i = 0; i < a.derived.size(); ++i)
      derived_type(DeclKind::ActionDerived, a.name.text, i);
    for (const auto& c : a.constraints)
      check_constraint(c, scope);
  }

  void check_device(const DeviceDef& d) {
    std::vector<const Ident*> names;
    for (const auto& l : d.locations)
      names.push_back(&l.name);
    for (const auto& c : d.components)
      names.push_back(&c.name);
    for (const auto& x : d.derived)
      names.push_back(&x.name);
    check_member_names(names);
    for (const auto& l : d.locations)
      check_field_type(l, false, true);

    for (std::size_t ci = 0; ci < d.components.size(); ++ci) {
      const auto& comp = d.components[ci];
      const ActionDef* action = spec_.find_action(comp.action.text);
      if (action == nullptr) {
        error(comp.action.span, "unknown action '" + comp.action.text + "'");
      } else {
        if (comp.loc_args.size() != action->loc_params.size()) {
          error(comp.span, "component '" + comp.name.text + "' passes " +
                               std::to_string(comp.loc_args.size()) + " locations but action '" +
                               action->name.text + "' expects " +
                               std::to_string(action->loc_params.size()));
        }
        const std::size_t n = std::min(comp.loc_args.size(), action->loc_params.size());
        for (std::size_t i = 0; i < n; ++i) {
          const auto& arg = comp.loc_args[i];
          auto li = index_of(d.locations, arg.text);
          if (!li) {
            error(arg.span, "unknown location '" + arg.text + "'");
            continue;
          }
          const auto& have = d.locations[*li].type.name;
          const auto& want = action->loc_params[i].type.name;
          if (have != want)
            error(arg.span, "type mismatch: location '" + arg.text + "' has type " + have +
                                " but action '" + action->name.text + "' expects " + want +
                                " for '" + action->loc_params[i].name.text + "'");
        }
        for (const auto& p : action->params) {
          if (index_of(d.locations, p.name.text))
            error(comp.name.span, "parameter '" + p.name.text + "' of component '" +
                                      comp.name.text + "' shadows location '" + p.name.text +
                                      "'");
        }
      }
      Scope scope{Scope::Kind::Component, nullptr, nullptr, &d, ci};
      for (const auto& c : comp.constraints)
        check_constraint(c, scope);
    }

    Scope scope{Scope::Kind::Device, nullptr, nullptr, &d};
    for (std::size_t i = 0; i < d.derived.size(); ++i)
      derived_type(DeclKind::DeviceDerived, d.name.text, i);
    for (const auto& c : d.constraints)
      check_constraint(c, scope);
  }

  void check_scenario(const ScenarioDef& s) {
    const DeviceDef* device = spec_.find_device(s.device.text);
    if (device == nullptr) {
      error(s.device.span, "unknown device '" + s.device.text + "'");
      return;
    }
    Scope scope{Scope::Kind::Device, nullptr, nullptr, device};
    for (const auto& b : s.bindings) {
      auto res = resolve_leaf_in(*device, b.path);
      if (!res.leaf) {
        error(b.path.span(), res.error);
        continue;
      }
      const bool is_bool = std::holds_alternative<bool>(b.value);
      if (is_bool != (res.leaf->sort == Sort::Bool))
        error(b.path.span(), "type mismatch: '" + b.path.str() + "' has type " +
                                 std::string(to_string(res.leaf->sort)) + " but is bound to " +
                                 to_string(b.value));
    }
    for (const auto& c : s.constraints)
      check_constraint(c, scope);
    if (s.objective) {
      Ty t = check(s.objective->expr, scope);
      if (t.kind != Ty::Kind::Int && t.kind != Ty::Kind::Error)
        error(s.objective->expr->span, "objective must be of type int, found " + t.str());
    }
    for (const auto& e : s.expectations)
      check_constraint(e, scope);
  }

public:
  LeafResolution resolve_leaf_in(const DeviceDef& device, const Path& path) {
    LeafResolution res;
    if (path.parts.empty()) {
      res.error = "empty path";
      return res;
    }
    const auto& root = path.parts.front().text;
    std::vector<std::string> parts{root};
    if (auto li = index_of(device.locations, root)) {
      const TypeDef* t = spec_.find_type(device.locations[*li].type.name);
      for (std::size_t i = 1; i < path.parts.size(); ++i) {
        const auto& m = path.parts[i].text;
        if (t == nullptr) {
          res.error = "'" + path.str() + "' projects past a primitive value";
          return res;
        }
        auto pi = index_of(t->props, m);
        if (!pi) {
          res.error = "type " + t->name.text + " has no defining property '" + m + "'";
          return res;
        }
        parts.push_back(m);
        const auto& ty = t->props[*pi].type;
        if (ty.is_primitive()) {
          if (i + 1 != path.parts.size()) {
            res.error = "'" + path.str() + "' projects past a primitive value";
            return res;
          }
          res.leaf = Leaf{parts, ty.name == "int" ? Sort::Int : Sort::Bool};
          return res;
        }
        t = spec_.find_type(ty.name);
      }
      res.error = "'" + path.str() + "' does not name a primitive property";
      return res;
    }
    if (auto ci = index_of(device.components, root)) {
      const ActionDef* a = spec_.find_action(device.components[*ci].action.text);
      if (a == nullptr || path.parts.size() != 2) {
        res.error = "'" + path.str() + "' does not name a component parameter";
        return res;
      }
      auto pi = index_of(a->params, path.parts[1].text);
      if (!pi) {
        res.error = "action " + a->name.text + " has no parameter '" + path.parts[1].text + "'";
        return res;
      }
      parts.push_back(path.parts[1].text);
      res.leaf = Leaf{parts, a->params[*pi].type.name == "int" ? Sort::Int : Sort::Bool};
      return res;
    }
    res.error = "device " + device.name.text + " has no location or component '" + root + "'";
    return res;
  }

private:
  // --- expressions --------------------------------------------------------

  struct Resolved {
    Ty type;
    std::optional<Decl> decl;
  };

  Ty field_ty(const Field& f) {
    Ty t = type_of_ref(f.type);
    if (t.kind == Ty::Kind::Record && spec_.find_type(t.name) == nullptr)
      return Ty::error();
    return t;
  }

  Ty component_ty(const ComponentDef& c) {
    if (spec_.find_action(c.action.text) == nullptr)
      return Ty::error();
    return Ty::component(c.action.text);
  }

  std::optional<Resolved> lookup_device(const DeviceDef& d, const std::string& name) {
    const auto& owner = d.name.text;
    if (auto i = index_of(d.locations, name))
      return Resolved{field_ty(d.locations[*i]), Decl{DeclKind::DeviceLocation, owner, *i}};
    if (auto i = index_of(d.components, name))
      return Resolved{component_ty(d.components[*i]), Decl{DeclKind::DeviceComponent, owner, *i}};
    if (auto i = index_of(d.derived, name))
      return Resolved{derived_type(DeclKind::DeviceDerived, owner, *i),
                      Decl{DeclKind::DeviceDerived, owner, *i}};
    return std::nullopt;
  }

  std::optional<Resolved> lookup(const std::string& name, const Scope& scope) {
    switch (scope.kind) {
    case Scope::Kind::Type: {
      const auto& t = *scope.type;
      if (auto i = index_of(t.props, name))
        return Resolved{field_ty(t.props[*i]), Decl{DeclKind::TypeProp, t.name.text, *i}};
      if (auto i = index_of(t.derived, name))
        return Resolved{derived_type(DeclKind::TypeDerived, t.name.text, *i),
                        Decl{DeclKind::TypeDerived, t.name.text, *i}};
      return std::nullopt;
    }
    case Scope::Kind::Action: {
      const auto& a = *scope.action;
      if (auto i = index_of(a.loc_params, name))
        return Resolved{field_ty(a.loc_params[*i]),
                        Decl{DeclKind::ActionLocParam, a.name.text, *i}};
      if (auto i = index_of(a.params, name))
        return Resolved{field_ty(a.params[*i]), Decl{DeclKind::ActionParam, a.name.text, *i}};
      if (auto i = index_of(a.derived, name))
        return Resolved{derived_type(DeclKind::ActionDerived, a.name.text, *i),
                        Decl{DeclKind::ActionDerived, a.name.text, *i}};
      return std::nullopt;
    }
    case Scope::Kind::Component: {
      const auto& d = *scope.device;
      const auto& comp = d.components[scope.component];
      if (const ActionDef* a = spec_.find_action(comp.action.text)) {
        if (auto i = index_of(a->params, name))
          return Resolved{field_ty(a->params[*i]),
                          Decl{DeclKind::ComponentParam, d.name.text, scope.component, *i}};
      }
      return lookup_device(d, name);
    }
    case Scope::Kind::Device: return lookup_device(*scope.device, name);
    }
    return std::nullopt;
  }

  Ty derived_type(DeclKind kind, const std::string& owner, std::size_t index) {
    auto key = std::make_tuple(static_cast<int>(kind), owner, index);
    auto it = derived_types_.find(key);
    if (it != derived_types_.end())
      return it->second.value_or(Ty::error()); // in progress: a cycle, reported separately
    derived_types_[key] = std::nullopt;

    Ty result = Ty::error();
    switch (kind) {
    case DeclKind::TypeDerived: {
      const TypeDef* t = spec_.find_type(owner);
      result = check(t->derived[index].body, Scope{Scope::Kind::Type, t});
      break;
    }
    case DeclKind::ActionDerived: {
      const ActionDef* a = spec_.find_action(owner);
      result = check(a->derived[index].body, Scope{Scope::Kind::Action, nullptr, a});
      break;
    }
    case DeclKind::DeviceDerived: {
      const DeviceDef* d = spec_.find_device(owner);
      result = check(d->derived[index].body, Scope{Scope::Kind::Device, nullptr, nullptr, d});
      break;
    }
    default: break;
    }
    derived_types_[key] = result;
    return result;
  }

  Ty check(const Expr& e, const Scope& scope) {
    if (const ExprInfo* done = ann_.find(e.get()))
      return done->type;
    Resolved r = std::visit([&](const auto& n) { return check_node(n, e, scope); }, e->kind);
    ann_.set(e.get(), ExprInfo{r.type, r.decl});
    return r.type;
  }

  Resolved check_node(const IntLit&, const Expr&, const Scope&) { return {Ty::integer(), {}}; }
  Resolved check_node(const BoolLit&, const Expr&, const Scope&) { return {Ty::boolean(), {}}; }

  Resolved check_node(const Ref& ref, const Expr& e, const Scope& scope) {
    if (ref.name == "self") {
      if (scope.kind != Scope::Kind::Component) {
        error(e->span, "'self' is only valid inside a component block");
        return {Ty::error(), {}};
      }
      const auto& comp = scope.device->components[scope.component];
      return {component_ty(comp), Decl{DeclKind::Self, scope.device->name.text, scope.component}};
    }
    if (auto r = lookup(ref.name, scope))
      return *r;
    error(e->span, "unresolved name '" + ref.name + "'");
    return {Ty::error(), {}};
  }

  Resolved check_node(const Proj& proj, const Expr& e, const Scope& scope) {
    Ty base = check(proj.base, scope);
    switch (base.kind) {
    case Ty::Kind::Error: return {Ty::error(), {}};
    case Ty::Kind::Int:
    case Ty::Kind::Bool:
      error(e->span, "projection '." + proj.member + "' off primitive type " + base.str());
      return {Ty::error(), {}};
    case Ty::Kind::Record: {
      const TypeDef* t = spec_.find_type(base.name);
      if (auto i = index_of(t->props, proj.member))
        return {field_ty(t->props[*i]), Decl{DeclKind::TypeProp, t->name.text, *i}};
      if (auto i = index_of(t->derived, proj.member))
        return {derived_type(DeclKind::TypeDerived, t->name.text, *i),
                Decl{DeclKind::TypeDerived, t->name.text, *i}};
      error(e->span, "type " + t->name.text + " has no property '" + proj.member + "'");
      return {Ty::error(), {}};
    }
    case Ty::Kind::Component: {
      const ActionDef* a = spec_.find_action(base.name);
      if (auto i = index_of(a->params, proj.member))
        return {field_ty(a->params[*i]), Decl{DeclKind::ActionParam, a->name.text, *i}};
      if (auto i = index_of(a->derived, proj.member))
        return {derived_type(DeclKind::ActionDerived, a->name.text, *i),
                Decl{DeclKind::ActionDerived, a->name.text, *i}};
      error(e->span, "action " + a->name.text + " has no parameter '" + proj.member + "'");
      return {Ty::error(), {}};
    }
    }
    return {Ty::error(), {}};
  }

  Resolved check_node(const Unary& u, const Expr& e, const Scope& scope) {
    Ty t = check(u.operand, scope);
    Ty want = u.op == UnaryOp::Neg ? Ty::integer() : Ty::boolean();
    if (t.kind == Ty::Kind::Error)
      return {want, {}};
    if (t != want)
      error(e->span, "type mismatch: operator '" + std::string(to_string(u.op)) + "' expects " +
                         want.str() + ", found " + t.str());
    return {want, {}};
  }

  Resolved check_node(const Binary& b, const Expr& e, const Scope& scope) {
    Ty l = check(b.lhs, scope);
    Ty r = check(b.rhs, scope);
    const bool poisoned = l.kind == Ty::Kind::Error || r.kind == Ty::Kind::Error;
    auto mismatch = [&](const std::string& expects) {
      error(e->span, "type mismatch: operator '" + std::string(to_string(b.op)) + "' expects " +
                         expects + ", found " + l.str() + " and " + r.str());
    };
    if (is_arithmetic(b.op)) {
      if (!poisoned && (l.kind != Ty::Kind::Int || r.kind != Ty::Kind::Int))
        mismatch("int operands");
      return {Ty::integer(), {}};
    }
    if (is_logical(b.op)) {
      if (!poisoned && (l.kind != Ty::Kind::Bool || r.kind != Ty::Kind::Bool))
        mismatch("bool operands");
      return {Ty::boolean(), {}};
    }
    if (b.op == BinaryOp::Eq || b.op == BinaryOp::Ne) {
      if (!poisoned && (l != r || !l.is_primitive()))
        mismatch("two int or two bool operands");
      return {Ty::boolean(), {}};
    }
    if (!poisoned && (l.kind != Ty::Kind::Int || r.kind != Ty::Kind::Int))
      mismatch("int operands");
    return {Ty::boolean(), {}};
  }

  const Spec& spec_;
  Annotations& ann_;
  std::vector<Diagnostic>& diags_;
  std::map<std::tuple<int, std::string, std::size_t>, std::optional<Ty>> derived_types_;
};

void sort_by_position(std::vector<Diagnostic>& diags) {
  std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.span.file, a.span.begin) < std::tie(b.span.file, b.span.begin);
  });
}

} // namespace

AnalysisResult analyze(Spec spec) {
  auto shared = std::make_shared<const Spec>(std::move(spec));
  auto ann = std::make_shared<Annotations>();
  AnalysisResult result;
  Analyzer(*shared, *ann, result.diagnostics).run();
  auto cycles = check_type_cycles(*shared);
  result.diagnostics.insert(result.diagnostics.end(), cycles.begin(), cycles.end());

  TypedSpec typed(shared, ann);
  auto derived = check_derived_cycles(typed);
  result.diagnostics.insert(result.diagnostics.end(), derived.begin(), derived.end());
  sort_by_position(result.diagnostics);
  if (!has_errors(result.diagnostics))
    result.typed = std::move(typed);
  return result;
}

AnalysisResult analyze_in_device(const TypedSpec& tspec, std::string_view device,
                                 const std::vector<Expr>& exprs) {
  AnalysisResult result;
  const DeviceDef* d = tspec.spec().find_device(device);
  if (d == nullptr) {
    result.diagnostics.push_back(
        Diagnostic{Severity::Error, "unknown device '" + std::string(device) + "'", {}});
    return result;
  }
  auto ann = std::make_shared<Annotations>(tspec.annotations());
  Analyzer analyzer(tspec.spec(), *ann, result.diagnostics);
  for (const auto& e : exprs)
    analyzer.check_in_device(*d, e);
  if (!has_errors(result.diagnostics))
    result.typed = TypedSpec(tspec.spec_ptr(), ann);
  return result;
}

LeafResolution resolve_leaf(const TypedSpec& tspec, const DeviceDef& device, const Path& path) {
  Annotations scratch;
  std::vector<Diagnostic> unused;
  return Analyzer(tspec.spec(), scratch, unused).resolve_leaf_in(device, path);
}

} // namespace csx
