#include "support.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csx::fixture {

std::string specs_dir() { return CSX_SPECS_DIR; }
std::string golden_dir() { return CSX_GOLDEN_DIR; }
std::string spec_path(const std::string& name) { return specs_dir() + "/" + name; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TypedSpec typed_from(const std::string& source) {
  ParseResult pr = parse(source);
  if (!pr.ok())
    throw std::runtime_error("parse failed: " + pr.errors.front().message);
  AnalysisResult ar = analyze(desugar(std::move(*pr.spec)));
  if (!ar.ok())
    throw std::runtime_error("analysis failed: " + ar.diagnostics.front().message);
  return *ar.typed;
}

// --- random syntax trees --------------------------------------------------

namespace {

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

std::string random_ident(Rng& rng) {
  static const char* stems[] = {"a", "b", "w", "h", "sheet", "width", "depth", "x1", "Cover", "blockA"};
  for (;;) {
    std::string s = stems[pick(rng, 10)];
    if (pick(rng, 3) == 0)
      s += std::to_string(pick(rng, 100));
    if (is_valid_ident(s))
      return s;
  }
}

Ident ident(Rng& rng) { return Ident{random_ident(rng), {}}; }

Expr random_path(Rng& rng) {
  Expr e = pick(rng, 8) == 0 ? make_ref("self") : make_ref(random_ident(rng));
  const int n = pick(rng, 3);
  for (int i = 0; i < n; ++i)
    e = make_proj(e, random_ident(rng));
  return e;
}

std::int64_t random_int(Rng& rng) {
  switch (pick(rng, 6)) {
  case 0: return std::numeric_limits<std::int64_t>::max();
  case 1: return std::numeric_limits<std::int64_t>::min();
  case 2: return -static_cast<std::int64_t>(pick(rng, 1000));
  default: return pick(rng, 5000);
  }
}

TypeRef random_typeref(Rng& rng, bool primitive_only) {
  const int k = pick(rng, primitive_only ? 2 : 3);
  return TypeRef{k == 0 ? "int" : (k == 1 ? "bool" : random_ident(rng)), {}};
}

std::vector<Field> fields(Rng& rng, int max, bool primitive_only) {
  std::vector<Field> out;
  const int n = pick(rng, max + 1);
  for (int i = 0; i < n; ++i)
    out.push_back(Field{ident(rng), random_typeref(rng, primitive_only)});
  return out;
}

std::vector<Field> user_fields(Rng& rng, int max) {
  std::vector<Field> out;
  const int n = pick(rng, max + 1);
  for (int i = 0; i < n; ++i)
    out.push_back(Field{ident(rng), TypeRef{random_ident(rng), {}}});
  return out;
}

std::vector<Expr> exprs(Rng& rng, int max) {
  std::vector<Expr> out;
  const int n = pick(rng, max + 1);
  for (int i = 0; i < n; ++i)
    out.push_back(random_expr(rng, 3));
  return out;
}

std::vector<DerivedDef> deriveds(Rng& rng, int max) {
  std::vector<DerivedDef> out;
  const int n = pick(rng, max + 1);
  for (int i = 0; i < n; ++i)
    out.push_back(DerivedDef{ident(rng), random_expr(rng, 3)});
  return out;
}

} // namespace

Expr random_expr(Rng& rng, int depth) {
  if (depth <= 0 || pick(rng, 4) == 0) {
    switch (pick(rng, 4)) {
    case 0: return make_int(random_int(rng));
    case 1: return make_bool(pick(rng, 2) == 0);
    default: return random_path(rng);
    }
  }
  if (pick(rng, 5) == 0)
    return make_unary(pick(rng, 2) == 0 ? UnaryOp::Neg : UnaryOp::Not, random_expr(rng, depth - 1));
  static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Eq,
                                 BinaryOp::Ne,  BinaryOp::Lt,  BinaryOp::Le,  BinaryOp::Gt,
                                 BinaryOp::Ge,  BinaryOp::And, BinaryOp::Or,  BinaryOp::Implies};
  return make_binary(ops[pick(rng, 12)], random_expr(rng, depth - 1), random_expr(rng, depth - 1));
}

Spec random_spec(Rng& rng) {
  Spec s;
  for (int i = pick(rng, 3); i > 0; --i)
    s.types.push_back(TypeDef{ident(rng), fields(rng, 3, false), deriveds(rng, 2), exprs(rng, 2), {}});
  for (int i = pick(rng, 3); i > 0; --i)
    s.actions.push_back(ActionDef{ident(rng), user_fields(rng, 3), fields(rng, 2, true),
                                  deriveds(rng, 1), exprs(rng, 2), {}});
  for (int i = pick(rng, 2); i > 0; --i) {
    DeviceDef d{ident(rng), user_fields(rng, 3), {}, deriveds(rng, 1), exprs(rng, 2), {}};
    for (int c = pick(rng, 3); c > 0; --c) {
      ComponentDef comp{ident(rng), ident(rng), {}, exprs(rng, 2), {}};
      for (int a = pick(rng, 3); a > 0; --a)
        comp.loc_args.push_back(ident(rng));
      d.components.push_back(comp);
    }
    s.devices.push_back(d);
  }
  for (int i = pick(rng, 2); i > 0; --i) {
    ScenarioDef sc{ident(rng), ident(rng), {}, exprs(rng, 1), std::nullopt, exprs(rng, 3), {}, {}};
    for (int b = pick(rng, 3); b > 0; --b) {
      Path p;
      for (int k = pick(rng, 3) + 1; k > 0; --k)
        p.parts.push_back(ident(rng));
      Literal lit = pick(rng, 3) == 0 ? Literal{pick(rng, 2) == 0} : Literal{random_int(rng)};
      sc.bindings.push_back(Binding{p, lit});
    }
    if (pick(rng, 2) == 0)
      sc.objective = Objective{pick(rng, 2) == 0 ? Sense::Minimize : Sense::Maximize, random_expr(rng, 3)};
    s.scenarios.push_back(sc);
  }
  return s;
}

// --- random constraint models -------------------------------------------

namespace {

FlatExpr int_term(Rng& rng, const std::vector<std::string>& ints, int depth) {
  if (depth <= 0 || pick(rng, 3) == 0) {
    if (ints.empty() || pick(rng, 4) == 0)
      return fint(pick(rng, 9) - 4);
    return fvar(ints[pick(rng, static_cast<int>(ints.size()))]);
  }
  switch (pick(rng, 5)) {
  case 0: return funary(UnaryOp::Neg, int_term(rng, ints, depth - 1));
  case 1: return fbinary(BinaryOp::Mul, int_term(rng, ints, depth - 1), int_term(rng, ints, depth - 1));
  case 2: return fbinary(BinaryOp::Sub, int_term(rng, ints, depth - 1), int_term(rng, ints, depth - 1));
  default: return fbinary(BinaryOp::Add, int_term(rng, ints, depth - 1), int_term(rng, ints, depth - 1));
  }
}

FlatExpr bool_term(Rng& rng, const std::vector<std::string>& ints,
                   const std::vector<std::string>& bools, int depth) {
  if (depth <= 0 || pick(rng, 2) == 0) {
    if (!bools.empty() && pick(rng, 5) == 0)
      return fvar(bools[pick(rng, static_cast<int>(bools.size()))]);
    if (pick(rng, 20) == 0)
      return fbool(pick(rng, 2) == 0);
    static const BinaryOp cmp[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                                   BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
    return fbinary(cmp[pick(rng, 6)], int_term(rng, ints, 2), int_term(rng, ints, 2));
  }
  switch (pick(rng, 6)) {
  case 0: return funary(UnaryOp::Not, bool_term(rng, ints, bools, depth - 1));
  case 1: return fbinary(BinaryOp::And, bool_term(rng, ints, bools, depth - 1), bool_term(rng, ints, bools, depth - 1));
  case 2: return fbinary(BinaryOp::Or, bool_term(rng, ints, bools, depth - 1), bool_term(rng, ints, bools, depth - 1));
  case 3: return fbinary(BinaryOp::Implies, bool_term(rng, ints, bools, depth - 1), bool_term(rng, ints, bools, depth - 1));
  case 4: return fbinary(BinaryOp::Eq, bool_term(rng, ints, bools, depth - 1), bool_term(rng, ints, bools, depth - 1));
  default: return fbinary(BinaryOp::Ne, bool_term(rng, ints, bools, depth - 1), bool_term(rng, ints, bools, depth - 1));
  }
}

// Oracle evaluator: plain recursion with 128-bit intermediates.
struct OVal {
  bool is_bool;
  __int128 i;
};

// `lookup` maps a variable name to its value.
template <class Lookup>
OVal oeval(const FlatExpr& e, const Lookup& lookup) {
  if (const auto* n = std::get_if<FInt>(&e->kind))
    return {false, n->value};
  if (const auto* n = std::get_if<FBool>(&e->kind))
    return {true, n->value ? 1 : 0};
  if (const auto* n = std::get_if<FVar>(&e->kind))
    return lookup(n->name);
  if (const auto* n = std::get_if<FUnary>(&e->kind)) {
    OVal v = oeval(n->operand, lookup);
    return n->op == UnaryOp::Not ? OVal{true, v.i ? 0 : 1} : OVal{false, -v.i};
  }
  const auto& b = std::get<FBinary>(e->kind);
  OVal l = oeval(b.lhs, lookup), r = oeval(b.rhs, lookup);
  switch (b.op) {
  case BinaryOp::Add: return {false, l.i + r.i};
  case BinaryOp::Sub: return {false, l.i - r.i};
  case BinaryOp::Mul: return {false, l.i * r.i};
  case BinaryOp::Eq: return {true, l.i == r.i};
  case BinaryOp::Ne: return {true, l.i != r.i};
  case BinaryOp::Lt: return {true, l.i < r.i};
  case BinaryOp::Le: return {true, l.i <= r.i};
  case BinaryOp::Gt: return {true, l.i > r.i};
  case BinaryOp::Ge: return {true, l.i >= r.i};
  case BinaryOp::And: return {true, l.i && r.i};
  case BinaryOp::Or: return {true, l.i || r.i};
  case BinaryOp::Implies: return {true, !l.i || r.i};
  }
  throw std::logic_error("oracle: bad operator");
}

OVal from_assignment(const fd::Assignment& a, const std::string& name) {
  const fd::Scalar* s = a.find(name);
  if (!s)
    throw std::logic_error("oracle: unbound " + name);
  if (const auto* b = std::get_if<bool>(s))
    return {true, *b ? 1 : 0};
  return {false, std::get<std::int64_t>(*s)};
}

} // namespace

ConstraintModel random_model(Rng& rng, const ModelShape& shape) {
  ConstraintModel m;
  std::vector<std::string> ints, bools;
  const int ni = 1 + pick(rng, shape.max_int_vars);
  const int nb = pick(rng, shape.max_bool_vars + 1);
  for (int i = 0; i < ni; ++i)
    ints.push_back("x" + std::to_string(i));
  for (int i = 0; i < nb; ++i)
    bools.push_back("p" + std::to_string(i));
  // Interleave declarations so search order is not trivially ints-first.
  std::size_t bi = 0;
  for (const auto& x : ints) {
    m.vars.push_back({x, Sort::Int});
    if (bi < bools.size() && pick(rng, 2) == 0)
      m.vars.push_back({bools[bi++], Sort::Bool});
  }
  for (; bi < bools.size(); ++bi)
    m.vars.push_back({bools[bi], Sort::Bool});
  const int nc = pick(rng, shape.max_constraints + 1);
  for (int i = 0; i < nc; ++i)
    m.constraints.push_back(bool_term(rng, ints, bools, 2));
  if (shape.objective)
    m.objective = FlatObjective{pick(rng, 2) == 0 ? Sense::Minimize : Sense::Maximize,
                                int_term(rng, ints, 2)};
  return m;
}

std::int64_t oracle_value(const FlatExpr& e, const fd::Assignment& a) {
  return static_cast<std::int64_t>(oeval(e, [&](const std::string& n) { return from_assignment(a, n); }).i);
}

bool oracle_holds(const FlatExpr& e, const fd::Assignment& a) {
  return oeval(e, [&](const std::string& n) { return from_assignment(a, n); }).i != 0;
}

namespace {

// Expressions compiled to index-addressed nodes for the enumeration loop.
struct Node {
  enum Kind { Const, Var, Neg, Not, Bin } kind;
  BinaryOp op = BinaryOp::Add;
  __int128 value = 0;
  int var = -1;
  int a = -1, b = -1;
};

struct Program {
  std::vector<Node> nodes;
  int root = -1;
  int last_var = -1; // highest variable index read
};

int compile(const FlatExpr& e, const ConstraintModel& m, Program& p) {
  Node n{};
  if (const auto* x = std::get_if<FInt>(&e->kind)) {
    n.kind = Node::Const;
    n.value = x->value;
  } else if (const auto* x = std::get_if<FBool>(&e->kind)) {
    n.kind = Node::Const;
    n.value = x->value ? 1 : 0;
  } else if (const auto* x = std::get_if<FVar>(&e->kind)) {
    n.kind = Node::Var;
    for (std::size_t i = 0; i < m.vars.size(); ++i)
      if (m.vars[i].name == x->name)
        n.var = static_cast<int>(i);
    if (n.var < 0)
      throw std::logic_error("oracle: unbound " + x->name);
    p.last_var = std::max(p.last_var, n.var);
  } else if (const auto* x = std::get_if<FUnary>(&e->kind)) {
    n.kind = x->op == UnaryOp::Not ? Node::Not : Node::Neg;
    n.a = compile(x->operand, m, p);
  } else {
    const auto& bin = std::get<FBinary>(e->kind);
    n.kind = Node::Bin;
    n.op = bin.op;
    n.a = compile(bin.lhs, m, p);
    n.b = compile(bin.rhs, m, p);
  }
  p.nodes.push_back(n);
  return static_cast<int>(p.nodes.size()) - 1;
}

Program compile(const FlatExpr& e, const ConstraintModel& m) {
  Program p;
  p.root = compile(e, m, p);
  return p;
}

__int128 run(const Program& p, int at, const std::vector<std::int64_t>& cur) {
  const Node& n = p.nodes[static_cast<std::size_t>(at)];
  switch (n.kind) {
  case Node::Const: return n.value;
  case Node::Var: return cur[static_cast<std::size_t>(n.var)];
  case Node::Neg: return -run(p, n.a, cur);
  case Node::Not: return run(p, n.a, cur) ? 0 : 1;
  case Node::Bin: break;
  }
  const __int128 l = run(p, n.a, cur), r = run(p, n.b, cur);
  switch (n.op) {
  case BinaryOp::Add: return l + r;
  case BinaryOp::Sub: return l - r;
  case BinaryOp::Mul: return l * r;
  case BinaryOp::Eq: return l == r;
  case BinaryOp::Ne: return l != r;
  case BinaryOp::Lt: return l < r;
  case BinaryOp::Le: return l <= r;
  case BinaryOp::Gt: return l > r;
  case BinaryOp::Ge: return l >= r;
  case BinaryOp::And: return l && r;
  case BinaryOp::Or: return l || r;
  case BinaryOp::Implies: return !l || r;
  }
  throw std::logic_error("oracle: bad operator");
}

// Depth-first over variables in declaration order, values ascending; each
// constraint is tested once its last variable is assigned. Calls
// `visit(cur)` for every satisfying point in lexicographic order.
template <class Visit>
void enumerate_points(const ConstraintModel& m, const fd::DomainBox& box, const Visit& visit) {
  const std::size_t n = m.vars.size();
  std::vector<std::int64_t> lo(n), hi(n), cur(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = m.vars[i];
    if (v.sort == Sort::Bool) {
      auto f = box.bool_fixed(v.name);
      lo[i] = f ? *f : 0;
      hi[i] = f ? *f : 1;
    } else {
      auto d = box.int_domain(v.name);
      lo[i] = d.lo;
      hi[i] = d.hi;
    }
    if (lo[i] > hi[i])
      return;
  }
  // Bucket 0 holds closed constraints; bucket k + 1 those ending at var k.
  std::vector<std::vector<Program>> at(n + 1);
  for (const auto& c : m.constraints) {
    Program p = compile(c, m);
    at[static_cast<std::size_t>(p.last_var + 1)].push_back(std::move(p));
  }
  auto holds = [&](std::size_t bucket) {
    for (const auto& p : at[bucket])
      if (run(p, p.root, cur) == 0)
        return false;
    return true;
  };
  if (!holds(0))
    return;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == n) {
      visit(cur);
      return;
    }
    for (std::int64_t v = lo[k];; ++v) {
      cur[k] = v;
      if (holds(k + 1))
        rec(k + 1);
      if (v == hi[k])
        break;
    }
  };
  rec(0);
}

} // namespace

std::vector<fd::Assignment> brute_force(const ConstraintModel& m, const fd::DomainBox& box) {
  std::vector<fd::Assignment> out;
  enumerate_points(m, box, [&](const std::vector<std::int64_t>& cur) {
    fd::Assignment a;
    for (std::size_t i = 0; i < m.vars.size(); ++i) {
      if (m.vars[i].sort == Sort::Bool)
        a.set(m.vars[i].name, cur[i] != 0);
      else
        a.set(m.vars[i].name, cur[i]);
    }
    out.push_back(std::move(a));
  });
  return out;
}

OracleSummary oracle_summary(const ConstraintModel& m, const fd::DomainBox& box) {
  OracleSummary s;
  std::optional<Program> obj;
  if (m.objective)
    obj = compile(m.objective->expr, m);
  const bool minimize = m.objective && m.objective->sense == Sense::Minimize;
  enumerate_points(m, box, [&](const std::vector<std::int64_t>& cur) {
    ++s.count;
    if (!obj)
      return;
    const auto v = static_cast<std::int64_t>(run(*obj, obj->root, cur));
    if (!s.optimum || (minimize ? v < *s.optimum : v > *s.optimum))
      s.optimum = v;
  });
  return s;
}

} // namespace csx::fixture
