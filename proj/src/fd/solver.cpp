#include "csx/fd/solver.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <stdexcept>

namespace csx::fd {
namespace {

using I128 = __int128;
using Clock = std::chrono::steady_clock;

// Interval arithmetic saturates here; a minimum at -kSat or a maximum at
// +kSat means "unbounded" on that side.
constexpr I128 kSat = I128(1) << 120;

I128 clamp(I128 v) { return v > kSat ? kSat : (v < -kSat ? -kSat : v); }

I128 sat_mul(I128 a, I128 b) {
  I128 r;
  if (__builtin_mul_overflow(a, b, &r))
    return (a < 0) != (b < 0) ? -kSat : kSat;
  return clamp(r);
}

I128 floor_div(I128 a, I128 b) {
  I128 q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0)))
    --q;
  return q;
}

I128 ceil_div(I128 a, I128 b) {
  I128 q = a / b;
  if (a % b != 0 && ((a < 0) == (b < 0)))
    ++q;
  return q;
}

I128 checked_mul(I128 a, I128 b) {
  I128 r;
  if (__builtin_mul_overflow(a, b, &r) || r > kSat || r < -kSat)
    throw std::overflow_error("coefficient overflow while normalizing a constraint");
  return r;
}

// --- polynomial normal form ------------------------------------------------

struct Term {
  I128 coef;
  std::vector<int> vars; // sorted, repeats allowed
};

struct Poly {
  std::vector<Term> terms;
  I128 constant = 0;
};

Poly normalize(Poly p) {
  std::sort(p.terms.begin(), p.terms.end(),
            [](const Term& a, const Term& b) { return a.vars < b.vars; });
  Poly out;
  out.constant = p.constant;
  for (auto& t : p.terms) {
    if (!out.terms.empty() && out.terms.back().vars == t.vars) {
      out.terms.back().coef += t.coef;
      if (out.terms.back().coef > kSat || out.terms.back().coef < -kSat)
        throw std::overflow_error("coefficient overflow while normalizing a constraint");
    } else {
      out.terms.push_back(std::move(t));
    }
  }
  out.terms.erase(std::remove_if(out.terms.begin(), out.terms.end(),
                                 [](const Term& t) { return t.coef == 0; }),
                  out.terms.end());
  return out;
}

Poly add(Poly a, const Poly& b, I128 sign = 1) {
  for (const auto& t : b.terms)
    a.terms.push_back({t.coef * sign, t.vars});
  a.constant += b.constant * sign;
  if (a.constant > kSat || a.constant < -kSat)
    throw std::overflow_error("constant overflow while normalizing a constraint");
  return normalize(std::move(a));
}

Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  out.constant = checked_mul(a.constant, b.constant);
  for (const auto& t : a.terms) {
    if (b.constant != 0)
      out.terms.push_back({checked_mul(t.coef, b.constant), t.vars});
    for (const auto& u : b.terms) {
      std::vector<int> vars = t.vars;
      vars.insert(vars.end(), u.vars.begin(), u.vars.end());
      std::sort(vars.begin(), vars.end());
      out.terms.push_back({checked_mul(t.coef, u.coef), std::move(vars)});
    }
  }
  if (a.constant != 0)
    for (const auto& u : b.terms)
      out.terms.push_back({checked_mul(a.constant, u.coef), u.vars});
  return normalize(std::move(out));
}

Poly constant(I128 v) {
  Poly p;
  p.constant = v;
  return p;
}

Poly negate(const Poly& p) { return add(constant(0), p, -1); }

// --- compiled boolean structure ------------------------------------------

enum class Rel { Le, Eq, Ne }; // poly REL 0

struct Atom {
  Rel rel;
  Poly p;
  Poly np;   // -p
  Poly np1;  // -p + 1, i.e. "p > 0" as a <= constraint
};

enum class Kind { Const, Var, Not, And, Or, Iff, Atom };

struct Node {
  Kind kind;
  bool value = false;
  int index = 0; // variable or atom index
  std::vector<int> kids;
};

struct Compiled {
  std::vector<VarDecl> vars;
  std::vector<Node> nodes;
  std::vector<Atom> atoms;
  std::vector<int> roots;
  std::optional<Poly> objective; // always minimized; maximize is negated
  bool maximize = false;
};

class Compiler {
public:
  Compiler(const ConstraintModel& m, Compiled& out) : m_(m), out_(out) {
    for (std::size_t i = 0; i < m.vars.size(); ++i)
      index_[m.vars[i].name] = static_cast<int>(i);
  }

  int boolean(const FlatExpr& e) {
    return std::visit(
        [&](const auto& n) -> int {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FBool>) {
            return node({Kind::Const, n.value, 0, {}});
          } else if constexpr (std::is_same_v<T, FVar>) {
            return node({Kind::Var, false, var(n.name), {}});
          } else if constexpr (std::is_same_v<T, FUnary>) {
            return node({Kind::Not, false, 0, {boolean(n.operand)}});
          } else if constexpr (std::is_same_v<T, FBinary>) {
            switch (n.op) {
            case BinaryOp::And: return node({Kind::And, false, 0, {boolean(n.lhs), boolean(n.rhs)}});
            case BinaryOp::Or: return node({Kind::Or, false, 0, {boolean(n.lhs), boolean(n.rhs)}});
            case BinaryOp::Implies: {
              int lhs = node({Kind::Not, false, 0, {boolean(n.lhs)}});
              return node({Kind::Or, false, 0, {lhs, boolean(n.rhs)}});
            }
            case BinaryOp::Eq:
            case BinaryOp::Ne: {
              if (sort_of(m_, n.lhs) == Sort::Bool) {
                int iff = node({Kind::Iff, false, 0, {boolean(n.lhs), boolean(n.rhs)}});
                return n.op == BinaryOp::Eq ? iff : node({Kind::Not, false, 0, {iff}});
              }
              return atom(n.op == BinaryOp::Eq ? Rel::Eq : Rel::Ne,
                          add(integer(n.lhs), integer(n.rhs), -1));
            }
            case BinaryOp::Lt: return atom(Rel::Le, add(add(integer(n.lhs), integer(n.rhs), -1), constant(1)));
            case BinaryOp::Le: return atom(Rel::Le, add(integer(n.lhs), integer(n.rhs), -1));
            case BinaryOp::Gt: return atom(Rel::Le, add(add(integer(n.rhs), integer(n.lhs), -1), constant(1)));
            case BinaryOp::Ge: return atom(Rel::Le, add(integer(n.rhs), integer(n.lhs), -1));
            default: break;
            }
          }
          throw MalformedModel("expected a boolean expression");
        },
        e->kind);
  }

  Poly integer(const FlatExpr& e) {
    return std::visit(
        [&](const auto& n) -> Poly {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FInt>) {
            return constant(n.value);
          } else if constexpr (std::is_same_v<T, FVar>) {
            Poly p;
            p.terms.push_back({1, {var(n.name)}});
            return p;
          } else if constexpr (std::is_same_v<T, FUnary>) {
            return negate(integer(n.operand));
          } else if constexpr (std::is_same_v<T, FBinary>) {
            switch (n.op) {
            case BinaryOp::Add: return add(integer(n.lhs), integer(n.rhs));
            case BinaryOp::Sub: return add(integer(n.lhs), integer(n.rhs), -1);
            case BinaryOp::Mul: return mul(integer(n.lhs), integer(n.rhs));
            default: break;
            }
          }
          throw MalformedModel("expected an integer expression");
        },
        e->kind);
  }

  int atom(Rel rel, Poly p) {
    Poly np = negate(p);
    Poly np1 = add(np, constant(1));
    out_.atoms.push_back({rel, std::move(p), std::move(np), std::move(np1)});
    return node({Kind::Atom, false, static_cast<int>(out_.atoms.size() - 1), {}});
  }

private:
  int node(Node n) {
    out_.nodes.push_back(std::move(n));
    return static_cast<int>(out_.nodes.size() - 1);
  }

  int var(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end())
      throw MalformedModel("undeclared variable '" + name + "'");
    return it->second;
  }

  const ConstraintModel& m_;
  Compiled& out_;
  std::map<std::string, int> index_;
};

Compiled compile(const ConstraintModel& m) {
  m.validate();
  Compiled c;
  c.vars = m.vars;
  Compiler comp(m, c);
  for (const auto& con : m.constraints)
    c.roots.push_back(comp.boolean(con));
  if (m.objective) {
    Poly f = comp.integer(m.objective->expr);
    c.maximize = m.objective->sense == Sense::Maximize;
    c.objective = c.maximize ? negate(f) : f;
  }
  return c;
}

// Adds `p REL 0` as an extra root.
Compiled with_root(Compiled c, Rel rel, Poly p) {
  Poly np = negate(p);
  Poly np1 = add(np, constant(1));
  c.atoms.push_back({rel, std::move(p), std::move(np), std::move(np1)});
  c.nodes.push_back({Kind::Atom, false, static_cast<int>(c.atoms.size() - 1), {}});
  c.roots.push_back(static_cast<int>(c.nodes.size() - 1));
  return c;
}

// --- propagation ---------------------------------------------------------

struct State {
  std::vector<std::int64_t> lo, hi;
};

struct Range {
  I128 lo, hi;
};

enum Tri { kFalse = 0, kTrue = 1, kUnknown = 2 };

class Engine {
public:
  Engine(const Compiled& c, State& s) : c_(c), s_(s) {}

  std::uint64_t propagations = 0;

  bool fixpoint() {
    for (int pass = 0; pass < kMaxPasses; ++pass) {
      changed_ = false;
      for (int r : c_.roots)
        if (!enforce(r, true))
          return false;
      if (!changed_)
        break;
    }
    return true;
  }

  Range poly_range(const Poly& p) const {
    I128 lo = p.constant, hi = p.constant;
    bool lo_inf = false, hi_inf = false;
    for (const auto& t : p.terms) {
      Range r = term_range(t);
      if (r.lo <= -kSat)
        lo_inf = true;
      else
        lo = clamp(lo + r.lo);
      if (r.hi >= kSat)
        hi_inf = true;
      else
        hi = clamp(hi + r.hi);
    }
    return {lo_inf ? -kSat : lo, hi_inf ? kSat : hi};
  }

private:
  static constexpr int kMaxPasses = 1000;

  Range var_range(int v) const { return {s_.lo[v], s_.hi[v]}; }

  static Range mul_range(Range a, Range b) {
    I128 c[4] = {sat_mul(a.lo, b.lo), sat_mul(a.lo, b.hi), sat_mul(a.hi, b.lo),
                 sat_mul(a.hi, b.hi)};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
  }

  Range monomial_range(const std::vector<int>& vars, std::size_t skip) const {
    Range r{1, 1};
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (i != skip)
        r = mul_range(r, var_range(vars[i]));
    return r;
  }

  Range term_range(const Term& t) const {
    return mul_range(Range{t.coef, t.coef}, monomial_range(t.vars, t.vars.size()));
  }

  bool set_lo(int v, I128 value) {
    if (value <= s_.lo[v])
      return true;
    if (value > s_.hi[v])
      return false;
    s_.lo[v] = static_cast<std::int64_t>(value);
    changed_ = true;
    return true;
  }

  bool set_hi(int v, I128 value) {
    if (value >= s_.hi[v])
      return true;
    if (value < s_.lo[v])
      return false;
    s_.hi[v] = static_cast<std::int64_t>(value);
    changed_ = true;
    return true;
  }

  // Narrows the variables of a monomial knowing its value lies in [a, b];
  // a == -kSat / b == kSat mean no bound on that side.
  bool narrow_monomial(const std::vector<int>& vars, I128 a, I128 b) {
    const bool has_a = a > -kSat, has_b = b < kSat;
    if (vars.size() == 1)
      return (!has_a || set_lo(vars[0], a)) && (!has_b || set_hi(vars[0], b));
    for (std::size_t i = 0; i < vars.size(); ++i) {
      Range o = monomial_range(vars, i);
      if (o.lo <= 0 && o.hi >= 0)
        continue;
      const int x = vars[i];
      if (o.lo > 0) {
        if (has_a && !set_lo(x, std::min(ceil_div(a, o.lo), ceil_div(a, o.hi))))
          return false;
        if (has_b && !set_hi(x, std::max(floor_div(b, o.lo), floor_div(b, o.hi))))
          return false;
      } else {
        if (has_b && !set_lo(x, std::min(ceil_div(b, o.lo), ceil_div(b, o.hi))))
          return false;
        if (has_a && !set_hi(x, std::max(floor_div(a, o.lo), floor_div(a, o.hi))))
          return false;
      }
    }
    return true;
  }

  // p <= 0
  bool prop_le(const Poly& p) {
    ++propagations;
    const std::size_t n = p.terms.size();
    std::vector<I128> mins(n);
    I128 finite = p.constant;
    int unbounded = 0;
    for (std::size_t k = 0; k < n; ++k) {
      mins[k] = term_range(p.terms[k]).lo;
      if (mins[k] <= -kSat)
        ++unbounded;
      else
        finite = clamp(finite + mins[k]);
    }
    if (unbounded == 0 && finite > 0)
      return false;
    for (std::size_t k = 0; k < n; ++k) {
      const bool self_unbounded = mins[k] <= -kSat;
      if (unbounded - (self_unbounded ? 1 : 0) > 0)
        continue;
      const I128 rest = self_unbounded ? finite : finite - mins[k];
      const I128 u = clamp(-rest); // coef * monomial <= u
      if (u >= kSat)
        continue;
      const Term& t = p.terms[k];
      bool ok = t.coef > 0 ? narrow_monomial(t.vars, -kSat, floor_div(u, t.coef))
                           : narrow_monomial(t.vars, ceil_div(u, t.coef), kSat);
      if (!ok)
        return false;
    }
    return true;
  }

  bool prop_ne(const Poly& p) {
    ++propagations;
    int open = -1;
    I128 rest = p.constant;
    for (std::size_t k = 0; k < p.terms.size(); ++k) {
      Range r = term_range(p.terms[k]);
      if (r.lo == r.hi && r.lo > -kSat && r.lo < kSat) {
        rest += r.lo;
      } else {
        if (open >= 0)
          return true;
        open = static_cast<int>(k);
      }
    }
    if (open < 0)
      return rest != 0;
    const Term& t = p.terms[open];
    if (t.vars.size() != 1 || (-rest) % t.coef != 0)
      return true;
    const I128 forbidden = -rest / t.coef;
    const int x = t.vars[0];
    if (forbidden == s_.lo[x])
      return set_lo(x, forbidden + 1);
    if (forbidden == s_.hi[x])
      return set_hi(x, forbidden - 1);
    return true;
  }

  Tri atom_truth(const Atom& a) const {
    Range r = poly_range(a.p);
    const bool lo_ok = r.lo > -kSat, hi_ok = r.hi < kSat;
    switch (a.rel) {
    case Rel::Le:
      if (hi_ok && r.hi <= 0)
        return kTrue;
      if (lo_ok && r.lo > 0)
        return kFalse;
      return kUnknown;
    case Rel::Eq:
    case Rel::Ne: {
      Tri eq = kUnknown;
      if (lo_ok && hi_ok && r.lo == 0 && r.hi == 0)
        eq = kTrue;
      else if ((lo_ok && r.lo > 0) || (hi_ok && r.hi < 0))
        eq = kFalse;
      if (a.rel == Rel::Eq || eq == kUnknown)
        return eq;
      return eq == kTrue ? kFalse : kTrue;
    }
    }
    return kUnknown;
  }

public:
  Tri truth(int id) const {
    const Node& n = c_.nodes[id];
    switch (n.kind) {
    case Kind::Const: return n.value ? kTrue : kFalse;
    case Kind::Var:
      if (s_.lo[n.index] != s_.hi[n.index])
        return kUnknown;
      return s_.lo[n.index] ? kTrue : kFalse;
    case Kind::Not: {
      Tri t = truth(n.kids[0]);
      return t == kUnknown ? kUnknown : (t == kTrue ? kFalse : kTrue);
    }
    case Kind::And:
    case Kind::Or: {
      const Tri absorbing = n.kind == Kind::And ? kFalse : kTrue;
      bool unknown = false;
      for (int k : n.kids) {
        Tri t = truth(k);
        if (t == absorbing)
          return absorbing;
        if (t == kUnknown)
          unknown = true;
      }
      return unknown ? kUnknown : (absorbing == kFalse ? kTrue : kFalse);
    }
    case Kind::Iff: {
      Tri a = truth(n.kids[0]), b = truth(n.kids[1]);
      if (a == kUnknown || b == kUnknown)
        return kUnknown;
      return a == b ? kTrue : kFalse;
    }
    case Kind::Atom: return atom_truth(c_.atoms[n.index]);
    }
    return kUnknown;
  }

private:
  bool enforce(int id, bool want) {
    const Node& n = c_.nodes[id];
    switch (n.kind) {
    case Kind::Const: return n.value == want;
    case Kind::Var: return want ? set_lo(n.index, 1) : set_hi(n.index, 0);
    case Kind::Not: return enforce(n.kids[0], !want);
    case Kind::And:
    case Kind::Or: {
      // Conjunction required true (or disjunction required false): every
      // child takes the wanted value.
      const bool all = (n.kind == Kind::And) == want;
      if (all) {
        for (int k : n.kids)
          if (!enforce(k, want))
            return false;
        return true;
      }
      // Otherwise at least one child must take `want`.
      int open = -1;
      int open_count = 0;
      for (int k : n.kids) {
        Tri t = truth(k);
        if (t == (want ? kTrue : kFalse))
          return true;
        if (t == kUnknown) {
          open = k;
          ++open_count;
        }
      }
      if (open_count == 0)
        return false;
      if (open_count == 1)
        return enforce(open, want);
      return true;
    }
    case Kind::Iff: {
      Tri a = truth(n.kids[0]);
      if (a != kUnknown)
        return enforce(n.kids[1], (a == kTrue) == want);
      Tri b = truth(n.kids[1]);
      if (b != kUnknown)
        return enforce(n.kids[0], (b == kTrue) == want);
      return true;
    }
    case Kind::Atom: {
      const Atom& a = c_.atoms[n.index];
      const Rel rel = want ? a.rel : (a.rel == Rel::Le ? Rel::Le : (a.rel == Rel::Eq ? Rel::Ne : Rel::Eq));
      if (rel == Rel::Le)
        return prop_le(want ? a.p : a.np1);
      if (rel == Rel::Eq)
        return prop_le(a.p) && prop_le(a.np);
      return prop_ne(a.p);
    }
    }
    return true;
  }

  const Compiled& c_;
  State& s_;
  bool changed_ = false;
};

// --- search ---------------------------------------------------------------

std::atomic<std::uint64_t> g_calls{0};

std::optional<State> initial_state(const Compiled& c, const DomainBox& box) {
  State s;
  for (const auto& v : c.vars) {
    if (v.sort == Sort::Bool) {
      auto fixed = box.bool_fixed(v.name);
      s.lo.push_back(fixed ? *fixed : 0);
      s.hi.push_back(fixed ? *fixed : 1);
    } else {
      Interval d = box.int_domain(v.name);
      if (d.lo > d.hi)
        return std::nullopt;
      s.lo.push_back(d.lo);
      s.hi.push_back(d.hi);
    }
  }
  return s;
}

Assignment to_assignment(const Compiled& c, const State& s) {
  Assignment a;
  for (std::size_t i = 0; i < c.vars.size(); ++i) {
    if (c.vars[i].sort == Sort::Bool)
      a.set(c.vars[i].name, s.lo[i] != 0);
    else
      a.set(c.vars[i].name, s.lo[i]);
  }
  return a;
}

I128 poly_value(const Poly& p, const State& s) {
  I128 v = p.constant;
  for (const auto& t : p.terms) {
    I128 m = t.coef;
    for (int x : t.vars)
      m = sat_mul(m, s.lo[x]);
    v = clamp(v + m);
  }
  return v;
}

class Search {
public:
  Search(const ConstraintModel& model, const Budget& budget, Stats& stats)
      : model_(model), budget_(budget), stats_(stats),
        deadline_(Clock::now() + budget.max_time) {}

  bool exhausted() const { return exhausted_; }

  // Visits solutions in search order until `on_solution` returns true or
  // the space/budget is exhausted.
  void run(const Compiled& c, const State& root,
           const std::function<bool(const State&)>& on_solution) {
    c_ = &c;
    on_solution_ = &on_solution;
    State s = root;
    dfs(s);
  }

private:
  // Returns true when the search should stop.
  bool dfs(State& s) {
    ++stats_.nodes;
    if (++nodes_ > budget_.max_nodes || ((nodes_ & 63) == 0 && Clock::now() > deadline_)) {
      exhausted_ = true;
      return true;
    }
    Engine e(*c_, s);
    const bool ok = e.fixpoint();
    stats_.propagations += e.propagations;
    if (!ok)
      return false;

    // Smallest domain first; ties go to the earlier declaration.
    int branch = -1;
    I128 best = 0;
    for (std::size_t i = 0; i < s.lo.size(); ++i) {
      const I128 size = I128(s.hi[i]) - s.lo[i];
      if (size > 0 && (branch < 0 || size < best)) {
        branch = static_cast<int>(i);
        best = size;
      }
    }
    if (branch < 0) {
      // Propagation decided every root; confirm against the source model.
      for (int r : c_->roots)
        if (e.truth(r) != kTrue)
          return false;
      if (!evaluate(model_, to_assignment(*c_, s)))
        throw std::logic_error("solver produced an assignment that violates the model");
      return (*on_solution_)(s);
    }

    const I128 lo = s.lo[branch], hi = s.hi[branch];
    const I128 mid = floor_div(lo + hi, 2);
    {
      State left = s;
      left.hi[branch] = static_cast<std::int64_t>(mid);
      if (dfs(left))
        return true;
    }
    State right = std::move(s);
    right.lo[branch] = static_cast<std::int64_t>(mid + 1);
    return dfs(right);
  }

  const ConstraintModel& model_;
  Budget budget_;
  Stats& stats_;
  Clock::time_point deadline_;
  const Compiled* c_ = nullptr;
  const std::function<bool(const State&)>* on_solution_ = nullptr;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

struct Outcome {
  std::optional<State> solution;
  bool exhausted = false;
};

Outcome first_solution(const ConstraintModel& m, const Compiled& c, const State& root,
                       const Budget& budget, Stats& stats) {
  Outcome out;
  Search search(m, budget, stats);
  search.run(c, root, [&](const State& s) {
    out.solution = s;
    return true;
  });
  out.exhausted = !out.solution && search.exhausted();
  return out;
}

void finish(SolveResult& r, Clock::time_point start) {
  r.stats.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Budget remaining(const Budget& b, const Stats& used, Clock::time_point start) {
  Budget out = b;
  out.max_nodes = used.nodes >= b.max_nodes ? 0 : b.max_nodes - used.nodes;
  auto spent = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  out.max_time = spent >= b.max_time ? std::chrono::milliseconds(0) : b.max_time - spent;
  return out;
}

std::int64_t to_int64(I128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("objective value does not fit 64 bits");
  return static_cast<std::int64_t>(v);
}

} // namespace

SolveResult check_sat(const ConstraintModel& m, const DomainBox& box, const Budget& budget) {
  ++g_calls;
  const auto start = Clock::now();
  Compiled c = compile(m);
  c.objective.reset();
  SolveResult r;
  auto root = initial_state(c, box);
  if (!root) {
    r.status = Status::Unsat;
    finish(r, start);
    return r;
  }
  Outcome o = first_solution(m, c, *root, budget, r.stats);
  if (o.solution) {
    r.status = Status::Sat;
    r.assignment = to_assignment(c, *o.solution);
  } else {
    r.status = o.exhausted ? Status::Exhausted : Status::Unsat;
  }
  finish(r, start);
  return r;
}

SolveResult optimize(const ConstraintModel& m, const DomainBox& box, const Budget& budget) {
  if (!m.objective)
    throw std::invalid_argument("optimize requires a model with an objective");
  ++g_calls;
  const auto start = Clock::now();
  const Compiled c = compile(m);
  const Poly& f = *c.objective; // minimized
  SolveResult r;
  auto report = [&](const State& s, Status status) {
    r.status = status;
    r.assignment = to_assignment(c, s);
    I128 v = poly_value(f, s);
    r.objective = to_int64(c.maximize ? -v : v);
  };

  auto root = initial_state(c, box);
  if (!root) {
    r.status = Status::Unsat;
    finish(r, start);
    return r;
  }
  Outcome first = first_solution(m, c, *root, budget, r.stats);
  if (!first.solution) {
    r.status = first.exhausted ? Status::Exhausted : Status::Unsat;
    finish(r, start);
    return r;
  }
  State incumbent = *first.solution;
  I128 best = poly_value(f, incumbent);

  // Lower bound from root propagation, then bisect the objective range:
  // each probe restarts the search from the root with a tighter bound.
  I128 lower = -kSat;
  {
    State s = *root;
    Engine e(c, s);
    if (e.fixpoint())
      lower = e.poly_range(f).lo;
  }
  while (lower < best) {
    const I128 mid = lower + floor_div(best - 1 - lower, 2);
    Compiled probe = with_root(c, Rel::Le, add(f, constant(mid), -1));
    Outcome o = first_solution(m, probe, *root, remaining(budget, r.stats, start), r.stats);
    if (o.solution) {
      incumbent = *o.solution;
      best = poly_value(f, incumbent);
    } else if (o.exhausted) {
      report(incumbent, Status::Exhausted);
      finish(r, start);
      return r;
    } else {
      lower = mid + 1;
    }
  }

  // Canonical witness: the first optimal assignment in search order.
  Compiled canonical = with_root(c, Rel::Eq, add(f, constant(best), -1));
  Outcome o = first_solution(m, canonical, *root, remaining(budget, r.stats, start), r.stats);
  if (o.solution)
    report(*o.solution, Status::Opt);
  else
    report(incumbent, o.exhausted ? Status::Exhausted : Status::Opt);
  finish(r, start);
  return r;
}

SolveResult solve(const ConstraintModel& m, const DomainBox& box, const Budget& budget) {
  return m.objective ? optimize(m, box, budget) : check_sat(m, box, budget);
}

std::optional<std::vector<Interval>> propagate(const ConstraintModel& m, const DomainBox& box) {
  Compiled c = compile(m);
  auto s = initial_state(c, box);
  if (!s)
    return std::nullopt;
  Engine e(c, *s);
  if (!e.fixpoint())
    return std::nullopt;
  std::vector<Interval> out;
  for (std::size_t i = 0; i < c.vars.size(); ++i)
    out.push_back({s->lo[i], s->hi[i]});
  return out;
}

Enumeration all_solutions(const ConstraintModel& m, const DomainBox& box, std::size_t limit,
                          const Budget& budget) {
  ++g_calls;
  Compiled c = compile(m);
  c.objective.reset();
  Enumeration out;
  auto root = initial_state(c, box);
  if (!root || limit == 0)
    return out;
  Stats stats;
  Search search(m, budget, stats);
  search.run(c, *root, [&](const State& s) {
    out.solutions.push_back(to_assignment(c, s));
    return out.solutions.size() >= limit;
  });
  out.complete = !search.exhausted();
  return out;
}

std::uint64_t solver_calls() { return g_calls.load(); }

} // namespace csx::fd
