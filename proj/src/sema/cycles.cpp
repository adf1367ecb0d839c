#include "csx/sema.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace csx {
namespace {

// Tarjan's algorithm; returns the strongly connected components that are
// cycles (size > 1, or a single node with a self edge). Nodes within a
// component are sorted ascending.
std::vector<std::vector<std::size_t>> cyclic_components(
    const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  int counter = 0;

  std::function<void(std::size_t)> connect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : adj[v]) {
      if (index[w] < 0) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] != index[v])
      return;
    std::vector<std::size_t> comp;
    std::size_t w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack[w] = false;
      comp.push_back(w);
    } while (w != v);
    std::sort(comp.begin(), comp.end());
    const bool self_loop = std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end();
    if (comp.size() > 1 || self_loop)
      out.push_back(std::move(comp));
  };

  for (std::size_t v = 0; v < n; ++v)
    if (index[v] < 0)
      connect(v);
  std::sort(out.begin(), out.end());
  return out;
}

// Follows edges from the first node back to itself within the component so
// the message shows an actual cycle.
std::vector<std::size_t> cycle_through(const std::vector<std::vector<std::size_t>>& adj,
                                       const std::vector<std::size_t>& comp) {
  auto in_comp = [&](std::size_t v) {
    return std::binary_search(comp.begin(), comp.end(), v);
  };
  const std::size_t start = comp.front();
  std::map<std::size_t, std::size_t> parent;
  std::vector<std::size_t> frontier{start};
  std::vector<std::size_t> path;
  while (!frontier.empty() && path.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t v : frontier) {
      for (std::size_t w : adj[v]) {
        if (!in_comp(w))
          continue;
        if (w == start) {
          for (std::size_t x = v; x != start; x = parent[x])
            path.push_back(x);
          path.push_back(start);
          std::reverse(path.begin(), path.end());
          path.push_back(start);
          break;
        }
        if (parent.emplace(w, v).second)
          next.push_back(w);
      }
      if (!path.empty())
        break;
    }
    frontier = std::move(next);
  }
  return path;
}

std::string join_cycle(const std::vector<std::size_t>& cycle,
                       const std::function<std::string(std::size_t)>& name) {
  std::string out;
  for (std::size_t v : cycle) {
    if (!out.empty())
      out += " -> ";
    out += name(v);
  }
  return out;
}

void collect_decls(const Expr& e, const Annotations& ann, std::vector<Decl>& out) {
  if (const ExprInfo* info = ann.find(e.get()); info && info->decl)
    out.push_back(*info->decl);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Proj>) {
          collect_decls(n.base, ann, out);
        } else if constexpr (std::is_same_v<T, Unary>) {
          collect_decls(n.operand, ann, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_decls(n.lhs, ann, out);
          collect_decls(n.rhs, ann, out);
        }
      },
      e->kind);
}

} // namespace

std::vector<Diagnostic> check_type_cycles(const Spec& spec) {
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < spec.types.size(); ++i)
    ids.emplace(spec.types[i].name.text, i);

  std::vector<std::vector<std::size_t>> adj(spec.types.size());
  for (std::size_t i = 0; i < spec.types.size(); ++i)
    for (const auto& p : spec.types[i].props)
      if (auto it = ids.find(p.type.name); it != ids.end())
        adj[i].push_back(it->second);

  std::vector<Diagnostic> diags;
  for (const auto& comp : cyclic_components(adj)) {
    const auto& first = spec.types[comp.front()];
    auto cycle = cycle_through(adj, comp);
    diags.push_back(Diagnostic{
        Severity::Error,
        "cyclic type nesting: " +
            join_cycle(cycle, [&](std::size_t v) { return spec.types[v].name.text; }),
        first.name.span});
  }
  return diags;
}

std::vector<Diagnostic> check_derived_cycles(const TypedSpec& tspec) {
  struct Node {
    Decl decl;
    std::string label;
    const DerivedDef* def;
  };
  std::vector<Node> nodes;
  const Spec& spec = tspec.spec();
  for (const auto& t : spec.types)
    for (std::size_t i = 0; i < t.derived.size(); ++i)
      nodes.push_back({{DeclKind::TypeDerived, t.name.text, i},
                       t.name.text + "." + t.derived[i].name.text, &t.derived[i]});
  for (const auto& a : spec.actions)
    for (std::size_t i = 0; i < a.derived.size(); ++i)
      nodes.push_back({{DeclKind::ActionDerived, a.name.text, i},
                       a.name.text + "." + a.derived[i].name.text, &a.derived[i]});
  for (const auto& d : spec.devices)
    for (std::size_t i = 0; i < d.derived.size(); ++i)
      nodes.push_back({{DeclKind::DeviceDerived, d.name.text, i},
                       d.name.text + "." + d.derived[i].name.text, &d.derived[i]});

  auto id_of = [&](const Decl& d) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].decl == d)
        return i;
    return std::nullopt;
  };

  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::vector<Decl> refs;
    collect_decls(nodes[i].def->body, *tspec.annotations(), refs);
    for (const auto& r : refs)
      if (auto j = id_of(r))
        adj[i].push_back(*j);
  }

  std::vector<Diagnostic> diags;
  for (const auto& comp : cyclic_components(adj)) {
    auto cycle = cycle_through(adj, comp);
    diags.push_back(Diagnostic{
        Severity::Error,
        "cyclic derived properties: " +
            join_cycle(cycle, [&](std::size_t v) { return nodes[v].label; }),
        nodes[comp.front()].def->name.span});
  }
  return diags;
}

} // namespace csx
