#include "csx/explore.hpp"

#include <set>

namespace csx {

std::any Cache::lookup(const std::string& key, const std::function<std::any()>& compute) {
  std::promise<std::any> promise;
  std::shared_future<std::any> result;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      ++hits_;
      result = it->second;
    } else {
      ++misses_;
      result = promise.get_future().share();
      entries_.emplace(key, result);
      owner = true;
    }
  }
  if (owner) {
    try {
      promise.set_value(compute());
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard<std::mutex> lock(mu_);
      entries_.erase(key); // let a later request retry
    }
  }
  return result.get();
}

std::size_t Cache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::uint64_t Cache::hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hits_;
}

std::uint64_t Cache::misses() const {
  std::lock_guard<std::mutex> lock(mu_);
  return misses_;
}

void Cache::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.clear();
}

namespace {

struct Deps {
  std::set<std::string> types, actions, devices;
};

void add_type(const Spec& spec, const std::string& name, Deps& deps) {
  if (!deps.types.insert(name).second)
    return;
  if (const TypeDef* t = spec.find_type(name))
    for (const auto& p : t->props)
      if (!p.type.is_primitive())
        add_type(spec, p.type.name, deps);
}

void add_action(const Spec& spec, const std::string& name, Deps& deps) {
  if (!deps.actions.insert(name).second)
    return;
  if (const ActionDef* a = spec.find_action(name))
    for (const auto& l : a->loc_params)
      add_type(spec, l.type.name, deps);
}

void add_device(const Spec& spec, const std::string& name, Deps& deps) {
  if (!deps.devices.insert(name).second)
    return;
  if (const DeviceDef* d = spec.find_device(name)) {
    for (const auto& l : d->locations)
      add_type(spec, l.type.name, deps);
    for (const auto& c : d->components)
      add_action(spec, c.action.text, deps);
  }
}

Spec subset(const Spec& spec, const Deps& deps) {
  Spec out;
  for (const auto& t : spec.types)
    if (deps.types.count(t.name.text))
      out.types.push_back(t);
  for (const auto& a : spec.actions)
    if (deps.actions.count(a.name.text))
      out.actions.push_back(a);
  for (const auto& d : spec.devices)
    if (deps.devices.count(d.name.text))
      out.devices.push_back(d);
  return out;
}

} // namespace

std::string cache_key(const Spec& spec, DefKind kind, std::string_view name,
                      std::string_view query) {
  Deps deps;
  const std::string n(name);
  switch (kind) {
  case DefKind::Type: add_type(spec, n, deps); break;
  case DefKind::Action: add_action(spec, n, deps); break;
  case DefKind::Device: add_device(spec, n, deps); break;
  }
  return std::string(query) + " " + std::string(to_string(kind)) + " " + n + "\n" +
         pretty_print(subset(spec, deps));
}

std::string scenario_cache_key(const Spec& spec, const ScenarioDef& s, std::string_view query) {
  Deps deps;
  add_device(spec, s.device.text, deps);
  Spec sub = subset(spec, deps);
  ScenarioDef copy = s;
  copy.tests.clear();
  sub.scenarios.push_back(std::move(copy));
  return std::string(query) + " scenario " + s.name.text + "\n" + pretty_print(sub);
}

std::string options_key(const SolveOptions& opts) {
  return "box " + opts.box.key() + " nodes " + std::to_string(opts.budget.max_nodes) + " ms " +
         std::to_string(opts.budget.max_time.count()) +
         (opts.check_determinacy ? " determinacy" : "");
}

} // namespace csx
