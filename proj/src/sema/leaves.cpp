#include "csx/sema.hpp"

namespace csx {

std::string Leaf::dotted() const {
  std::string out;
  for (const auto& p : path) {
    if (!out.empty())
      out += '.';
    out += p;
  }
  return out;
}

namespace {

void walk_type(const TypedSpec& tspec, const TypeDef& type, std::vector<std::string>& prefix,
               std::vector<Leaf>& out) {
  for (const auto& p : type.props) {
    prefix.push_back(p.name.text);
    if (p.type.name == "int")
      out.push_back(Leaf{prefix, Sort::Int});
    else if (p.type.name == "bool")
      out.push_back(Leaf{prefix, Sort::Bool});
    else
      walk_type(tspec, tspec.type(p.type.name), prefix, out);
    prefix.pop_back();
  }
}

} // namespace

std::vector<Leaf> type_leaves(const TypedSpec& tspec, const TypeDef& type) {
  std::vector<Leaf> out;
  std::vector<std::string> prefix;
  walk_type(tspec, type, prefix, out);
  return out;
}

std::vector<Leaf> device_leaves(const TypedSpec& tspec, const DeviceDef& device) {
  std::vector<Leaf> out;
  std::vector<std::string> prefix;
  for (const auto& l : device.locations) {
    prefix.push_back(l.name.text);
    walk_type(tspec, tspec.type(l.type.name), prefix, out);
    prefix.pop_back();
  }
  for (const auto& c : device.components) {
    for (const auto& p : tspec.action(c.action.text).params)
      out.push_back(Leaf{{c.name.text, p.name.text}, p.type.name == "int" ? Sort::Int : Sort::Bool});
  }
  return out;
}

} // namespace csx
