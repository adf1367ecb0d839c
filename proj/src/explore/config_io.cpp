#include "csx/explore.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

namespace csx {
namespace {

void flat(std::ostream& os, const ModelValue& m, const std::string& prefix) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::string name = prefix.empty() ? m.names()[i] : prefix + "_" + m.names()[i];
    const Value& v = m.values()[i];
    if (v.is_model())
      flat(os, v.as_model(), name);
    else
      os << name << " = " << to_string(v) << '\n';
  }
}

void tree(std::ostream& os, const ModelValue& m, int depth) {
  const std::string indent(2 * depth, ' ');
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Value& v = m.values()[i];
    if (v.is_model()) {
      os << indent << m.names()[i] << " {\n";
      tree(os, v.as_model(), depth + 1);
      os << indent << "}\n";
    } else {
      os << indent << m.names()[i] << " = " << to_string(v) << '\n';
    }
  }
}

nlohmann::ordered_json json(const ModelValue& m) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Value& v = m.values()[i];
    if (v.is_model())
      out[m.names()[i]] = json(v.as_model());
    else if (v.is_bool())
      out[m.names()[i]] = v.as_bool();
    else
      out[m.names()[i]] = v.as_int();
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

} // namespace

std::string format_configuration(const ModelValue& config, ConfigFormat format) {
  std::ostringstream os;
  switch (format) {
  case ConfigFormat::Flat: flat(os, config, ""); break;
  case ConfigFormat::Tree: tree(os, config, 0); break;
  case ConfigFormat::Json: os << json(config).dump(2) << '\n'; break;
  }
  return os.str();
}

std::optional<Binding> parse_binding(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos)
    return std::nullopt;
  auto path = parse_path(trim(text.substr(0, eq)));
  const auto value = trim(text.substr(eq + 1));
  if (!path || value.empty())
    return std::nullopt;
  if (value == "true")
    return Binding{*path, true};
  if (value == "false")
    return Binding{*path, false};
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || end != value.data() + value.size())
    return std::nullopt;
  return Binding{*path, v};
}

std::vector<std::pair<Leaf, std::optional<Value>>> leaf_values(const TypedSpec& tspec,
                                                               const DeviceDef& device,
                                                               const ModelValue* config) {
  std::vector<std::pair<Leaf, std::optional<Value>>> out;
  for (auto& leaf : device_leaves(tspec, device)) {
    std::optional<Value> v;
    if (config)
      if (const Value* found = value_at(*config, leaf.path))
        v = *found;
    out.emplace_back(std::move(leaf), std::move(v));
  }
  return out;
}

} // namespace csx
