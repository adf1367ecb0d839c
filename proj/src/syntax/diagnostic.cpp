#include "csx/diagnostic.hpp"

#include <algorithm>

namespace csx {

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::uint32_t SourceSet::add(std::string name, std::string text) {
  files_.push_back({std::move(name), std::move(text)});
  return static_cast<std::uint32_t>(files_.size() - 1);
}

SourceSet::Position SourceSet::position(std::uint32_t file, std::uint32_t offset) const {
  Position pos;
  if (file >= files_.size())
    return pos;
  const auto& text = files_[file].text;
  const auto limit = std::min<std::size_t>(offset, text.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

std::string SourceSet::render(const Diagnostic& d) const {
  std::string out;
  if (d.span.file < files_.size()) {
    auto pos = position(d.span.file, d.span.begin);
    out = files_[d.span.file].name + ":" + std::to_string(pos.line) + ":" +
          std::to_string(pos.column) + ": ";
  }
  out += d.severity == Severity::Error ? "error: " : "warning: ";
  out += d.message;
  return out;
}

} // namespace csx
