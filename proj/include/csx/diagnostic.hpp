#pragma once

#include "csx/ast.hpp"

#include <string>
#include <vector>

namespace csx {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  Span span;
};

bool has_errors(const std::vector<Diagnostic>& diags);

/// Owns the text of every loaded file; span file ids index into it.
class SourceSet {
public:
  std::uint32_t add(std::string name, std::string text);

  const std::string& name(std::uint32_t file) const { return files_.at(file).name; }
  const std::string& text(std::uint32_t file) const { return files_.at(file).text; }
  std::size_t size() const { return files_.size(); }

  struct Position {
    std::uint32_t line = 1;
    std::uint32_t column = 1;
  };
  Position position(std::uint32_t file, std::uint32_t offset) const;

  /// `file:line:col: severity: message`
  std::string render(const Diagnostic& d) const;

private:
  struct File {
    std::string name;
    std::string text;
  };
  std::vector<File> files_;
};

} // namespace csx
