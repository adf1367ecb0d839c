#pragma once

#include "csx/ast.hpp"
#include "csx/diagnostic.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csx {

struct ParseError {
  Span span;
  std::string message;
  std::vector<std::string> expected;
};

struct ParseResult {
  std::optional<Spec> spec;
  std::vector<ParseError> errors;

  bool ok() const { return spec.has_value() && errors.empty(); }
};

/// Parses a whole `.csx` source. On failure `spec` is empty and `errors`
/// holds every error found after resynchronizing at top-level keywords.
ParseResult parse(std::string_view text, std::uint32_t file = 0);

struct ExprParseResult {
  std::optional<Expr> expr;
  std::vector<ParseError> errors;
};

/// Parses a standalone expression (job constraints, objectives, hover).
ExprParseResult parse_expr(std::string_view text, std::uint32_t file = 0);

/// Parses a dotted path such as `block.sheet.width`.
std::optional<Path> parse_path(std::string_view text);

std::vector<Diagnostic> to_diagnostics(const std::vector<ParseError>& errors);

std::string pretty_print(const Spec& spec);
std::string pretty_print(const Expr& expr);

/// Distributes scenario bindings, constraints and objective onto one test
/// case per expectation. Idempotent; other constructs are untouched.
Spec desugar(Spec spec);

} // namespace csx
