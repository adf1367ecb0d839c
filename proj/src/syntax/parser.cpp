#include "csx/syntax.hpp"

#include <charconv>
#include <limits>

namespace csx {
namespace {

enum class Tok { Ident, Int, Punct, End, Invalid };

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  Span span;
};

class Lexer {
public:
  Lexer(std::string_view src, std::uint32_t file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, {}, span(pos_, pos_)});
        return out;
      }
      out.push_back(next());
    }
  }

private:
  Span span(std::size_t b, std::size_t e) const {
    return Span{file_, static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(e)};
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          ++pos_;
      } else {
        return;
      }
    }
  }

  static bool alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
  static bool digit(char c) { return c >= '0' && c <= '9'; }

  Token next() {
    const std::size_t start = pos_;
    const char c = src_[pos_];
    if (alpha(c)) {
      while (pos_ < src_.size() && (alpha(src_[pos_]) || digit(src_[pos_])))
        ++pos_;
      return make(Tok::Ident, start);
    }
    if (digit(c)) {
      while (pos_ < src_.size() && digit(src_[pos_]))
        ++pos_;
      return make(Tok::Int, start);
    }
    static constexpr std::string_view two[] = {"==", "!=", "<=", ">="};
    for (auto t : two) {
      if (src_.substr(pos_, 2) == t) {
        pos_ += 2;
        return make(Tok::Punct, start);
      }
    }
    static constexpr std::string_view one = "{}()[]:,.=<>+-*";
    if (one.find(c) != std::string_view::npos) {
      ++pos_;
      return make(Tok::Punct, start);
    }
    ++pos_;
    return make(Tok::Invalid, start);
  }

  Token make(Tok kind, std::size_t start) const {
    return {kind, src_.substr(start, pos_ - start), span(start, pos_)};
  }

  std::string_view src_;
  std::uint32_t file_;
  std::size_t pos_ = 0;
};

struct Failure {
  ParseError error;
};

std::string describe(const Token& t) {
  switch (t.kind) {
  case Tok::End: return "end of input";
  case Tok::Invalid: return "invalid character '" + std::string(t.text) + "'";
  default: return "'" + std::string(t.text) + "'";
  }
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParseResult parse_spec() {
    Spec spec;
    std::vector<ParseError> errors;
    while (!at_end()) {
      try {
        if (at_kw("type")) {
          spec.types.push_back(type_def());
        } else if (at_kw("action")) {
          spec.actions.push_back(action_def());
        } else if (at_kw("device")) {
          spec.devices.push_back(device_def());
        } else if (at_kw("scenario")) {
          spec.scenarios.push_back(scenario_def());
        } else {
          fail({"type", "action", "device", "scenario"});
        }
      } catch (Failure& f) {
        errors.push_back(std::move(f.error));
        resync();
      }
    }
    ParseResult result;
    result.errors = std::move(errors);
    if (result.errors.empty())
      result.spec = std::move(spec);
    return result;
  }

  ExprParseResult parse_standalone_expr() {
    ExprParseResult result;
    try {
      Expr e = expr();
      if (!at_end())
        fail({"end of input"});
      result.expr = std::move(e);
    } catch (Failure& f) {
      result.errors.push_back(std::move(f.error));
    }
    return result;
  }

  std::optional<Path> parse_standalone_path() {
    try {
      Path p = path();
      if (!at_end())
        return std::nullopt;
      return p;
    } catch (Failure&) {
      return std::nullopt;
    }
  }

private:
  // --- token helpers ------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool at_kw(std::string_view kw, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == kw;
  }
  bool at_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  const Token& advance() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1)
      ++pos_;
    return t;
  }

  [[noreturn]] void fail(std::vector<std::string> expected, std::string message = {}) const {
    const Token& t = peek();
    if (message.empty()) {
      message = "expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i)
          message += i + 1 == expected.size() ? " or " : ", ";
        message += expected[i];
      }
      message += ", found " + describe(t);
    }
    throw Failure{ParseError{t.span, std::move(message), std::move(expected)}};
  }

  Span expect_kw(std::string_view kw) {
    if (!at_kw(kw))
      fail({"'" + std::string(kw) + "'"});
    return advance().span;
  }
  Span expect_punct(std::string_view p) {
    if (!at_punct(p))
      fail({"'" + std::string(p) + "'"});
    return advance().span;
  }

  Ident ident() {
    const Token& t = peek();
    if (t.kind != Tok::Ident)
      fail({"identifier"});
    if (is_keyword(t.text))
      fail({"identifier"}, "expected identifier, found keyword '" + std::string(t.text) + "'");
    advance();
    return Ident{std::string(t.text), t.span};
  }

  void resync() {
    if (!at_end())
      advance();
    while (!at_end() && !at_kw("type") && !at_kw("action") && !at_kw("device") &&
           !at_kw("scenario"))
      advance();
  }

  // --- definitions --------------------------------------------------------

  TypeRef type_ref() {
    const Token& t = peek();
    if (t.kind == Tok::Ident && (t.text == "int" || t.text == "bool")) {
      advance();
      return TypeRef{std::string(t.text), t.span};
    }
    if (t.kind != Tok::Ident || is_keyword(t.text))
      fail({"'int'", "'bool'", "type name"});
    advance();
    return TypeRef{std::string(t.text), t.span};
  }

  Field field() {
    Ident name = ident();
    expect_punct(":");
    return Field{std::move(name), type_ref()};
  }

  DerivedDef derived() {
    expect_kw("derived");
    Ident name = ident();
    expect_punct("=");
    return DerivedDef{std::move(name), expr()};
  }

  Expr constraint() {
    expect_punct("[");
    Expr e = expr();
    expect_punct("]");
    return e;
  }

  TypeDef type_def() {
    TypeDef def;
    const Span start = expect_kw("type");
    def.name = ident();
    expect_punct("{");
    while (!at_punct("}")) {
      if (at_kw("derived"))
        def.derived.push_back(derived());
      else if (at_punct("["))
        def.constraints.push_back(constraint());
      else if (peek().kind == Tok::Ident && !is_keyword(peek().text))
        def.props.push_back(field());
      else
        fail({"property", "'derived'", "'['", "'}'"});
    }
    def.span = merge(start, expect_punct("}"));
    return def;
  }

  ActionDef action_def() {
    ActionDef def;
    const Span start = expect_kw("action");
    def.name = ident();
    expect_punct("(");
    if (!at_punct(")")) {
      def.loc_params.push_back(field());
      while (at_punct(",")) {
        advance();
        def.loc_params.push_back(field());
      }
    }
    expect_punct(")");
    expect_punct("{");
    while (!at_punct("}")) {
      if (at_kw("parameter")) {
        advance();
        def.params.push_back(field());
      } else if (at_kw("derived")) {
        def.derived.push_back(derived());
      } else if (at_punct("[")) {
        def.constraints.push_back(constraint());
      } else {
        fail({"'parameter'", "'derived'", "'['", "'}'"});
      }
    }
    def.span = merge(start, expect_punct("}"));
    return def;
  }

  ComponentDef component() {
    ComponentDef comp;
    const Span start = expect_kw("component");
    comp.name = ident();
    expect_punct("=");
    comp.action = ident();
    expect_punct("(");
    if (!at_punct(")")) {
      comp.loc_args.push_back(ident());
      while (at_punct(",")) {
        advance();
        comp.loc_args.push_back(ident());
      }
    }
    Span end = expect_punct(")");
    if (at_punct("{")) {
      advance();
      while (!at_punct("}")) {
        if (!at_punct("["))
          fail({"'['", "'}'"});
        comp.constraints.push_back(constraint());
      }
      end = expect_punct("}");
    }
    comp.span = merge(start, end);
    return comp;
  }

  DeviceDef device_def() {
    DeviceDef def;
    const Span start = expect_kw("device");
    def.name = ident();
    expect_punct("{");
    while (!at_punct("}")) {
      if (at_kw("location")) {
        advance();
        def.locations.push_back(field());
      } else if (at_kw("component")) {
        def.components.push_back(component());
      } else if (at_kw("derived")) {
        def.derived.push_back(derived());
      } else if (at_punct("[")) {
        def.constraints.push_back(constraint());
      } else {
        fail({"'location'", "'component'", "'derived'", "'['", "'}'"});
      }
    }
    def.span = merge(start, expect_punct("}"));
    return def;
  }

  Path path() {
    Path p;
    p.parts.push_back(ident());
    while (at_punct(".")) {
      advance();
      p.parts.push_back(ident());
    }
    return p;
  }

  Literal literal() {
    if (at_kw("true") || at_kw("false"))
      return Literal{advance().text == "true"};
    bool negative = false;
    if (at_punct("-")) {
      advance();
      negative = true;
    }
    if (peek().kind != Tok::Int)
      fail({"integer", "'true'", "'false'"});
    return Literal{int_value(advance(), negative)};
  }

  ScenarioDef scenario_def() {
    ScenarioDef def;
    const Span start = expect_kw("scenario");
    def.name = ident();
    expect_kw("for");
    def.device = ident();
    expect_punct("{");
    while (!at_punct("}")) {
      if (at_kw("objective")) {
        advance();
        if (def.objective)
          fail({}, "a scenario has at most one objective");
        Sense sense;
        if (at_kw("minimize"))
          sense = Sense::Minimize;
        else if (at_kw("maximize"))
          sense = Sense::Maximize;
        else
          fail({"'minimize'", "'maximize'"});
        advance();
        def.objective = Objective{sense, expr()};
      } else if (at_kw("expect")) {
        advance();
        def.expectations.push_back(constraint());
      } else if (at_punct("[")) {
        def.constraints.push_back(constraint());
      } else if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
        Path p = path();
        expect_punct("=");
        def.bindings.push_back(Binding{std::move(p), literal()});
      } else {
        fail({"binding", "'['", "'objective'", "'expect'", "'}'"});
      }
    }
    def.span = merge(start, expect_punct("}"));
    return def;
  }

  // --- expressions --------------------------------------------------------

  std::int64_t int_value(const Token& t, bool negative) {
    std::uint64_t magnitude = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), magnitude);
    constexpr auto max = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
    if (ec != std::errc{} || magnitude > max + (negative ? 1 : 0))
      throw Failure{ParseError{t.span, "integer literal out of range", {}}};
    if (negative)
      return magnitude == max + 1 ? std::numeric_limits<std::int64_t>::min()
                                  : -static_cast<std::int64_t>(magnitude);
    return static_cast<std::int64_t>(magnitude);
  }

  Expr expr() { return implies_expr(); }

  Expr implies_expr() {
    Expr lhs = or_expr();
    if (at_kw("implies")) {
      advance();
      Expr rhs = implies_expr();
      Span s = merge(lhs->span, rhs->span);
      return make_binary(BinaryOp::Implies, std::move(lhs), std::move(rhs), s);
    }
    return lhs;
  }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (at_kw("or")) {
      advance();
      Expr rhs = and_expr();
      Span s = merge(lhs->span, rhs->span);
      lhs = make_binary(BinaryOp::Or, std::move(lhs), std::move(rhs), s);
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (at_kw("and")) {
      advance();
      Expr rhs = not_expr();
      Span s = merge(lhs->span, rhs->span);
      lhs = make_binary(BinaryOp::And, std::move(lhs), std::move(rhs), s);
    }
    return lhs;
  }

  Expr not_expr() {
    if (at_kw("not")) {
      const Span start = advance().span;
      Expr operand = not_expr();
      Span s = merge(start, operand->span);
      return make_unary(UnaryOp::Not, std::move(operand), s);
    }
    return cmp_expr();
  }

  Expr cmp_expr() {
    Expr lhs = add_expr();
    static const std::pair<std::string_view, BinaryOp> ops[] = {
        {"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}, {"<", BinaryOp::Lt},
        {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge}};
    for (const auto& [text, op] : ops) {
      if (at_punct(text)) {
        advance();
        Expr rhs = add_expr();
        Span s = merge(lhs->span, rhs->span);
        return make_binary(op, std::move(lhs), std::move(rhs), s);
      }
    }
    return lhs;
  }

  Expr add_expr() {
    Expr lhs = mul_expr();
    while (at_punct("+") || at_punct("-")) {
      BinaryOp op = advance().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      Expr rhs = mul_expr();
      Span s = merge(lhs->span, rhs->span);
      lhs = make_binary(op, std::move(lhs), std::move(rhs), s);
    }
    return lhs;
  }

  Expr mul_expr() {
    Expr lhs = unary_expr();
    while (at_punct("*")) {
      advance();
      Expr rhs = unary_expr();
      Span s = merge(lhs->span, rhs->span);
      lhs = make_binary(BinaryOp::Mul, std::move(lhs), std::move(rhs), s);
    }
    return lhs;
  }

  Expr unary_expr() {
    if (at_punct("-")) {
      const Span start = advance().span;
      if (peek().kind == Tok::Int) {
        const Token& t = advance();
        return postfix(make_int(int_value(t, true), merge(start, t.span)));
      }
      Expr operand = unary_expr();
      Span s = merge(start, operand->span);
      return make_unary(UnaryOp::Neg, std::move(operand), s);
    }
    return postfix(primary());
  }

  Expr postfix(Expr base) {
    while (at_punct(".")) {
      advance();
      Ident member = ident();
      Span s = merge(base->span, member.span);
      base = make_proj(std::move(base), std::move(member.text), s);
    }
    return base;
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      advance();
      return make_int(int_value(t, false), t.span);
    }
    if (at_kw("true") || at_kw("false")) {
      advance();
      return make_bool(t.text == "true", t.span);
    }
    if (at_kw("self")) {
      advance();
      return make_ref("self", t.span);
    }
    if (at_punct("(")) {
      advance();
      Expr inner = expr();
      expect_punct(")");
      return inner;
    }
    if (t.kind == Tok::Ident && !is_keyword(t.text)) {
      advance();
      return make_ref(std::string(t.text), t.span);
    }
    fail({"expression"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::optional<ParseError> lex_error(const std::vector<Token>& toks) {
  for (const auto& t : toks)
    if (t.kind == Tok::Invalid)
      return ParseError{t.span, "unexpected " + describe(t), {}};
  return std::nullopt;
}

} // namespace

ParseResult parse(std::string_view text, std::uint32_t file) {
  auto toks = Lexer(text, file).run();
  if (auto err = lex_error(toks))
    return ParseResult{std::nullopt, {*err}};
  return Parser(std::move(toks)).parse_spec();
}

ExprParseResult parse_expr(std::string_view text, std::uint32_t file) {
  auto toks = Lexer(text, file).run();
  if (auto err = lex_error(toks))
    return ExprParseResult{std::nullopt, {*err}};
  return Parser(std::move(toks)).parse_standalone_expr();
}

std::optional<Path> parse_path(std::string_view text) {
  auto toks = Lexer(text, 0).run();
  if (lex_error(toks))
    return std::nullopt;
  return Parser(std::move(toks)).parse_standalone_path();
}

std::vector<Diagnostic> to_diagnostics(const std::vector<ParseError>& errors) {
  std::vector<Diagnostic> out;
  out.reserve(errors.size());
  for (const auto& e : errors)
    out.push_back(Diagnostic{Severity::Error, e.message, e.span});
  return out;
}

} // namespace csx
