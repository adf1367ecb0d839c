#include "support.hpp"

#include <gtest/gtest.h>

using namespace csx;

namespace {

const std::string kSheet = "type Sheet { w: int h: int [w > 0] [h > 0] }\n";
const std::string kTrim =
    "action Trim(in: Sheet, out: Sheet) { parameter t: int [t >= 0] [out.w == in.w - t] [out.h == in.h] }\n";

AnalysisResult run(const std::string& text) {
  ParseResult p = parse(text);
  EXPECT_TRUE(p.ok()) << (p.errors.empty() ? "" : p.errors.front().message);
  if (!p.ok())
    return {};
  return analyze(desugar(std::move(*p.spec)));
}

std::vector<std::string> errors(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& d : run(text).diagnostics)
    if (d.severity == Severity::Error)
      out.push_back(d.message);
  return out;
}

bool has_error(const std::string& text, const std::string& fragment) {
  for (const auto& m : errors(text))
    if (m.find(fragment) != std::string::npos)
      return true;
  return false;
}

} // namespace

TEST(Sema, UninhabitedTypeIsWellTyped) {
  AnalysisResult r = run("type T { i: int [i != i] }");
  ASSERT_TRUE(r.ok());
  const Expr& c = r.typed->spec().types[0].constraints[0];
  EXPECT_EQ(r.typed->type_of(c), Ty::boolean());
}

TEST(Sema, FixturesAnalyzeCleanly) {
  for (const char* name : {"tiny.csx", "perfect_binder.csx", "booklet_maker.csx"}) {
    AnalysisResult r = run(fixture::read_text(fixture::spec_path(name)));
    EXPECT_TRUE(r.ok()) << name;
    EXPECT_TRUE(r.diagnostics.empty()) << name << ": " << r.diagnostics.front().message;
  }
}

TEST(Sema, DeviceProjectionsResolve) {
  AnalysisResult r = run(kSheet + "device D { location a: Sheet location b: Sheet [a.w == b.w] }");
  ASSERT_TRUE(r.ok());
  const Expr& c = r.typed->spec().devices[0].constraints[0];
  const auto& bin = std::get<Binary>(c->kind);
  for (const Expr& side : {bin.lhs, bin.rhs}) {
    EXPECT_EQ(r.typed->type_of(side), Ty::integer());
    auto decl = r.typed->decl_of(side);
    ASSERT_TRUE(decl);
    EXPECT_EQ(decl->kind, DeclKind::TypeProp);
    EXPECT_EQ(decl->owner, "Sheet");
    EXPECT_EQ(decl->index, 0u);
  }
  auto base = r.typed->decl_of(std::get<Proj>(bin.lhs->kind).base);
  ASSERT_TRUE(base);
  EXPECT_EQ(base->kind, DeclKind::DeviceLocation);
}

TEST(Sema, ActionNamesResolve) {
  AnalysisResult r = run(kSheet + kTrim);
  ASSERT_TRUE(r.ok());
  const auto& cons = r.typed->spec().actions[0].constraints;
  EXPECT_EQ(r.typed->decl_of(std::get<Binary>(cons[0]->kind).lhs)->kind, DeclKind::ActionParam);
  const Expr& out_w = std::get<Binary>(cons[1]->kind).lhs;
  EXPECT_EQ(r.typed->decl_of(std::get<Proj>(out_w->kind).base)->kind, DeclKind::ActionLocParam);
}

TEST(Sema, NestedTypes) {
  AnalysisResult r = run(kSheet + "type Stack { sheet: Sheet count: int derived t = sheet.w * count [count > 0] }");
  ASSERT_TRUE(r.ok());
}

TEST(Sema, UnresolvedName) {
  EXPECT_TRUE(has_error("type T { i: int [j > 0] }", "unresolved name 'j'"));
}

TEST(Sema, UnknownType) {
  EXPECT_TRUE(has_error("type T { s: Paper }", "unknown type 'Paper'"));
}

TEST(Sema, DuplicateNames) {
  EXPECT_TRUE(has_error("type T { i: int } type T { j: int }", "duplicate type 'T'"));
  EXPECT_TRUE(has_error("type T { i: int i: bool }", "duplicate member 'i'"));
}

TEST(Sema, ConstraintsMustBeBoolean) {
  EXPECT_FALSE(errors("type T { i: int [i + 1] }").empty());
}

TEST(Sema, OperatorTypes) {
  EXPECT_TRUE(has_error("type T { i: int b: bool [i + b > 0] }", "type mismatch"));
  EXPECT_TRUE(has_error("type T { i: int [not i] }", "type mismatch"));
  EXPECT_TRUE(has_error("type T { i: int b: bool [i == b] }", "type mismatch"));
  EXPECT_TRUE(errors("type T { a: bool b: bool [a == b] [a != b or a implies b] }").empty());
}

TEST(Sema, ProjectionErrors) {
  EXPECT_TRUE(has_error(kSheet + "type S { s: Sheet [s.depth > 0] }", "has no property 'depth'"));
  EXPECT_TRUE(has_error("type T { i: int [i.x > 0] }", "off primitive type"));
}

TEST(Sema, TypeCycles) {
  auto errs = errors("type A { b: B } type B { a: A }");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0], "cyclic type nesting: A -> B -> A");
  EXPECT_TRUE(has_error("type A { a: A }", "cyclic type nesting: A -> A"));
}

TEST(Sema, DerivedCycles) {
  auto errs = errors("type T { i: int derived a = b + i derived b = a * 2 }");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0], "cyclic derived properties: T.a -> T.b -> T.a");
  EXPECT_TRUE(errors("type T { i: int derived a = i derived b = a + a }").empty());
}

TEST(Sema, ComponentChecks) {
  const std::string base = kSheet + kTrim + "type Roll { len: int }\n";
  EXPECT_TRUE(has_error(base + "device D { location a: Sheet component c = Cut(a, a) }",
                        "unknown action 'Cut'"));
  EXPECT_TRUE(has_error(base + "device D { location a: Sheet component c = Trim(a) }",
                        "passes 1 locations but action 'Trim' expects 2"));
  EXPECT_TRUE(has_error(base + "device D { location a: Sheet component c = Trim(a, z) }",
                        "unknown location 'z'"));
  EXPECT_TRUE(has_error(base + "device D { location a: Sheet location r: Roll component c = Trim(a, r) }",
                        "type mismatch: location 'r'"));
  EXPECT_TRUE(has_error(base + "device D { location t: Sheet location b: Sheet component c = Trim(t, b) { [t > 0] } }",
                        "shadows location 't'"));
}

TEST(Sema, ComponentBlockScope) {
  const std::string base = kSheet + kTrim;
  AnalysisResult r = run(base + "device D { location a: Sheet location b: Sheet component c = Trim(a, b) { [t <= 5] [a.w > 2] } [c.t >= 1] }");
  ASSERT_TRUE(r.ok()) << r.diagnostics.front().message;
  const auto& comp = r.typed->spec().devices[0].components[0];
  EXPECT_EQ(r.typed->decl_of(std::get<Binary>(comp.constraints[0]->kind).lhs)->kind,
            DeclKind::ComponentParam);
  // Action location parameter names are not in scope of a component block.
  EXPECT_TRUE(has_error(base + "device D { location a: Sheet location b: Sheet component c = Trim(a, b) { [in.w > 0] } }",
                        "unresolved name 'in'"));
}

TEST(Sema, SelfOnlyInComponents) {
  EXPECT_TRUE(has_error("type T { i: int [self.i > 0] }", "'self' is only valid inside a component block"));
}

TEST(Sema, LocationAndParameterTypes) {
  EXPECT_TRUE(has_error("device D { location n: int }", "must have a user-defined type"));
  EXPECT_TRUE(has_error(kSheet + "action A(s: Sheet) { parameter p: Sheet }", "must have type int or bool"));
}

TEST(Sema, ScenarioChecks) {
  const std::string base = kSheet + kTrim + "device D { location a: Sheet location b: Sheet component c = Trim(a, b) }\n";
  EXPECT_TRUE(errors(base + "scenario S for D { a.w = 3 c.t = 1 objective minimize b.w expect [b.h > 0] }").empty());
  EXPECT_TRUE(has_error(base + "scenario S for E { }", "unknown device 'E'"));
  EXPECT_TRUE(has_error(base + "scenario S for D { a.w = true }", "type mismatch"));
  EXPECT_TRUE(has_error(base + "scenario S for D { a.q = 1 }", "has no defining property 'q'"));
  EXPECT_TRUE(has_error(base + "scenario S for D { a = 1 }", "does not name a primitive property"));
  EXPECT_TRUE(has_error(base + "scenario S for D { c.z = 1 }", "has no parameter 'z'"));
  EXPECT_FALSE(errors(base + "scenario S for D { objective maximize a.w > 0 }").empty());
  EXPECT_FALSE(errors(base + "scenario S for D { expect [a.w] }").empty());
}

TEST(Sema, DiagnosticsCarrySpans) {
  ParseResult p = parse("type T {\n  i: int\n  [j > 0]\n}\n", 0);
  ASSERT_TRUE(p.ok());
  AnalysisResult r = analyze(std::move(*p.spec));
  ASSERT_EQ(r.diagnostics.size(), 1u);
  SourceSet sources;
  sources.add("t.csx", "type T {\n  i: int\n  [j > 0]\n}\n");
  EXPECT_EQ(sources.render(r.diagnostics[0]), "t.csx:3:4: error: unresolved name 'j'");
}

TEST(Sema, AnalyzeInDevice) {
  TypedSpec typed = fixture::typed_from(kSheet + kTrim + "device D { location a: Sheet location b: Sheet component c = Trim(a, b) }");
  Expr e = *parse_expr("a.w - b.w == c.t").expr;
  AnalysisResult r = analyze_in_device(typed, "D", {e});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.typed->type_of(e), Ty::boolean());
  EXPECT_FALSE(analyze_in_device(typed, "D", {*parse_expr("a.x").expr}).ok());
  EXPECT_FALSE(analyze_in_device(typed, "Nope", {e}).ok());
}

TEST(Sema, Leaves) {
  TypedSpec typed = fixture::typed_from(fixture::read_text(fixture::spec_path("tiny.csx")));
  std::vector<std::string> dotted;
  for (const auto& l : device_leaves(typed, typed.device("D")))
    dotted.push_back(l.dotted());
  EXPECT_EQ(dotted, (std::vector<std::string>{"a.w", "a.h", "b.w", "b.h", "c.t"}));

  auto ok = resolve_leaf(typed, typed.device("D"), *parse_path("c.t"));
  ASSERT_TRUE(ok.leaf);
  EXPECT_EQ(ok.leaf->sort, Sort::Int);
  auto bad = resolve_leaf(typed, typed.device("D"), *parse_path("a.depth"));
  EXPECT_FALSE(bad.leaf);
  EXPECT_FALSE(bad.error.empty());
}
