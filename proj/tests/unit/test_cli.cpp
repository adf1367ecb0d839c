#include "csx/cli.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace csx;
using namespace csx::cli;
namespace fs = std::filesystem;

namespace {

struct Captured {
  int code = -1;
  std::string out, err;
};

template <class F>
Captured capture(F&& f) {
  std::ostringstream out, err;
  Captured r;
  r.code = f(Io{out, err});
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string spec(const std::string& name) { return fixture::spec_path(name); }

// A scratch directory removed at the end of the test.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("csx-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

} // namespace

TEST(Cli, CheckCleanSpecs) {
  Cache cache;
  for (const char* name : {"tiny.csx", "perfect_binder.csx", "booklet_maker.csx"}) {
    Captured r = capture([&](Io io) { return cmd_check({spec(name)}, cache, SolveOptions(), io); });
    EXPECT_EQ(r.code, kOk) << name << r.err;
  }
  Captured r = capture([&](Io io) { return cmd_check({spec("tiny.csx")}, cache, SolveOptions(), io); });
  EXPECT_NE(r.out.find("inhabited type Sheet"), std::string::npos);
  EXPECT_NE(r.out.find("inhabited device D"), std::string::npos);
}

TEST(Cli, CheckReportsFindings) {
  Cache cache;
  Captured r = capture([&](Io io) { return cmd_check({spec("uninhabited.csx")}, cache, SolveOptions(), io); });
  EXPECT_EQ(r.code, kFindings);
  EXPECT_NE(r.err.find("uninhabited.csx:1:6: error: type 'T' is not inhabited"), std::string::npos);
}

TEST(Cli, CheckParseAndIoErrors) {
  TempDir dir;
  Cache cache;
  const std::string bad = dir.write("bad.csx", "type T {\n  x: int\n");
  Captured r = capture([&](Io io) { return cmd_check({bad}, cache, SolveOptions(), io); });
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("bad.csx:"), std::string::npos);
  r = capture([&](Io io) { return cmd_check({(dir.path / "missing.csx").string()}, cache, SolveOptions(), io); });
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("missing.csx"), std::string::npos);
}

TEST(Cli, SecondCheckUsesCache) {
  Cache cache;
  capture([&](Io io) { return cmd_check({spec("booklet_maker.csx")}, cache, SolveOptions(), io); });
  const auto calls = fd::solver_calls();
  Captured r = capture([&](Io io) { return cmd_check({spec("booklet_maker.csx")}, cache, SolveOptions(), io); });
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(fd::solver_calls(), calls);
}

TEST(Cli, ReadSourcesFromDirectory) {
  TempDir dir;
  dir.write("b.csx", "type B { x: int }");
  dir.write("a.csx", "type A { x: int }");
  dir.write("notes.txt", "ignored");
  auto files = read_sources({dir.path.string()});
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(fs::path(files[0].name).filename(), "a.csx");
  EXPECT_EQ(fs::path(files[1].name).filename(), "b.csx");
  EXPECT_THROW(read_sources({(dir.path / "nope").string()}), std::runtime_error);
}

TEST(Cli, MultipleFilesFormOneWorkspace) {
  TempDir dir;
  const std::string src = fixture::read_text(spec("tiny.csx"));
  const auto split = src.find("action");
  const std::string a = dir.write("types.csx", src.substr(0, split));
  const std::string b = dir.write("rest.csx", src.substr(split));
  Cache cache;
  Captured r = capture([&](Io io) { return cmd_test({a, b}, TestArgs{}, cache, SolveOptions(), io); });
  EXPECT_EQ(r.code, kOk) << r.err;
}

TEST(Cli, TestCommand) {
  Cache cache;
  Captured r = capture([&](Io io) { return cmd_test({spec("tiny.csx")}, TestArgs{}, cache, SolveOptions(), io); });
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out.substr(0, 20), "PASS trimTwo (found)");
  r = capture([&](Io io) { return cmd_test({spec("tiny.csx")}, TestArgs{{"nope"}, false}, cache, SolveOptions(), io); });
  EXPECT_EQ(r.code, kUsage);
  r = capture([&](Io io) { return cmd_test({spec("perfect_binder.csx")}, TestArgs{{"largestBook"}, true}, cache, SolveOptions(), io); });
  EXPECT_EQ(r.code, kOk);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["name"], "largestBook");
  EXPECT_EQ(j[0]["objective"], 4800000000LL);
  EXPECT_EQ(j[0]["expectations"][0]["verdict"], "pass");
}

TEST(Cli, TestCommandFailingScenario) {
  TempDir dir;
  const std::string f = dir.write("w.csx", fixture::read_text(spec("tiny.csx")) +
                                               "scenario wrong for D {\n  a.w = 10\n  b.w = 8\n  expect [c.t == 3]\n}\n");
  Cache cache;
  Captured r = capture([&](Io io) { return cmd_test({f}, TestArgs{}, cache, SolveOptions(), io); });
  EXPECT_EQ(r.code, kFindings);
  EXPECT_NE(r.out.find("FAIL wrong"), std::string::npos);
  EXPECT_NE(r.out.find("c.t = 2"), std::string::npos);
}

TEST(Cli, SolveCommand) {
  SolveArgs args;
  args.device = "D";
  args.set = {"a.w=10", "a.h=20", "b.w=8"};
  Captured r = capture([&](Io io) { return cmd_solve({spec("tiny.csx")}, args, SolveOptions(), io); });
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "a_w = 10\na_h = 20\nb_w = 8\nb_h = 20\nc_t = 2\n");

  args.format = ConfigFormat::Json;
  args.objective = "maximize:b.h";
  SolveOptions opts;
  opts.box = fd::DomainBox(1, 50);
  r = capture([&](Io io) { return cmd_solve({spec("tiny.csx")}, args, opts, io); });
  EXPECT_EQ(r.code, kOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "found");
  EXPECT_EQ(j["objective"], 20);
}

TEST(Cli, SolveExitCodes) {
  SolveArgs args;
  args.device = "D";
  args.set = {"a.w=5", "b.w=8"};
  Captured r = capture([&](Io io) { return cmd_solve({spec("tiny.csx")}, args, SolveOptions(), io); });
  EXPECT_EQ(r.code, kEmpty);
  EXPECT_NE(r.err.find("empty configuration space"), std::string::npos);

  args.set = {"a.zz=1"};
  EXPECT_EQ(capture([&](Io io) { return cmd_solve({spec("tiny.csx")}, args, SolveOptions(), io); }).code, kUsage);
  args.set = {"a.w"};
  EXPECT_EQ(capture([&](Io io) { return cmd_solve({spec("tiny.csx")}, args, SolveOptions(), io); }).code, kUsage);
  args.set = {};
  args.constraints = {"a.w +"};
  EXPECT_EQ(capture([&](Io io) { return cmd_solve({spec("tiny.csx")}, args, SolveOptions(), io); }).code, kUsage);
  args.constraints = {};
  args.objective = "sideways:a.w";
  EXPECT_EQ(capture([&](Io io) { return cmd_solve({spec("tiny.csx")}, args, SolveOptions(), io); }).code, kUsage);
  args.objective.reset();
  args.device = "Nope";
  EXPECT_EQ(capture([&](Io io) { return cmd_solve({spec("tiny.csx")}, args, SolveOptions(), io); }).code, kUsage);

  // A parity constraint the propagator cannot refute, with a tiny budget.
  args.device = "D";
  args.constraints = {"2 * a.w == 2 * b.h + 1"};
  SolveOptions opts;
  opts.budget.max_nodes = 200;
  r = capture([&](Io io) { return cmd_solve({spec("tiny.csx")}, args, opts, io); });
  EXPECT_EQ(r.code, kExhausted);
}

TEST(Cli, InhabitCommand) {
  Captured r = capture([&](Io io) { return cmd_inhabit({spec("uninhabited.csx")}, "T", SolveOptions(), io); });
  EXPECT_EQ(r.code, kFindings);
  EXPECT_EQ(r.out, "type T: uninhabited\n");
  r = capture([&](Io io) { return cmd_inhabit({spec("tiny.csx")}, "Trim", SolveOptions(), io); });
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out.substr(0, 24), "action Trim: inhabited\n ");
  EXPECT_EQ(capture([&](Io io) { return cmd_inhabit({spec("tiny.csx")}, "Nope", SolveOptions(), io); }).code, kUsage);
}

TEST(Cli, ExportIsDeterministic) {
  Captured a = capture([&](Io io) { return cmd_export({spec("tiny.csx")}, "D", Dialect::Interchange, io); });
  Captured b = capture([&](Io io) { return cmd_export({spec("tiny.csx")}, "D", Dialect::Interchange, io); });
  EXPECT_EQ(a.code, kOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, fixture::read_text(fixture::golden_dir() + "/tiny_D.mzn"));
  EXPECT_EQ(a.err, "D: 5 variables, 7 constraints\n");
  Captured pb = capture([&](Io io) { return cmd_export({spec("perfect_binder.csx")}, "PerfectBinder", Dialect::Interchange, io); });
  Captured pb2 = capture([&](Io io) { return cmd_export({spec("perfect_binder.csx")}, "PerfectBinder", Dialect::Interchange, io); });
  EXPECT_EQ(pb.out, pb2.out);
  EXPECT_EQ(capture([&](Io io) { return cmd_export({spec("tiny.csx")}, "X", Dialect::Debug, io); }).code, kUsage);
}

TEST(Cli, BenchSeparatesPhases) {
  auto files = read_sources({spec("tiny.csx")});
  auto samples = bench(files, {}, 3, SolveOptions());
  ASSERT_EQ(samples.size(), 3u);
  for (const auto& s : samples) {
    EXPECT_EQ(s.scenario, "trimTwo");
    EXPECT_GT(s.translate_ns, 0);
    EXPECT_GT(s.solve_ns, 0);
    EXPECT_EQ(s.vars, 5u);
    EXPECT_TRUE(s.passed);
  }
  Captured r = capture([&](Io io) { return cmd_bench({spec("tiny.csx")}, BenchArgs{{}, 2, true}, SolveOptions(), io); });
  EXPECT_EQ(r.code, kOk);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["solve_ns"].size(), 2u);
  r = capture([&](Io io) { return cmd_bench({spec("tiny.csx")}, BenchArgs{{"zz"}, 2, false}, SolveOptions(), io); });
  EXPECT_EQ(r.code, kUsage);
  r = capture([&](Io io) { return cmd_bench({spec("tiny.csx")}, BenchArgs{{}, 0, false}, SolveOptions(), io); });
  EXPECT_EQ(r.code, kUsage);
}
