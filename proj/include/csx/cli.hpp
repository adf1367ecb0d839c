#pragma once

#include "csx/explore.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace csx::cli {

/// Exit codes shared by the commands.
inline constexpr int kOk = 0;
inline constexpr int kFindings = 1;
inline constexpr int kUsage = 2;
inline constexpr int kEmpty = 3;
inline constexpr int kExhausted = 4;

struct Io {
  std::ostream& out;
  std::ostream& err;
};

/// Reads `.csx` files; directories contribute their `.csx` files in name
/// order. Throws std::runtime_error naming the unreadable path.
std::vector<SourceFile> read_sources(const std::vector<std::string>& paths);

int cmd_check(const std::vector<std::string>& paths, Cache& cache, const SolveOptions& opts,
              Io io);

struct TestArgs {
  std::vector<std::string> scenarios; // empty: all
  bool json = false;
};
int cmd_test(const std::vector<std::string>& paths, const TestArgs& args, Cache& cache,
             const SolveOptions& opts, Io io);

struct SolveArgs {
  std::string device;
  std::vector<std::string> set;         // `path=value`
  std::vector<std::string> constraints; // expressions in device scope
  std::optional<std::string> objective; // `minimize:<expr>` or `maximize:<expr>`
  ConfigFormat format = ConfigFormat::Flat;
};
int cmd_solve(const std::vector<std::string>& paths, const SolveArgs& args,
              const SolveOptions& opts, Io io);

int cmd_inhabit(const std::vector<std::string>& paths, const std::string& name,
                const SolveOptions& opts, Io io);

int cmd_export(const std::vector<std::string>& paths, const std::string& device, Dialect dialect,
               Io io);

struct BenchArgs {
  std::vector<std::string> scenarios; // empty: all
  int iterations = 10;
  bool json = false;
};

struct BenchSample {
  std::string scenario;
  int iteration = 0;
  std::int64_t translate_ns = 0;
  std::int64_t solve_ns = 0;
  std::size_t vars = 0;
  std::size_t constraints = 0;
  bool passed = false;
};

/// One sample per scenario and iteration. Translation covers parsing,
/// analysis and lowering; solving covers the solver calls only.
std::vector<BenchSample> bench(const std::vector<SourceFile>& files,
                               const std::vector<std::string>& scenarios, int iterations,
                               const SolveOptions& opts);

int cmd_bench(const std::vector<std::string>& paths, const BenchArgs& args,
              const SolveOptions& opts, Io io);

} // namespace csx::cli
