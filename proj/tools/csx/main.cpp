#include "csx/cli.hpp"
#include "csx/service.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

struct Common {
  std::int64_t int_min = csx::fd::kDefaultMin;
  std::int64_t int_max = csx::fd::kDefaultMax;
  std::uint64_t budget_nodes = csx::fd::Budget{}.max_nodes;
  std::int64_t budget_ms = csx::fd::Budget{}.max_time.count();
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--int-min", c.int_min, "Lower bound of integer domains");
  cmd->add_option("--int-max", c.int_max, "Upper bound of integer domains");
  cmd->add_option("--budget-nodes", c.budget_nodes, "Search node limit per solver call")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget-ms", c.budget_ms, "Time limit per solver call in milliseconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Seed for randomized test data (solving is deterministic)");
}

csx::SolveOptions options(const Common& c) {
  if (c.int_min > c.int_max)
    throw CLI::ValidationError("--int-min", "must not exceed --int-max");
  csx::SolveOptions o;
  try {
    o.box.set_default(c.int_min, c.int_max);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("--int-min/--int-max", e.what());
  }
  o.budget.max_nodes = c.budget_nodes;
  o.budget.max_time = std::chrono::milliseconds(c.budget_ms);
  return o;
}

csx::ConfigFormat config_format(const std::string& f) {
  if (f == "tree")
    return csx::ConfigFormat::Tree;
  if (f == "json")
    return csx::ConfigFormat::Json;
  return csx::ConfigFormat::Flat;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"CSX toolchain: check, test, solve and export finisher specifications"};
  app.require_subcommand(1);

  Common common;
  if (const char* env = std::getenv("CSX_BUDGET_MS")) {
    try {
      common.budget_ms = std::stoll(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring malformed CSX_BUDGET_MS\n";
    }
  }

  std::vector<std::string> files;
  std::string format = "flat";
  std::string out_path;

  auto* check = app.add_subcommand("check", "Analyze a workspace and check inhabitance");
  auto* test = app.add_subcommand("test", "Run scenarios");
  auto* solve = app.add_subcommand("solve", "Find a configuration for a job");
  auto* inhabit = app.add_subcommand("inhabit", "Check inhabitance of one definition");
  auto* exp = app.add_subcommand("export", "Write the flat constraint model of a device");
  auto* bench = app.add_subcommand("bench", "Time translation and solving of scenarios");
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");

  for (auto* cmd : {check, test, solve, inhabit, exp, bench})
    cmd->add_option("files", files, "Spec files or directories")->required();
  for (auto* cmd : {check, test, solve, inhabit, exp, bench, serve})
    add_common(cmd, common);
  for (auto* cmd : {check, test, solve, exp, bench})
    cmd->add_option("--out", out_path, "Write output to a file");

  csx::cli::TestArgs test_args;
  test->add_option("--scenario", test_args.scenarios, "Scenario to run (repeatable)");
  test->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));

  csx::cli::SolveArgs solve_args;
  std::optional<std::string> objective;
  solve->add_option("--device", solve_args.device, "Device to configure")->required();
  solve->add_option("--set", solve_args.set, "Fix a leaf: path=value (repeatable)");
  solve->add_option("--where", solve_args.constraints, "Extra constraint expression (repeatable)");
  solve->add_option("--objective", objective, "minimize:<expr> or maximize:<expr>");
  solve->add_option("--format", format, "Configuration format")
      ->check(CLI::IsMember({"flat", "tree", "json"}));

  std::string inhabit_name;
  inhabit->add_option("--name", inhabit_name, "Type, action or device")->required();

  std::string export_device;
  std::string dialect = "interchange";
  exp->add_option("--device", export_device, "Device to export")->required();
  exp->add_option("--dialect", dialect, "Output dialect")
      ->check(CLI::IsMember({"interchange", "debug"}));

  csx::cli::BenchArgs bench_args;
  bench->add_option("--scenario", bench_args.scenarios, "Scenario to time (repeatable)");
  bench->add_option("--iterations", bench_args.iterations, "Iterations per scenario")
      ->check(CLI::PositiveNumber);
  bench->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));

  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "Port to listen on");
  serve->add_option("--host", host, "Address to bind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : csx::cli::kUsage;
  }

  csx::SolveOptions opts;
  try {
    opts = options(common);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return csx::cli::kUsage;
  }

  std::ofstream file_out;
  if (!out_path.empty()) {
    file_out.open(out_path, std::ios::binary);
    if (!file_out) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return csx::cli::kUsage;
    }
  }
  csx::cli::Io io{out_path.empty() ? std::cout : file_out, std::cerr};
  csx::Cache cache;

  if (*check)
    return csx::cli::cmd_check(files, cache, opts, io);
  if (*test) {
    test_args.json = format == "json";
    return csx::cli::cmd_test(files, test_args, cache, opts, io);
  }
  if (*solve) {
    solve_args.objective = objective;
    solve_args.format = config_format(format);
    return csx::cli::cmd_solve(files, solve_args, opts, io);
  }
  if (*inhabit)
    return csx::cli::cmd_inhabit(files, inhabit_name, opts, io);
  if (*exp)
    return csx::cli::cmd_export(files, export_device,
                                dialect == "debug" ? csx::Dialect::Debug : csx::Dialect::Interchange,
                                io);
  if (*bench) {
    bench_args.json = format == "json";
    return csx::cli::cmd_bench(files, bench_args, opts, io);
  }
  if (*serve) {
    csx::service::Service service(opts);
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!csx::service::serve(service, host, port)) {
      std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
      return csx::cli::kUsage;
    }
  }
  return 0;
}
