#include "csx/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace csx::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_diagnostics(const WorkspaceReport& r, std::ostream& os) {
  for (const auto& d : r.diagnostics)
    os << r.sources.render(d) << '\n';
}

/// Loads and analyzes; prints diagnostics and returns an exit code when the
/// workspace cannot be used.
std::optional<int> load(const std::vector<std::string>& paths, WorkspaceReport& report, Io io) {
  std::vector<SourceFile> files;
  try {
    files = read_sources(paths);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kUsage;
  }
  report = load_workspace(files);
  if (!report.typed) {
    print_diagnostics(report, io.err);
    return kFindings;
  }
  return std::nullopt;
}

std::string witness_list(const ExpectationResult& e) {
  std::string out;
  for (const auto& [path, value] : e.witness) {
    if (!out.empty())
      out += ", ";
    out += path + " = " + value;
  }
  return out;
}

json scenario_json(const ScenarioReport& r) {
  json j;
  j["name"] = r.name;
  j["device"] = r.device;
  j["passed"] = r.passed();
  j["outcome"] = std::string(to_string(r.outcome.kind));
  if (r.outcome.objective)
    j["objective"] = *r.outcome.objective;
  j["nodes"] = r.outcome.stats.nodes;
  json exps = json::array();
  for (const auto& e : r.expectations) {
    json je;
    je["expect"] = e.text;
    je["verdict"] = std::string(to_string(e.verdict));
    je["determinacy"] = std::string(to_string(e.determinacy));
    je["references_unfixed"] = e.references_unfixed;
    json w = json::object();
    for (const auto& [path, value] : e.witness)
      w[path] = value;
    je["witness"] = w;
    if (!e.error.empty())
      je["error"] = e.error;
    exps.push_back(je);
  }
  j["expectations"] = exps;
  return j;
}

std::optional<Objective> parse_objective(const std::string& text, std::string& error) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    error = "objective must be 'minimize:<expr>' or 'maximize:<expr>'";
    return std::nullopt;
  }
  const std::string sense = text.substr(0, colon);
  Sense s;
  if (sense == "minimize")
    s = Sense::Minimize;
  else if (sense == "maximize")
    s = Sense::Maximize;
  else {
    error = "unknown objective sense '" + sense + "'";
    return std::nullopt;
  }
  ExprParseResult pr = parse_expr(text.substr(colon + 1));
  if (!pr.expr) {
    error = "objective: " + (pr.errors.empty() ? std::string("parse error") : pr.errors[0].message);
    return std::nullopt;
  }
  return Objective{s, *pr.expr};
}

std::int64_t ns_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
      .count();
}

} // namespace

std::vector<SourceFile> read_sources(const std::vector<std::string>& paths) {
  std::vector<SourceFile> files;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".csx")
          found.push_back(entry.path());
      std::sort(found.begin(), found.end());
      for (const auto& f : found)
        files.push_back({f.string(), read_file(f)});
    } else {
      files.push_back({p, read_file(p)});
    }
  }
  return files;
}

int cmd_check(const std::vector<std::string>& paths, Cache& cache, const SolveOptions& opts,
              Io io) {
  std::vector<SourceFile> files;
  try {
    files = read_sources(paths);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kUsage;
  }
  WorkspaceReport report = analyze_workspace(files, cache, opts, false);
  print_diagnostics(report, io.err);
  for (const auto& f : files)
    if (!parse(f.text).ok())
      return kUsage;
  for (const auto& i : report.inhabitance)
    io.out << to_string(i.result.status) << ' ' << to_string(i.kind) << ' ' << i.name << '\n';
  return report.has_errors() ? kFindings : kOk;
}

int cmd_test(const std::vector<std::string>& paths, const TestArgs& args, Cache& cache,
             const SolveOptions& opts, Io io) {
  WorkspaceReport report;
  if (auto code = load(paths, report, io))
    return *code;
  const TypedSpec& typed = *report.typed;

  std::vector<const ScenarioDef*> selected;
  for (const auto& name : args.scenarios) {
    const ScenarioDef* s = typed.spec().find_scenario(name);
    if (!s) {
      io.err << "error: unknown scenario '" << name << "'\n";
      return kUsage;
    }
    selected.push_back(s);
  }
  if (args.scenarios.empty())
    for (const auto& s : typed.spec().scenarios)
      selected.push_back(&s);

  bool ok = true;
  json all = json::array();
  for (const ScenarioDef* s : selected) {
    ScenarioReport r;
    try {
      r = run_scenario_cached(typed, *s, cache, opts);
    } catch (const JobError& e) {
      for (const auto& d : e.diagnostics())
        io.err << report.sources.render(d) << '\n';
      ok = false;
      continue;
    }
    ok = ok && r.passed();
    if (args.json) {
      all.push_back(scenario_json(r));
      continue;
    }
    io.out << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << to_string(r.outcome.kind);
    if (r.outcome.objective)
      io.out << ", objective = " << *r.outcome.objective;
    io.out << ")\n";
    for (const auto& e : r.expectations) {
      io.out << "  " << to_string(e.verdict) << "  [" << e.text << "]";
      if (!e.witness.empty())
        io.out << "  {" << witness_list(e) << "}";
      if (e.determinacy == Determinacy::WitnessDependent)
        io.out << "  (witness-dependent)";
      if (!e.error.empty())
        io.out << "  " << e.error;
      io.out << '\n';
    }
  }
  if (args.json)
    io.out << all.dump(2) << '\n';
  return ok ? kOk : kFindings;
}

int cmd_solve(const std::vector<std::string>& paths, const SolveArgs& args,
              const SolveOptions& opts, Io io) {
  WorkspaceReport report;
  if (auto code = load(paths, report, io))
    return *code;
  const TypedSpec& typed = *report.typed;
  if (!typed.spec().find_device(args.device)) {
    io.err << "error: unknown device '" << args.device << "'\n";
    return kUsage;
  }

  Job job;
  job.device = args.device;
  for (const auto& text : args.set) {
    auto b = parse_binding(text);
    if (!b) {
      io.err << "error: malformed binding '" << text << "', expected path=value\n";
      return kUsage;
    }
    job.fixed.push_back(std::move(*b));
  }
  for (const auto& text : args.constraints) {
    ExprParseResult pr = parse_expr(text);
    if (!pr.expr) {
      io.err << "error: malformed constraint '" << text << "'\n";
      return kUsage;
    }
    job.constraints.push_back(*pr.expr);
  }
  if (args.objective) {
    std::string error;
    job.objective = parse_objective(*args.objective, error);
    if (!job.objective) {
      io.err << "error: " << error << '\n';
      return kUsage;
    }
  }

  ExplorationOutcome out;
  try {
    out = find_configuration(typed, job, opts);
  } catch (const JobError& e) {
    for (const auto& d : e.diagnostics())
      io.err << "error: " << d.message << '\n';
    return kUsage;
  }
  switch (out.kind) {
  case OutcomeKind::EmptySpace:
    io.err << "empty configuration space\n";
    return kEmpty;
  case OutcomeKind::Exhausted:
    io.err << "search budget exhausted after " << out.stats.nodes << " nodes\n";
    return kExhausted;
  case OutcomeKind::Found: break;
  }
  if (args.format == ConfigFormat::Json) {
    json j;
    j["status"] = "found";
    j["configuration"] = json::parse(format_configuration(*out.configuration, ConfigFormat::Json));
    if (out.objective)
      j["objective"] = *out.objective;
    io.out << j.dump(2) << '\n';
    return kOk;
  }
  io.out << format_configuration(*out.configuration, args.format);
  if (out.objective)
    io.out << "objective = " << *out.objective << '\n';
  return kOk;
}

int cmd_inhabit(const std::vector<std::string>& paths, const std::string& name,
                const SolveOptions& opts, Io io) {
  WorkspaceReport report;
  if (auto code = load(paths, report, io))
    return *code;
  const Spec& spec = report.typed->spec();
  DefKind kind;
  if (spec.find_type(name))
    kind = DefKind::Type;
  else if (spec.find_action(name))
    kind = DefKind::Action;
  else if (spec.find_device(name))
    kind = DefKind::Device;
  else {
    io.err << "error: no type, action or device named '" << name << "'\n";
    return kUsage;
  }
  InhabitanceResult r = check_inhabitance(*report.typed, kind, name, opts);
  io.out << to_string(kind) << ' ' << name << ": " << to_string(r.status) << '\n';
  if (r.witness)
    for (const auto& [var, value] : r.witness->entries())
      io.out << "  " << var << " = " << fd::to_string(value) << '\n';
  switch (r.status) {
  case Inhabitance::Inhabited: return kOk;
  case Inhabitance::Uninhabited: return kFindings;
  case Inhabitance::Unknown: return kExhausted;
  }
  return kFindings;
}

int cmd_export(const std::vector<std::string>& paths, const std::string& device, Dialect dialect,
               Io io) {
  WorkspaceReport report;
  if (auto code = load(paths, report, io))
    return *code;
  if (!report.typed->spec().find_device(device)) {
    io.err << "error: unknown device '" << device << "'\n";
    return kUsage;
  }
  ConstraintModel m = lower_device(*report.typed, device);
  io.out << render_model(m, dialect);
  io.err << device << ": " << m.vars.size() << " variables, " << m.constraints.size()
         << " constraints\n";
  return kOk;
}

std::vector<BenchSample> bench(const std::vector<SourceFile>& files,
                               const std::vector<std::string>& scenarios, int iterations,
                               const SolveOptions& opts) {
  std::vector<std::string> names = scenarios;
  if (names.empty()) {
    WorkspaceReport report = load_workspace(files);
    if (!report.typed)
      throw std::runtime_error("workspace has errors");
    for (const auto& s : report.typed->spec().scenarios)
      names.push_back(s.name.text);
  }
  std::vector<BenchSample> samples;
  for (int it = 0; it < iterations; ++it) {
    for (const auto& name : names) {
      BenchSample s;
      s.scenario = name;
      s.iteration = it + 1;

      auto t0 = std::chrono::steady_clock::now();
      WorkspaceReport report = load_workspace(files);
      if (!report.typed)
        throw std::runtime_error("workspace has errors");
      const TypedSpec& typed = *report.typed;
      const ScenarioDef* sd = typed.spec().find_scenario(name);
      if (!sd)
        throw std::invalid_argument("unknown scenario '" + name + "'");
      JobModel jm = lower_job(typed, Job{sd->device.text, sd->bindings, sd->constraints, sd->objective},
                              opts.box);
      s.translate_ns = ns_since(t0);
      s.vars = jm.model.vars.size();
      s.constraints = jm.model.constraints.size();

      t0 = std::chrono::steady_clock::now();
      fd::SolveResult r = fd::solve(jm.model, jm.box, opts.budget);
      s.solve_ns = ns_since(t0);

      if (r.assignment && (r.status == fd::Status::Sat || r.status == fd::Status::Opt)) {
        ModelValue config = lift(jm.typed, sd->device.text, *r.assignment);
        s.passed = std::all_of(sd->expectations.begin(), sd->expectations.end(), [&](const Expr& e) {
          try {
            return eval_in_device(jm.typed, config, e).as_bool();
          } catch (const std::exception&) {
            return false;
          }
        });
      }
      samples.push_back(s);
    }
  }
  return samples;
}

int cmd_bench(const std::vector<std::string>& paths, const BenchArgs& args,
              const SolveOptions& opts, Io io) {
  std::vector<SourceFile> files;
  WorkspaceReport report;
  try {
    files = read_sources(paths);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kUsage;
  }
  report = load_workspace(files);
  if (!report.typed) {
    print_diagnostics(report, io.err);
    return kFindings;
  }
  std::vector<std::string> names = args.scenarios;
  for (const auto& n : names)
    if (!report.typed->spec().find_scenario(n)) {
      io.err << "error: unknown scenario '" << n << "'\n";
      return kUsage;
    }
  if (names.empty())
    for (const auto& s : report.typed->spec().scenarios)
      names.push_back(s.name.text);
  if (args.iterations < 1) {
    io.err << "error: iterations must be positive\n";
    return kUsage;
  }

  std::vector<BenchSample> samples = bench(files, names, args.iterations, opts);
  bool ok = std::all_of(samples.begin(), samples.end(), [](const BenchSample& s) { return s.passed; });

  if (args.json) {
    json out = json::array();
    for (const auto& name : names) {
      json j;
      j["scenario"] = name;
      json t = json::array(), v = json::array();
      for (const auto& s : samples)
        if (s.scenario == name) {
          t.push_back(s.translate_ns);
          v.push_back(s.solve_ns);
          j["variables"] = s.vars;
          j["constraints"] = s.constraints;
        }
      j["translate_ns"] = t;
      j["solve_ns"] = v;
      std::int64_t st = 0, sv = 0;
      for (const auto& x : t)
        st += x.get<std::int64_t>();
      for (const auto& x : v)
        sv += x.get<std::int64_t>();
      j["mean_translate_ns"] = st / static_cast<std::int64_t>(t.size());
      j["mean_solve_ns"] = sv / static_cast<std::int64_t>(v.size());
      out.push_back(j);
    }
    io.out << out.dump(2) << '\n';
    return ok ? kOk : kFindings;
  }

  io.out << "scenario\titeration\ttranslate_ns\tsolve_ns\n";
  for (const auto& s : samples)
    io.out << s.scenario << '\t' << s.iteration << '\t' << s.translate_ns << '\t' << s.solve_ns
           << '\n';
  for (const auto& name : names) {
    std::int64_t st = 0, sv = 0, n = 0;
    std::size_t vars = 0, cons = 0;
    for (const auto& s : samples)
      if (s.scenario == name) {
        st += s.translate_ns;
        sv += s.solve_ns;
        vars = s.vars;
        cons = s.constraints;
        ++n;
      }
    io.out << name << "\tmean\t" << st / n << '\t' << sv / n << "\t(" << vars << " variables, "
           << cons << " constraints)\n";
  }
  return ok ? kOk : kFindings;
}

} // namespace csx::cli
