// Runs each primary acceptance criterion and prints one PASS/FAIL line per
// criterion. Exit status is non-zero if any criterion fails.

#include "csx/cli.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace csx;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f ms", ms);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass)
      detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
};

std::vector<SourceFile> files_of(const std::string& name) {
  return {{name, fixture::read_text(fixture::spec_path(name))}};
}

// --- 1 -----------------------------------------------------------------------

Outcome uninhabited_type() {
  Outcome o;
  const auto t0 = Clock::now();
  Cache cache;
  WorkspaceReport r = analyze_workspace({{"t.csx", "type T { i: int [i != i] }"}}, cache, SolveOptions());
  const double ms = ms_since(t0);
  const bool found = r.inhabitance.size() == 1 && r.inhabitance[0].name == "T" &&
                     r.inhabitance[0].result.status == Inhabitance::Uninhabited;
  if (!found)
    o.fail("T not reported uninhabited");
  if (ms >= 100)
    o.fail("took " + fmt_ms(ms));
  if (o.pass)
    o.detail = "T uninhabited in " + fmt_ms(ms);
  return o;
}

// --- 2 -----------------------------------------------------------------------

std::string key_of(const ModelValue& m) { return to_string(Value(m)); }

Outcome coherence() {
  Outcome o;
  const auto t0 = Clock::now();
  TypedSpec t = fixture::typed_from(fixture::read_text(fixture::spec_path("tiny.csx")));
  const DeviceDef& dev = *t.spec().find_device("D");
  const auto leaves = device_leaves(t, dev);
  ConstraintModel m = lower_device(t, "D");
  std::size_t candidates = 0, discrepancies = 0, feasible = 0;
  for (auto [lo, hi] : std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 5}, {-2, 3}, {1, 6}, {-5, 0}, {3, 3}}) {
    fd::DomainBox box(lo, hi);
    auto sols = fd::all_solutions(m, box, 10'000'000);
    if (!sols.complete) {
      o.fail("solver enumeration incomplete");
      continue;
    }
    std::vector<std::string> solver_set;
    for (const auto& a : sols.solutions)
      solver_set.push_back(key_of(lift(t, "D", a)));
    std::sort(solver_set.begin(), solver_set.end());
    feasible += solver_set.size();

    // Every candidate configuration in the box.
    std::vector<std::int64_t> cur(leaves.size(), lo);
    std::vector<std::string> sem_set;
    for (;;) {
      ++candidates;
      fd::Assignment a;
      for (std::size_t i = 0; i < leaves.size(); ++i)
        a.set(m.vars[i].name, cur[i]);
      ModelValue config = lift(t, "D", a);
      if (satisfies(t, "D", config))
        sem_set.push_back(key_of(config));
      std::size_t k = cur.size();
      while (k > 0 && cur[k - 1] == hi)
        cur[--k] = lo;
      if (k == 0)
        break;
      ++cur[k - 1];
    }
    std::sort(sem_set.begin(), sem_set.end());
    std::vector<std::string> diff;
    std::set_symmetric_difference(sem_set.begin(), sem_set.end(), solver_set.begin(), solver_set.end(),
                                  std::back_inserter(diff));
    discrepancies += diff.size();
  }
  const double ms = ms_since(t0);
  if (discrepancies)
    o.fail(std::to_string(discrepancies) + " discrepancies");
  if (ms >= 10'000)
    o.fail("took " + fmt_ms(ms));
  if (o.pass)
    o.detail = std::to_string(candidates) + " candidates, " + std::to_string(feasible) +
               " feasible, 0 discrepancies in " + fmt_ms(ms);
  return o;
}

// --- 3 -----------------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome o;
  const auto t0 = Clock::now();
  fixture::Rng rng(20240601);
  const int n = 500;
  int mismatches = 0, sat = 0;
  for (int i = 0; i < n; ++i) {
    fixture::ModelShape shape; // <= 6 ints, 8 values, <= 12 constraints
    shape.objective = true;
    ConstraintModel m = fixture::random_model(rng, shape);
    fd::DomainBox box(shape.domain_lo, shape.domain_hi);
    const fixture::OracleSummary truth = fixture::oracle_summary(m, box);
    ConstraintModel plain = m;
    plain.objective.reset();
    const fd::SolveResult s = fd::check_sat(plain, box);
    const fd::SolveResult opt = fd::optimize(m, box);
    const bool verdict_ok = (s.status == fd::Status::Sat) == (truth.count > 0) &&
                            s.status != fd::Status::Exhausted;
    const bool optimum_ok = truth.count == 0 ? opt.status == fd::Status::Unsat
                                             : opt.status == fd::Status::Opt && opt.objective == truth.optimum;
    if (!verdict_ok || !optimum_ok)
      ++mismatches;
    sat += truth.count > 0;
  }
  const double ms = ms_since(t0);
  if (mismatches)
    o.fail(std::to_string(mismatches) + " of " + std::to_string(n) + " models disagree");
  if (ms >= 60'000)
    o.fail("took " + fmt_ms(ms));
  if (o.pass)
    o.detail = std::to_string(n) + " models (" + std::to_string(sat) + " satisfiable) agree in " +
               fmt_ms(ms);
  return o;
}

// --- 4 -----------------------------------------------------------------------

struct Reference {
  const char* file;
  const char* device;
  std::size_t vars, constraints; // reference sizes
};

Outcome reconstructed_specs() {
  Outcome o;
  std::ostringstream detail;
  for (const Reference& ref : {Reference{"perfect_binder.csx", "PerfectBinder", 29, 58},
                               Reference{"booklet_maker.csx", "BookletMaker", 32, 56}}) {
    const std::string path = fixture::spec_path(ref.file);
    std::ostringstream out, err;
    Cache cache;
    const int code = cli::cmd_check({path}, cache, SolveOptions(), cli::Io{out, err});
    if (code != cli::kOk)
      o.fail(std::string(ref.file) + ": check exited " + std::to_string(code));

    TypedSpec t = fixture::typed_from(fixture::read_text(path));
    ConstraintModel m = lower_device(t, ref.device);
    auto within = [](std::size_t got, std::size_t want) { return got * 2 >= want && got <= want * 2; };
    if (!within(m.vars.size(), ref.vars) || !within(m.constraints.size(), ref.constraints))
      o.fail(std::string(ref.file) + ": model size " + std::to_string(m.vars.size()) + "/" +
             std::to_string(m.constraints.size()));
    detail << ref.device << " " << m.vars.size() << " vars/" << m.constraints.size() << " constraints";

    if (t.spec().scenarios.size() != 2)
      o.fail(std::string(ref.file) + ": expected two scenarios");
    for (const auto& s : t.spec().scenarios) {
      const auto t0 = Clock::now();
      ScenarioReport r = run_scenario(t, s, SolveOptions());
      const double ms = ms_since(t0);
      if (!r.passed())
        o.fail(s.name.text + " failed");
      if (r.outcome.configuration && !satisfies(t, ref.device, *r.outcome.configuration))
        o.fail(s.name.text + ": configuration rejected by the evaluator");
      if (ms > 5000)
        o.fail(s.name.text + " took " + fmt_ms(ms));
      detail << ", " << s.name.text << " " << static_cast<long>(ms) << " ms";
    }
    detail << "; ";
  }
  if (o.pass) {
    o.detail = detail.str();
    o.detail.resize(o.detail.size() - 2);
  }
  return o;
}

// --- 5 -----------------------------------------------------------------------

Outcome caching() {
  Outcome o;
  std::ostringstream detail;
  for (const char* name : {"tiny.csx", "perfect_binder.csx", "booklet_maker.csx"}) {
    Cache cache;
    std::ostringstream out, err;
    const std::vector<std::string> paths{fixture::spec_path(name)};
    const auto before = fd::solver_calls();
    cli::cmd_check(paths, cache, SolveOptions(), cli::Io{out, err});
    const auto first = fd::solver_calls() - before;
    const auto mid = fd::solver_calls();
    cli::cmd_check(paths, cache, SolveOptions(), cli::Io{out, err});
    const auto second = fd::solver_calls() - mid;
    if (second != 0)
      o.fail(std::string(name) + ": " + std::to_string(second) + " solver calls on second check");
    detail << name << " " << first << " then " << second << " calls; ";
  }
  if (o.pass) {
    o.detail = detail.str();
    o.detail.resize(o.detail.size() - 2);
  }
  return o;
}

// --- 6 -----------------------------------------------------------------------

Outcome round_trip() {
  Outcome o;
  fixture::Rng rng(6);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    Spec s = fixture::random_spec(rng);
    ParseResult r = parse(pretty_print(s));
    if (!r.ok() || *r.spec != s)
      ++bad;
  }
  if (bad)
    o.fail(std::to_string(bad) + " of 1000 generated specs do not round-trip");
  int exports = 0;
  for (auto [file, device] : std::vector<std::pair<const char*, const char*>>{
           {"tiny.csx", "D"}, {"perfect_binder.csx", "PerfectBinder"}, {"booklet_maker.csx", "BookletMaker"}}) {
    std::string first;
    for (int run = 0; run < 3; ++run) {
      std::ostringstream out, err;
      cli::cmd_export({fixture::spec_path(file)}, device, Dialect::Interchange, cli::Io{out, err});
      if (run == 0)
        first = out.str();
      else if (out.str() != first)
        o.fail(std::string("export of ") + device + " differs between runs");
      ++exports;
    }
  }
  if (o.pass)
    o.detail = "1000 specs round-trip, " + std::to_string(exports) + " exports byte-identical";
  return o;
}

// --- 7 -----------------------------------------------------------------------

Outcome bench_methodology() {
  Outcome o;
  std::ostringstream detail;
  for (const char* name : {"perfect_binder.csx", "booklet_maker.csx"}) {
    auto files = files_of(name);
    auto samples = cli::bench(files, {}, 10, SolveOptions());
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> totals;
    std::map<std::string, int> counts;
    for (const auto& s : samples) {
      if (s.translate_ns <= 0 || s.solve_ns <= 0)
        o.fail(s.scenario + ": missing phase timing");
      if (!s.passed)
        o.fail(s.scenario + ": expectations failed");
      totals[s.scenario].first += s.translate_ns;
      totals[s.scenario].second += s.solve_ns;
      ++counts[s.scenario];
    }
    if (counts.size() != 2)
      o.fail(std::string(name) + ": expected two scenarios");
    for (const auto& [scenario, c] : counts) {
      if (c != 10)
        o.fail(scenario + ": " + std::to_string(c) + " iterations");
      detail << scenario << " translate " << totals[scenario].first / c / 1000 << " us, solve "
             << totals[scenario].second / c / 1000 << " us; ";
    }
  }
  if (o.pass) {
    o.detail = detail.str();
    o.detail.resize(o.detail.size() - 2);
  }
  return o;
}

} // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"uninhabited type detected", uninhabited_type},
      {"semantics and solver coherent on tiny device", coherence},
      {"solver agrees with exhaustive oracle", oracle_equivalence},
      {"reconstructed finisher specs", reconstructed_specs},
      {"second check makes no solver calls", caching},
      {"round-trip and deterministic export", round_trip},
      {"bench separates translation and solving", bench_methodology},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
