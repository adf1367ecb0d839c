#include "csx/explore.hpp"

#include <algorithm>
#include <tuple>

namespace csx {

bool WorkspaceReport::has_errors() const { return csx::has_errors(diagnostics); }

namespace {

struct DefRef {
  DefKind kind;
  std::string name;
  Span span;
};

bool before(const Span& a, const Span& b) {
  return std::tie(a.file, a.begin) < std::tie(b.file, b.begin);
}

void sort_diagnostics(std::vector<Diagnostic>& diags) {
  std::stable_sort(diags.begin(), diags.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return before(a.span, b.span); });
}

std::string witness_text(const ExpectationResult& e) {
  std::string out;
  for (const auto& [path, value] : e.witness) {
    if (!out.empty())
      out += ", ";
    out += path + " = " + value;
  }
  return out;
}

} // namespace

void scenario_diagnostics(const ScenarioReport& r, const ScenarioDef& s,
                          std::vector<Diagnostic>& diags) {
  const Span name_span = s.name.span;
  const std::string who = "scenario '" + r.name + "'";
  switch (r.outcome.kind) {
  case OutcomeKind::EmptySpace:
    diags.push_back({Severity::Error, who + ": the configuration space is empty", name_span});
    return;
  case OutcomeKind::Exhausted:
    diags.push_back({Severity::Warning, who + ": search budget exhausted before a configuration was found",
                     name_span});
    return;
  case OutcomeKind::Found: break;
  }
  for (const auto& e : r.expectations) {
    if (e.verdict == Verdict::Fail) {
      std::string msg = "expectation failed: " + e.text;
      if (!e.witness.empty())
        msg += " (witness: " + witness_text(e) + ")";
      diags.push_back({Severity::Error, msg, e.span});
    } else if (e.verdict == Verdict::Error) {
      diags.push_back({Severity::Error, "expectation could not be evaluated: " + e.error, e.span});
    }
    if (e.determinacy == Determinacy::WitnessDependent)
      diags.push_back({Severity::Warning,
                       "expectation '" + e.text +
                           "' holds for this witness only; other configurations disagree",
                       e.span});
  }
}

ScenarioReport run_scenario_cached(const TypedSpec& tspec, const ScenarioDef& s, Cache& cache,
                                   const SolveOptions& opts) {
  const std::string key = scenario_cache_key(tspec.spec(), s, "scenario") + "\n" + options_key(opts);
  ScenarioReport r =
      cache.get_or_compute<ScenarioReport>(key, [&] { return run_scenario(tspec, s, opts); });
  // A cached report may come from an earlier revision of the text;
  // re-anchor it to this one.
  r.span = s.span;
  for (std::size_t i = 0; i < r.expectations.size() && i < s.expectations.size(); ++i)
    r.expectations[i].span = s.expectations[i]->span;
  return r;
}

WorkspaceReport load_workspace(const std::vector<SourceFile>& files) {
  WorkspaceReport report;
  Spec all;
  for (const auto& f : files) {
    const std::uint32_t id = report.sources.add(f.name, f.text);
    ParseResult pr = parse(report.sources.text(id), id);
    if (!pr.ok()) {
      auto diags = to_diagnostics(pr.errors);
      report.diagnostics.insert(report.diagnostics.end(), diags.begin(), diags.end());
      continue;
    }
    append(all, std::move(*pr.spec));
  }

  if (!report.has_errors()) {
    AnalysisResult ar = analyze(desugar(std::move(all)));
    report.diagnostics.insert(report.diagnostics.end(), ar.diagnostics.begin(),
                              ar.diagnostics.end());
    if (ar.ok() && !report.has_errors())
      report.typed = *ar.typed;
  }
  sort_diagnostics(report.diagnostics);
  return report;
}

WorkspaceReport analyze_workspace(const std::vector<SourceFile>& files, Cache& cache,
                                  const SolveOptions& opts, bool run_scenarios) {
  WorkspaceReport report = load_workspace(files);
  if (report.typed) {
    const TypedSpec& typed = *report.typed;
    const Spec& spec = typed.spec();
    const std::string suffix = "\n" + options_key(opts);

    std::vector<DefRef> defs;
    for (const auto& t : spec.types)
      defs.push_back({DefKind::Type, t.name.text, t.name.span});
    for (const auto& a : spec.actions)
      defs.push_back({DefKind::Action, a.name.text, a.name.span});
    for (const auto& d : spec.devices)
      defs.push_back({DefKind::Device, d.name.text, d.name.span});
    std::stable_sort(defs.begin(), defs.end(),
                     [](const DefRef& a, const DefRef& b) { return before(a.span, b.span); });

    for (const auto& d : defs) {
      const std::string key = cache_key(spec, d.kind, d.name, "inhabitance") + suffix;
      InhabitanceResult res = cache.get_or_compute<InhabitanceResult>(
          key, [&] { return check_inhabitance(typed, d.kind, d.name, opts); });
      const std::string who = std::string(to_string(d.kind)) + " '" + d.name + "'";
      if (res.status == Inhabitance::Uninhabited)
        report.diagnostics.push_back({Severity::Error, who + " is not inhabited", d.span});
      else if (res.status == Inhabitance::Unknown)
        report.diagnostics.push_back(
            {Severity::Warning, who + ": inhabitance undecided within the search budget", d.span});
      report.inhabitance.push_back({d.kind, d.name, d.span, std::move(res)});
    }

    if (run_scenarios) {
      std::vector<const ScenarioDef*> scenarios;
      for (const auto& s : spec.scenarios)
        scenarios.push_back(&s);
      std::stable_sort(scenarios.begin(), scenarios.end(),
                       [](const ScenarioDef* a, const ScenarioDef* b) { return before(a->span, b->span); });
      for (const ScenarioDef* s : scenarios) {
        try {
          ScenarioReport r = run_scenario_cached(typed, *s, cache, opts);
          scenario_diagnostics(r, *s, report.diagnostics);
          report.scenarios.push_back(std::move(r));
        } catch (const JobError& e) {
          report.diagnostics.insert(report.diagnostics.end(), e.diagnostics().begin(),
                                    e.diagnostics().end());
        }
      }
    }
  }

  sort_diagnostics(report.diagnostics);
  return report;
}

} // namespace csx
