#include "csx/explore.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace csx {

std::string_view to_string(OutcomeKind k) {
  switch (k) {
  case OutcomeKind::Found: return "found";
  case OutcomeKind::EmptySpace: return "empty";
  case OutcomeKind::Exhausted: return "exhausted";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::Pass: return "pass";
  case Verdict::Fail: return "fail";
  case Verdict::Error: return "error";
  case Verdict::NotEvaluated: return "not evaluated";
  }
  return "?";
}

std::string_view to_string(Determinacy d) {
  switch (d) {
  case Determinacy::Determined: return "determined";
  case Determinacy::WitnessDependent: return "witness-dependent";
  case Determinacy::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(Inhabitance i) {
  switch (i) {
  case Inhabitance::Inhabited: return "inhabited";
  case Inhabitance::Uninhabited: return "uninhabited";
  case Inhabitance::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(DefKind k) {
  switch (k) {
  case DefKind::Type: return "type";
  case DefKind::Action: return "action";
  case DefKind::Device: return "device";
  }
  return "?";
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty())
      out += "; ";
    out += d.message;
  }
  return out;
}

FlatExpr literal(const Literal& lit) {
  if (const auto* b = std::get_if<bool>(&lit))
    return fbool(*b);
  return fint(std::get<std::int64_t>(lit));
}

Diagnostic error_at(Span span, std::string message) {
  return Diagnostic{Severity::Error, std::move(message), span};
}

} // namespace

JobError::JobError(std::vector<Diagnostic> diags)
    : std::runtime_error(join_messages(diags)), diags_(std::move(diags)) {}

JobModel lower_job(const TypedSpec& tspec, const Job& job, const fd::DomainBox& box) {
  std::vector<Expr> exprs = job.constraints;
  if (job.objective)
    exprs.push_back(job.objective->expr);
  AnalysisResult ar = analyze_in_device(tspec, job.device, exprs);
  if (!ar.ok())
    throw JobError(ar.diagnostics);
  const TypedSpec& typed = *ar.typed;

  std::vector<Diagnostic> diags;
  for (const auto& c : job.constraints)
    if (typed.type_of(c).kind != Ty::Kind::Bool)
      diags.push_back(error_at(c->span, "constraint must be of type bool, found " +
                                            typed.type_of(c).str()));
  if (job.objective && typed.type_of(job.objective->expr).kind != Ty::Kind::Int)
    diags.push_back(error_at(job.objective->expr->span, "objective must be of type int, found " +
                                                            typed.type_of(job.objective->expr).str()));

  const DeviceDef& device = typed.device(job.device);
  JobModel jm{typed, lower_device(typed, job.device), box};
  for (const auto& b : job.fixed) {
    LeafResolution res = resolve_leaf(typed, device, b.path);
    if (!res.leaf) {
      diags.push_back(error_at(b.path.span(), "cannot bind '" + b.path.str() + "': " + res.error));
      continue;
    }
    const bool is_bool = std::holds_alternative<bool>(b.value);
    if (is_bool != (res.leaf->sort == Sort::Bool)) {
      diags.push_back(error_at(b.path.span(), "type mismatch: '" + b.path.str() + "' has type " +
                                                  std::string(to_string(res.leaf->sort)) +
                                                  " but is bound to " + to_string(b.value)));
      continue;
    }
    const std::string name = qualified_name(res.leaf->path);
    if (!is_bool) {
      // A fixed value replaces the default domain of its variable.
      const std::int64_t v = std::get<std::int64_t>(b.value);
      if (v > fd::kMaxBound || v < -fd::kMaxBound) {
        diags.push_back(error_at(b.path.span(), "value of '" + b.path.str() + "' is out of range"));
        continue;
      }
      jm.box.set(name, v, v);
    }
    jm.model.constraints.push_back(fbinary(BinaryOp::Eq, fvar(name), literal(b.value)));
  }
  if (!diags.empty())
    throw JobError(diags);
  for (const auto& c : job.constraints)
    jm.model.constraints.push_back(lower_device_expr(typed, c));
  if (job.objective)
    jm.model.objective = FlatObjective{job.objective->sense,
                                       lower_device_expr(typed, job.objective->expr)};
  return jm;
}

namespace {

ExplorationOutcome outcome_of(const JobModel& jm, const std::string& device,
                              const fd::SolveResult& r) {
  ExplorationOutcome out;
  out.stats = r.stats;
  out.objective = r.objective;
  switch (r.status) {
  case fd::Status::Sat:
  case fd::Status::Opt: out.kind = OutcomeKind::Found; break;
  case fd::Status::Unsat: out.kind = OutcomeKind::EmptySpace; break;
  case fd::Status::Exhausted: out.kind = OutcomeKind::Exhausted; break;
  }
  if (r.assignment) {
    out.assignment = r.assignment;
    out.configuration = lift(jm.typed, device, *r.assignment);
    if (out.kind == OutcomeKind::Found && !satisfies(jm.typed, device, *out.configuration))
      throw std::logic_error("solver witness is not a valid configuration");
  }
  return out;
}

} // namespace

ExplorationOutcome find_configuration(const TypedSpec& tspec, const Job& job,
                                      const SolveOptions& opts) {
  JobModel jm = lower_job(tspec, job, opts.box);
  return outcome_of(jm, job.device, fd::solve(jm.model, jm.box, opts.budget));
}

bool ScenarioReport::passed() const {
  if (outcome.kind != OutcomeKind::Found)
    return false;
  return std::all_of(expectations.begin(), expectations.end(),
                     [](const ExpectationResult& e) { return e.verdict == Verdict::Pass; });
}

namespace {

struct TestGroup {
  std::vector<Binding> bindings;
  std::vector<Expr> constraints;
  std::optional<Objective> objective;
  std::vector<Expr> expectations;
};

std::vector<TestGroup> group_tests(const ScenarioDef& s) {
  std::vector<TestGroup> groups;
  if (s.tests.empty()) {
    groups.push_back({s.bindings, s.constraints, s.objective, s.expectations});
    return groups;
  }
  for (const auto& t : s.tests) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const TestGroup& g) {
      return g.bindings == t.bindings && g.constraints == t.constraints &&
             g.objective == t.objective;
    });
    if (it == groups.end())
      groups.push_back({t.bindings, t.constraints, t.objective, {t.expectation}});
    else
      it->expectations.push_back(t.expectation);
  }
  return groups;
}

void evaluate_expectation(const JobModel& jm, const ScenarioDef& s, const TestGroup& g,
                          const ExplorationOutcome& outcome, const SolveOptions& opts,
                          ExpectationResult& r) {
  const std::string& device = s.device.text;
  const TypedSpec& typed = jm.typed;
  FlatExpr flat = lower_device_expr(typed, r.expr);

  std::map<std::string, std::string> dotted;
  for (const auto& leaf : device_leaves(typed, typed.device(device)))
    dotted[qualified_name(leaf.path)] = leaf.dotted();
  std::set<std::string> fixed;
  for (const auto& b : g.bindings) {
    std::vector<std::string> parts;
    for (const auto& p : b.path.parts)
      parts.push_back(p.text);
    fixed.insert(qualified_name(parts));
  }
  for (const auto& var : free_vars(flat)) {
    if (!fixed.count(var))
      r.references_unfixed = true;
    if (const fd::Scalar* v = outcome.assignment->find(var))
      r.witness.emplace_back(dotted.count(var) ? dotted[var] : var, fd::to_string(*v));
  }

  try {
    r.value = eval_in_device(typed, *outcome.configuration, r.expr);
    r.verdict = r.value->as_bool() ? Verdict::Pass : Verdict::Fail;
  } catch (const std::exception& ex) {
    r.verdict = Verdict::Error;
    r.error = ex.what();
    return;
  }

  if (!opts.check_determinacy || !r.references_unfixed) {
    r.determinacy = r.references_unfixed ? Determinacy::Unknown : Determinacy::Determined;
    return;
  }
  // Is there another admissible (optimal, when optimizing) configuration on
  // which the expectation evaluates the other way?
  ConstraintModel other = jm.model;
  if (other.objective && outcome.objective) {
    other.constraints.push_back(
        fbinary(BinaryOp::Eq, other.objective->expr, fint(*outcome.objective)));
  }
  other.objective.reset();
  other.constraints.push_back(r.verdict == Verdict::Pass ? funary(UnaryOp::Not, flat) : flat);
  fd::SolveResult alt = fd::check_sat(other, jm.box, opts.budget);
  switch (alt.status) {
  case fd::Status::Sat: r.determinacy = Determinacy::WitnessDependent; break;
  case fd::Status::Unsat: r.determinacy = Determinacy::Determined; break;
  default: r.determinacy = Determinacy::Unknown; break;
  }
}

} // namespace

ScenarioReport run_scenario(const TypedSpec& tspec, const ScenarioDef& s, const SolveOptions& opts) {
  ScenarioReport report;
  report.name = s.name.text;
  report.device = s.device.text;
  report.span = s.span;

  bool first = true;
  for (const auto& g : group_tests(s)) {
    Job job{s.device.text, g.bindings, g.constraints, g.objective};
    JobModel jm = lower_job(tspec, job, opts.box);
    ExplorationOutcome outcome =
        outcome_of(jm, s.device.text, fd::solve(jm.model, jm.box, opts.budget));
    for (const auto& e : g.expectations) {
      ExpectationResult r;
      r.expr = e;
      r.text = pretty_print(e);
      r.span = e->span;
      if (outcome.kind == OutcomeKind::Found)
        evaluate_expectation(jm, s, g, outcome, opts, r);
      report.expectations.push_back(std::move(r));
    }
    if (first) {
      report.outcome = std::move(outcome);
      first = false;
    } else if (outcome.kind != OutcomeKind::Found) {
      report.outcome = std::move(outcome);
    }
  }
  return report;
}

InhabitanceResult check_inhabitance(const TypedSpec& tspec, DefKind kind, std::string_view name,
                                    const SolveOptions& opts) {
  ConstraintModel m;
  switch (kind) {
  case DefKind::Type: m = lower_type_inhabitance(tspec, name); break;
  case DefKind::Action: m = lower_action_inhabitance(tspec, name); break;
  case DefKind::Device: m = lower_device(tspec, name); break;
  }
  fd::SolveResult r = fd::check_sat(m, opts.box, opts.budget);
  InhabitanceResult out;
  switch (r.status) {
  case fd::Status::Sat:
  case fd::Status::Opt:
    out.status = Inhabitance::Inhabited;
    out.witness = r.assignment;
    break;
  case fd::Status::Unsat: out.status = Inhabitance::Uninhabited; break;
  case fd::Status::Exhausted: out.status = Inhabitance::Unknown; break;
  }
  return out;
}

} // namespace csx
