#pragma once

#include "csx/eval.hpp"
#include "csx/syntax.hpp"

#include <any>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace csx {

/// A partial configuration: values an operator fixes before solving, extra
/// constraints and an optional objective, all in the device's scope.
struct Job {
  std::string device;
  std::vector<Binding> fixed;
  std::vector<Expr> constraints;
  std::optional<Objective> objective;
};

struct SolveOptions {
  fd::DomainBox box;
  fd::Budget budget;
  /// After a scenario solve, check whether each expectation's verdict holds
  /// for every admissible configuration or only for the returned witness.
  bool check_determinacy = true;
};

enum class OutcomeKind { Found, EmptySpace, Exhausted };
std::string_view to_string(OutcomeKind k);

struct ExplorationOutcome {
  OutcomeKind kind = OutcomeKind::EmptySpace;
  /// The configuration for Found; the best incumbent (if any) for Exhausted.
  std::optional<ModelValue> configuration;
  std::optional<fd::Assignment> assignment;
  std::optional<std::int64_t> objective;
  fd::Stats stats;
};

/// Job paths that do not resolve, or job expressions that fail analysis.
class JobError : public std::runtime_error {
public:
  explicit JobError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
  std::vector<Diagnostic> diags_;
};

/// The device model with the job's bindings, constraints and objective.
/// Throws JobError.
struct JobModel {
  TypedSpec typed; // extends the input with the job's expressions
  ConstraintModel model;
  fd::DomainBox box;
};
JobModel lower_job(const TypedSpec& tspec, const Job& job, const fd::DomainBox& box);

/// Solves a job and lifts the solution back to a configuration.
ExplorationOutcome find_configuration(const TypedSpec& tspec, const Job& job,
                                      const SolveOptions& opts);

enum class Verdict { Pass, Fail, Error, NotEvaluated };
std::string_view to_string(Verdict v);

enum class Determinacy { Determined, WitnessDependent, Unknown };
std::string_view to_string(Determinacy d);

struct ExpectationResult {
  Expr expr;
  std::string text;
  Span span;
  Verdict verdict = Verdict::NotEvaluated;
  std::optional<Value> value;
  /// Leaves the expectation reads and their values in the witness.
  std::vector<std::pair<std::string, std::string>> witness;
  /// Reads at least one leaf the job does not fix, so the verdict may
  /// depend on which configuration the solver returned.
  bool references_unfixed = false;
  Determinacy determinacy = Determinacy::Unknown;
  std::string error;
};

struct ScenarioReport {
  std::string name;
  std::string device;
  Span span;
  ExplorationOutcome outcome;
  std::vector<ExpectationResult> expectations;

  bool passed() const;
};

ScenarioReport run_scenario(const TypedSpec& tspec, const ScenarioDef& s, const SolveOptions& opts);

enum class Inhabitance { Inhabited, Uninhabited, Unknown };
std::string_view to_string(Inhabitance i);

enum class DefKind { Type, Action, Device };
std::string_view to_string(DefKind k);

struct InhabitanceResult {
  Inhabitance status = Inhabitance::Unknown;
  std::optional<fd::Assignment> witness;
};

InhabitanceResult check_inhabitance(const TypedSpec& tspec, DefKind kind, std::string_view name,
                                    const SolveOptions& opts);

/// Get-or-compute store keyed by canonical definition text. Concurrent
/// requests for one key compute it once; the others wait for the result.
class Cache {
public:
  template <class T>
  T get_or_compute(const std::string& key, const std::function<T()>& compute) {
    return std::any_cast<T>(lookup(key, [&]() -> std::any { return compute(); }));
  }

  std::size_t size() const;
  std::uint64_t hits() const;
  std::uint64_t misses() const;
  void clear();

private:
  std::any lookup(const std::string& key, const std::function<std::any()>& compute);

  mutable std::mutex mu_;
  std::map<std::string, std::shared_future<std::any>> entries_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

/// Canonical text of a definition and everything it depends on, plus a
/// query tag. Equal ASTs (modulo spans and unrelated definitions) give
/// equal keys.
std::string cache_key(const Spec& spec, DefKind kind, std::string_view name, std::string_view query);
std::string scenario_cache_key(const Spec& spec, const ScenarioDef& s, std::string_view query);
std::string options_key(const SolveOptions& opts);

struct SourceFile {
  std::string name;
  std::string text;
};

struct InhabitanceReport {
  DefKind kind;
  std::string name;
  Span span;
  InhabitanceResult result;
};

struct WorkspaceReport {
  SourceSet sources;
  std::vector<Diagnostic> diagnostics;
  std::optional<TypedSpec> typed;
  std::vector<InhabitanceReport> inhabitance;
  std::vector<ScenarioReport> scenarios;

  bool has_errors() const;
};

/// Parse, desugar and analyze only.
WorkspaceReport load_workspace(const std::vector<SourceFile>& files);

/// load_workspace, then check inhabitance of every definition and run every
/// scenario, reusing cached results for unchanged definitions.
WorkspaceReport analyze_workspace(const std::vector<SourceFile>& files, Cache& cache,
                                  const SolveOptions& opts, bool run_scenarios = true);

/// run_scenario through the cache. Spans in the result refer to `s`.
ScenarioReport run_scenario_cached(const TypedSpec& tspec, const ScenarioDef& s, Cache& cache,
                                   const SolveOptions& opts);

/// Appends diagnostics for a failed scenario or expectation.
void scenario_diagnostics(const ScenarioReport& r, const ScenarioDef& s,
                          std::vector<Diagnostic>& out);

/// Configuration rendering.
enum class ConfigFormat { Flat, Tree, Json };
std::string format_configuration(const ModelValue& config, ConfigFormat format);

/// Parses `path=value` (value: integer, true or false).
std::optional<Binding> parse_binding(std::string_view text);

/// Leaves of a device with their current values, if any.
std::vector<std::pair<Leaf, std::optional<Value>>> leaf_values(const TypedSpec& tspec,
                                                               const DeviceDef& device,
                                                               const ModelValue* config);

} // namespace csx
