#pragma once

#include "csx/explore.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace csx::fixture {

using Rng = std::mt19937_64;

std::string specs_dir();
std::string golden_dir();
std::string read_text(const std::string& path);
std::string spec_path(const std::string& name); // specs/<name>

/// Parse, desugar and analyze; aborts the test run on errors.
TypedSpec typed_from(const std::string& source);

// --- random syntax trees --------------------------------------------------

Expr random_expr(Rng& rng, int depth);
Spec random_spec(Rng& rng);

// --- random constraint models -------------------------------------------

struct ModelShape {
  int max_int_vars = 6;
  int max_bool_vars = 2;
  int max_constraints = 12;
  std::int64_t domain_lo = -3;
  std::int64_t domain_hi = 4; // at most 8 values
  bool objective = false;
};

ConstraintModel random_model(Rng& rng, const ModelShape& shape);

/// Exhaustive oracle with its own expression evaluator. Returns every
/// satisfying assignment in lexicographic order of declaration order
/// (booleans false first, integers ascending).
std::vector<fd::Assignment> brute_force(const ConstraintModel& m, const fd::DomainBox& box);

/// Count of satisfying assignments and the best objective value among
/// them, without materializing the assignments.
struct OracleSummary {
  std::uint64_t count = 0;
  std::optional<std::int64_t> optimum;
};
OracleSummary oracle_summary(const ConstraintModel& m, const fd::DomainBox& box);

/// Objective value of `a` under the oracle's evaluator.
std::int64_t oracle_value(const FlatExpr& e, const fd::Assignment& a);
bool oracle_holds(const FlatExpr& e, const fd::Assignment& a);

} // namespace csx::fixture
