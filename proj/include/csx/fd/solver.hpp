#pragma once

#include "csx/model.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace csx::fd {

using Scalar = std::variant<std::int64_t, bool>;

std::string to_string(const Scalar& s);

inline constexpr std::int64_t kDefaultMin = -1'000'000;
inline constexpr std::int64_t kDefaultMax = 1'000'000;
/// Largest magnitude accepted for a domain bound.
inline constexpr std::int64_t kMaxBound = 1'000'000'000'000;

struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool operator==(const Interval&) const = default;
};

/// Inclusive bounds per integer variable, optional fixing per boolean.
/// Variables without an entry use the default integer range.
class DomainBox {
public:
  explicit DomainBox(std::int64_t lo = kDefaultMin, std::int64_t hi = kDefaultMax);

  /// Throws std::invalid_argument if a bound exceeds kMaxBound in magnitude.
  void set_default(std::int64_t lo, std::int64_t hi);
  void set(const std::string& var, std::int64_t lo, std::int64_t hi);
  void fix(const std::string& var, bool value);

  Interval int_domain(const std::string& var) const;
  std::optional<bool> bool_fixed(const std::string& var) const;
  Interval default_domain() const { return default_; }

  /// Canonical text of the box, for cache keys.
  std::string key() const;

  bool operator==(const DomainBox&) const = default;

private:
  Interval default_;
  std::map<std::string, Interval> ints_;
  std::map<std::string, bool> bools_;
};

/// Node and wall-clock limits for one solver call.
struct Budget {
  std::uint64_t max_nodes = 10'000'000;
  std::chrono::milliseconds max_time{10'000};
  bool operator==(const Budget&) const = default;
};

/// Total valuation of a model's variables, in declaration order.
class Assignment {
public:
  void set(const std::string& var, Scalar value);
  const Scalar* find(std::string_view var) const;
  std::int64_t int_of(std::string_view var) const;
  bool bool_of(std::string_view var) const;

  const std::vector<std::pair<std::string, Scalar>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool operator==(const Assignment&) const = default;

private:
  std::vector<std::pair<std::string, Scalar>> entries_;
};

enum class Status { Sat, Opt, Unsat, Exhausted };
std::string_view to_string(Status s);

struct Stats {
  std::uint64_t nodes = 0;
  std::uint64_t propagations = 0;
  double wall_ms = 0;
};

struct SolveResult {
  Status status = Status::Unsat;
  /// Witness for Sat and Opt; best incumbent (if any) for Exhausted.
  std::optional<Assignment> assignment;
  std::optional<std::int64_t> objective;
  Stats stats;
};

/// First solution in the deterministic search order: branch on the
/// variable with the smallest domain (earliest declared on ties), booleans
/// false before true, integers lower half before upper half.
/// Throws MalformedModel.
SolveResult check_sat(const ConstraintModel& m, const DomainBox& box, const Budget& budget = {});

/// Global optimum of the model's objective within `box`. Ties resolve to the
/// first optimal assignment in search order. Throws MalformedModel and
/// std::invalid_argument when the model has no objective.
SolveResult optimize(const ConstraintModel& m, const DomainBox& box, const Budget& budget = {});

/// optimize() when the model has an objective, check_sat() otherwise.
SolveResult solve(const ConstraintModel& m, const DomainBox& box, const Budget& budget = {});

/// True iff every constraint holds. Throws MalformedModel for missing or
/// mis-sorted values and std::overflow_error on arithmetic overflow.
bool evaluate(const ConstraintModel& m, const Assignment& a);

/// Value of `e` under `a`; integers are computed with 128-bit checked
/// intermediates and must fit 64 bits.
Scalar eval_flat(const FlatExpr& e, const Assignment& a);

/// Root-node propagation only: per-variable bounds in declaration order
/// (booleans as [0,1]), or nullopt if propagation proves infeasibility.
std::optional<std::vector<Interval>> propagate(const ConstraintModel& m, const DomainBox& box);

/// Every solution in search order, stopping after `limit`. Exhausted when
/// the budget runs out first.
struct Enumeration {
  std::vector<Assignment> solutions;
  bool complete = true;
};
Enumeration all_solutions(const ConstraintModel& m, const DomainBox& box, std::size_t limit,
                          const Budget& budget = {});

/// Number of check_sat / optimize / all_solutions calls made by this
/// process. Used to observe caching.
std::uint64_t solver_calls();

} // namespace csx::fd
