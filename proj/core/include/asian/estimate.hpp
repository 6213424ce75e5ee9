#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include "asian/schedule.hpp"

namespace asian {

enum class ErrorKind { AbsoluteBound, StdDevBound, Interval };
enum class Method { StrongMC, BTT, RecBTT, BasketBTT, Exact };
enum class McBranch { DeepInMoney, Sampled };
enum class BaseSolver { BTT, Exact, StrongMC };

std::string_view to_string(ErrorKind kind) noexcept;
std::string_view to_string(Method method) noexcept;
std::string_view to_string(McBranch branch) noexcept;
std::string_view to_string(BaseSolver solver) noexcept;

struct ExactDiagnostics {
  std::uint64_t paths_enumerated = 0;
};

struct McDiagnostics {
  std::uint64_t n_samples = 0;
  std::uint64_t z_count = 0;
  double z_fraction = 0.0;
  McBranch branch = McBranch::Sampled;
  double lambda0 = 0.0;
  int stocks = 1;
  /// Deep branch gave E(T_n) < (n + 1) X and the price was clamped to 0.
  bool clamped_negative = false;
};

struct BttDiagnostics {
  std::int64_t k = 0;
  double barrier = 0.0;
  double payoff_estimate = 0.0;
  /// s0 >= B: every path exercises and the price is exact.
  bool deterministic_exercise = false;
};

struct RecBttDiagnostics {
  RecursionSchedule schedule;
  BaseSolver base_solver = BaseSolver::Exact;
  double barrier = 0.0;
  double payoff_estimate = 0.0;
  /// Bound on the underestimation of E((T_n - B)^+), tracked through the
  /// recursion as executed.
  double error_bound = 0.0;
  /// The closed-form recurrence value for the same schedule.
  double recurrence_bound = 0.0;
  std::uint64_t fresh_solves = 0;
  std::uint64_t estimated_subtrees = 0;
  std::uint64_t merges = 0;
  bool deterministic_exercise = false;
  /// The base solver was sampled, so the bound holds only in probability.
  bool probabilistic_base = false;
};

struct BasketDiagnostics {
  int stocks = 0;
  std::int64_t k = 0;
  double barrier = 0.0;
  double overflow_term = 0.0;
  double core_term = 0.0;
  /// Largest per-stock recursion error bound, in running-total units.
  double per_stock_error_bound = 0.0;
  /// Pr(two or more stocks overflow), from the superbucket masses.
  double multi_overflow_probability = 0.0;
  /// Amount by which the overflow sum double-counts multi-overflow events,
  /// in running-total units (divide by n + 1 for price units).
  double multi_overflow_overcount = 0.0;
  bool deterministic_exercise = false;
};

using Diagnostics =
    std::variant<ExactDiagnostics, McDiagnostics, BttDiagnostics, RecBttDiagnostics, BasketDiagnostics>;

/// A price plus the guarantee that comes with it.
///
/// AbsoluteBound: |price - P| <= error_value with probability `confidence`.
/// StdDevBound:   the estimator's standard deviation is at most error_value.
/// Interval:      P - error_value <= price <= P (bucketing underestimates).
struct PriceEstimate {
  double price = 0.0;
  ErrorKind error_kind = ErrorKind::Interval;
  double error_value = 0.0;
  double confidence = 1.0;
  Method method = Method::Exact;
  Diagnostics diagnostics;
};

}  // namespace asian
