#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asian/buckets.hpp"
#include "asian/convolution.hpp"
#include "asian/estimate.hpp"
#include "asian/schedule.hpp"
#include "asian/tree_model.hpp"

namespace asian {

enum class MergeKernel {
  /// Core x core pairs via one polynomial product per leaf.
  Convolution,
  /// The literal double loop over bucket pairs.
  Direct,
};

struct RecBttOptions {
  std::int64_t k0 = 16;
  int R = 3;
  BaseSolver base_solver = BaseSolver::Exact;
  /// Recursion stops at the first level whose depth is at most this.
  int base_case_depth = 1;
  MergeKernel kernel = MergeKernel::Convolution;
  ConvolutionOptions convolution;
  /// Seed and per-subproblem sample count for the StrongMC base solver.
  std::uint64_t seed = 0;
  std::uint64_t base_mc_samples = 4096;
  /// Re-runs every 16th merge with the direct kernel and throws
  /// InvariantViolation on disagreement.
  bool verify_merges = false;
  /// Checks mass conservation after every merged level.
  bool check_mass = true;
};

/// n_i = round((n0/sigma^2)^(1/2 - i/R)) and
/// k_i = ceil(4^i k0 (n0/sigma^2)^(i/R)) rounded up to a multiple of k_{i-1}.
/// Stops at the first n_i <= base_case_depth, or before any n_i that fails
/// to decrease. Throws InvalidR for R <= 2.
RecursionSchedule build_schedule(int n0, std::int64_t k0, double sigma, int R, int base_case_depth = 1);

/// Folds the leaf buckets of a zero-rooted subtree (v1) onto the prefix
/// buckets of its root (v0), accumulating into the matching node v2.
/// Throws BucketShapeMismatch unless all three share k and B.
void merge(const NodeBuckets& parent, const NodeBuckets& leaf, NodeBuckets& into,
           MergeKernel kernel = MergeKernel::Convolution, const ConvolutionOptions& options = {});

/// Leaf buckets of a same-level subtree whose prices are alpha times the
/// source subtree's. Requires 1 <= alpha <= 2 (AlphaOutOfRange otherwise).
NodeBuckets estimate_node(const NodeBuckets& source, double alpha);
std::vector<NodeBuckets> estimate_leaves(std::span<const NodeBuckets> source, double alpha);

/// Largest d with u^(2d) <= 2: how many nodes to the right one solved
/// subtree can be reused by estimation.
int estimate_spacing(double u);

/// Underestimation bound on running totals tracked through the recursion
/// exactly as the pricer executes it (blocks, leftover levels, regrouping,
/// estimation, merges). For a degenerate schedule this is n B / k0.
double tracked_error_bound(const RecursionSchedule& schedule, double barrier, double u,
                           BaseSolver base = BaseSolver::Exact);

/// The closed recurrence E_i = 5 B n_i / (k_i n_{i+1}) + 2 (n_i / n_{i+1}) E_{i+1}
/// with E_K = B / k_K at the last level.
double recurrence_error_bound(const RecursionSchedule& schedule, double barrier);

struct RecBttResult {
  std::vector<NodeBuckets> leaf_buckets;
  double payoff_estimate = 0.0;
  RecBttDiagnostics diagnostics;
};

/// Recursive bucketed traversal against `barrier`; leaves carry k0 buckets.
/// Requires s0 < barrier (RootAboveBarrier otherwise).
RecBttResult rec_btt_traverse(const MarketParams& params, double barrier, const RecBttOptions& options);

/// Price with B = (n + 1) X. Interval lower slack is error_bound / (n + 1).
PriceEstimate rec_btt_price(const MarketParams& params, double strike, const RecBttOptions& options);

}  // namespace asian
