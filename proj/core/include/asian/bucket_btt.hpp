#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asian/buckets.hpp"
#include "asian/estimate.hpp"
#include "asian/tree_model.hpp"

namespace asian {

/// Node prices of a binomial (sub)tree rooted at price `root_price`:
/// s(t, i) = root_price * u^(2i - t) for t <= depth.
class SubtreePrices {
 public:
  SubtreePrices(double root_price, double u, int depth);

  double operator()(int t, int i) const noexcept {
    return root_price_ * powers_[static_cast<std::size_t>(2 * i - t + depth_)];
  }
  double root_price() const noexcept { return root_price_; }
  int depth() const noexcept { return depth_; }

 private:
  double root_price_;
  int depth_;
  std::vector<double> powers_;
};

struct BucketedTreeResult {
  std::vector<NodeBuckets> leaf_buckets;
  /// Estimate of E((T_n - B)^+) from the leaf overflow buckets.
  double payoff_estimate = 0.0;
};

/// Pushes the buckets of the t + 1 nodes at level t one level down.
std::vector<NodeBuckets> propagate_level(std::span<const NodeBuckets> level, int t,
                                         const SubtreePrices& prices, const LatticeParams& lattice);

/// sum over leaves of overflow.mass * (overflow.value - B).
double overflow_payoff(std::span<const NodeBuckets> leaves);

/// Bucketed Tree Traversal with k core buckets and an overflow bucket per
/// node. Requires s0 < barrier (RootAboveBarrier otherwise). The estimate
/// lies in [E((T_n - B)^+) - nB/k, E((T_n - B)^+)].
BucketedTreeResult btt_traverse(const MarketParams& params, const LatticeParams& lattice, double barrier,
                                std::int64_t k);

/// BTT price with B = (n + 1) X. When s0 >= B every path exercises and the
/// exact price (E(T_n) - B) / (n + 1) is returned with a zero-width interval.
PriceEstimate btt_price(const MarketParams& params, double strike, std::int64_t k);

}  // namespace asian
