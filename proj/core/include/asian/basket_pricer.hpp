#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asian/buckets.hpp"
#include "asian/estimate.hpp"
#include "asian/rec_btt.hpp"
#include "asian/tree_model.hpp"

namespace asian {

/// Per-stock aggregate of the leaf buckets over all leaves of one tree.
struct SuperbucketArray {
  std::int64_t k = 0;
  double barrier = 0.0;
  /// core_masses[j] is the total leaf mass in core bucket j, represented by jB/k.
  std::vector<double> core_masses;
  double overflow_mass = 0.0;
  /// Mass-weighted average of the leaf overflow values.
  double overflow_value = 0.0;

  double core_value(std::int64_t j) const noexcept {
    return static_cast<double>(j) * barrier / static_cast<double>(k);
  }
};

/// Throws BucketShapeMismatch unless every leaf has k buckets against B.
SuperbucketArray superbuckets(std::span<const NodeBuckets> leaves, std::int64_t k, double barrier);

struct BasketSpec {
  std::vector<MarketParams> stocks;
  double strike = 0.0;
  /// Leaf bucket count k = k0 and recursion controls for each stock's tree.
  RecBttOptions options;
  /// Worker threads for the per-stock traversals (0 = hardware concurrency).
  unsigned threads = 1;
};

/// BasketBTT. Each stock is traversed by the recursive bucketed traversal
/// against the shared barrier B = (n + 1) X. The overflow sum counts each
/// overflowing stock against the other stocks' unconditional expectations,
/// so events where two or more stocks overflow are counted once per
/// overflowing stock; the overcount is reported in the diagnostics.
///
/// When some s0_i >= B (or B = 0) every path exercises and the exact price
/// (sum_i E(T_n^i) - B) / (n + 1) is returned.
PriceEstimate basket_price(const BasketSpec& spec);

}  // namespace asian
