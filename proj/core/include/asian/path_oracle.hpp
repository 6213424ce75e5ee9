#pragma once

#include <cstdint>
#include <span>

#include "asian/estimate.hpp"
#include "asian/tree_model.hpp"

namespace asian {

/// Exhaustive-enumeration result. price = total_payoff / (n + 1).
struct ExactPrice {
  double price = 0.0;
  double total_payoff = 0.0;
  std::uint64_t paths_enumerated = 0;
  /// Sum of path probabilities; 1 up to round-off.
  double measure = 0.0;
};

struct OracleOptions {
  /// Largest number of binary steps enumerated (n, or m * n for baskets).
  int n_max = 24;
  /// Worker threads; 0 picks hardware concurrency. Results do not depend on it.
  unsigned threads = 1;
};

/// E((A_n - X)^+) by walking all 2^n paths in lexicographic step order
/// (downtick before uptick). Throws InstanceTooLarge when n > n_max.
ExactPrice exact_price(const MarketParams& params, double strike, const OracleOptions& options = {});

/// E((T_n - barrier)^+) by the same enumeration.
double exact_total_payoff(const MarketParams& params, double barrier, const OracleOptions& options = {});

/// Basket of independent stocks sharing n: enumerates the product space of
/// all 2^(m n) joint paths, A_n being the average of the summed prices.
ExactPrice exact_basket_price(std::span<const MarketParams> stocks, double strike,
                              const OracleOptions& options = {});

/// Wraps an ExactPrice as a PriceEstimate with a zero-width interval.
PriceEstimate to_estimate(const ExactPrice& exact);

}  // namespace asian
