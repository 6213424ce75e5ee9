#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "asian/estimate.hpp"
#include "asian/tree_model.hpp"

namespace asian {

/// Relative price-error parameter epsilon and failure probability delta,
/// both in (0, 1).
struct AccuracySpec {
  double epsilon = 0.05;
  double delta = 0.05;
};

/// Multipliers on the two sample-count terms. The Chernoff term is
/// ln(2/delta) / (2 eps^2); the variance term is the Chebyshev requirement
/// eps^-2 e^(4 s l0) (1 + 2 s eps) / (l0 - 2 s) with s = sigma_max sqrt(m).
struct SampleConstants {
  double chernoff = 1.0;
  double variance = 1.0;
};

struct McOptions {
  SampleConstants constants;
  /// Worker threads; 0 = hardware concurrency. Results do not depend on it.
  unsigned threads = 1;
  /// Guard against runaway sample counts.
  std::uint64_t max_samples = std::uint64_t{1} << 36;
};

/// sqrt(2 ln(2/eps)), the deviation at which the Azuma tail equals eps.
double lambda0(double epsilon);

/// Sample count for an m-stock basket whose largest volatility is
/// sigma_max (m = 1 for a single stock). Throws VarianceBoundVacuous when
/// lambda0 <= 2 sigma_max sqrt(m).
std::uint64_t required_samples(const AccuracySpec& spec, double sigma_max, int m,
                               const SampleConstants& constants = {});

/// One Bernoulli(p) draw from the top 53 bits of the generator.
inline bool draw_uptick(std::mt19937_64& rng, double p) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

/// Independent steps, +1 with probability p.
Path sample_path(std::mt19937_64& rng, const LatticeParams& lattice, int n);

/// Generator for chunk `chunk` of a run seeded with `seed`.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t chunk);

/// StrongMC: deep-in-the-money closed form when Z/N <= 2 eps, otherwise the
/// sample mean of (A_n - X)^+.
PriceEstimate strong_mc_price(const MarketParams& params, double strike, const AccuracySpec& spec,
                              std::uint64_t seed, const McOptions& options = {});

/// StrongMC on the summed running totals of independent stocks.
PriceEstimate strong_mc_basket_price(std::span<const MarketParams> stocks, double strike,
                                     const AccuracySpec& spec, std::uint64_t seed,
                                     const McOptions& options = {});

}  // namespace asian
