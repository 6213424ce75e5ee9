#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace asian {

/// One stock's lattice inputs. `sigma` is the volatility over the whole
/// n-period horizon, `r` the per-period risk-free rate.
struct MarketParams {
  double s0 = 100.0;
  double sigma = 0.2;
  double r = 0.0;
  int n = 1;
};

/// Recombinant-tree factors with u = 1/d and risk-neutral p, q.
struct LatticeParams {
  double u = 1.0;
  double d = 1.0;
  double p = 0.5;
  double q = 0.5;
};

/// Node [t, i]: level t, i upticks so far.
struct TreeCoord {
  int t = 0;
  int i = 0;
};

enum class Step : std::int8_t { Down = -1, Up = 1 };
using Path = std::vector<Step>;

/// Throws InvalidArgument unless s0 > 0, n >= 1, sigma >= 0, r >= 0.
void validate(const MarketParams& params);

/// u = 1/d = exp(sigma / sqrt(n)), p = ((1 + r) - d) / (u - d).
/// Throws DegenerateVolatility for sigma == 0 and ArbitrageViolation when
/// 1 + r falls outside [d, u].
LatticeParams derive_lattice(const MarketParams& params);

/// Same risk-neutral construction from an explicit uptick factor u > 1.
LatticeParams lattice_from_uptick(double u, double r);

/// s(t, i) = s0 * u^(2i - t).
double node_price(const MarketParams& params, const LatticeParams& lattice, TreeCoord coord);

/// Running totals T_0..T_n along `path` (T_0 = s0).
std::vector<double> path_totals(const MarketParams& params, const LatticeParams& lattice,
                                std::span<const Step> path);

/// Closed form for E(T_n): (n + 1) s0 when r == 0, else s0 ((1 + r)^(n+1) - 1) / r.
double expected_total(const MarketParams& params);
double expected_total(double s0, double r, int n);

/// Largest attainable running total, the all-uptick path sum_t s0 u^t.
double max_total(const MarketParams& params, const LatticeParams& lattice);

}  // namespace asian
