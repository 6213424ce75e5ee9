#include "asian/tree_model.hpp"

#include <cmath>

#include "asian/error.hpp"

namespace asian {

void validate(const MarketParams& params) {
  require(std::isfinite(params.s0) && params.s0 > 0.0, ErrorCode::InvalidArgument,
          "s0 must be positive");
  require(params.n >= 1, ErrorCode::InvalidArgument, "n must be at least 1");
  require(std::isfinite(params.sigma) && params.sigma >= 0.0, ErrorCode::InvalidArgument,
          "sigma must be non-negative");
  require(std::isfinite(params.r) && params.r >= 0.0, ErrorCode::InvalidArgument,
          "r must be non-negative");
}

LatticeParams lattice_from_uptick(double u, double r) {
  require(std::isfinite(u) && u > 0.0, ErrorCode::InvalidArgument, "uptick factor must be positive");
  require(u != 1.0, ErrorCode::DegenerateVolatility, "u == d leaves the uptick probability undefined");
  require(u > 1.0, ErrorCode::InvalidArgument, "uptick factor must exceed 1");
  const double d = 1.0 / u;
  const double p = ((1.0 + r) - d) / (u - d);
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCode::ArbitrageViolation, "1 + r lies outside [d, u]; risk-neutral p outside [0, 1]");
  }
  return {u, d, p, 1.0 - p};
}

LatticeParams derive_lattice(const MarketParams& params) {
  validate(params);
  require(params.sigma > 0.0, ErrorCode::DegenerateVolatility,
          "sigma == 0 gives u == d and an undefined uptick probability");
  return lattice_from_uptick(std::exp(params.sigma / std::sqrt(static_cast<double>(params.n))),
                             params.r);
}

double node_price(const MarketParams& params, const LatticeParams& lattice, TreeCoord coord) {
  require(coord.t >= 0 && coord.t <= params.n && coord.i >= 0 && coord.i <= coord.t,
          ErrorCode::InvalidArgument, "tree coordinate out of range");
  return params.s0 * std::pow(lattice.u, 2 * coord.i - coord.t);
}

std::vector<double> path_totals(const MarketParams& params, const LatticeParams& lattice,
                                std::span<const Step> path) {
  require(static_cast<int>(path.size()) == params.n, ErrorCode::InvalidArgument,
          "path length must equal n");
  std::vector<double> totals;
  totals.reserve(path.size() + 1);
  int ups = 0;
  double total = params.s0;
  totals.push_back(total);
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (path[t] == Step::Up) ++ups;
    total += node_price(params, lattice, {static_cast<int>(t) + 1, ups});
    totals.push_back(total);
  }
  return totals;
}

double expected_total(double s0, double r, int n) {
  require(n >= 0, ErrorCode::InvalidArgument, "n must be non-negative");
  if (r == 0.0) return static_cast<double>(n + 1) * s0;
  // expm1/log1p keep the geometric sum accurate for tiny r.
  return s0 * std::expm1(static_cast<double>(n + 1) * std::log1p(r)) / r;
}

double expected_total(const MarketParams& params) {
  return expected_total(params.s0, params.r, params.n);
}

double max_total(const MarketParams& params, const LatticeParams& lattice) {
  double total = 0.0;
  double price = params.s0;
  for (int t = 0; t <= params.n; ++t) {
    total += price;
    price *= lattice.u;
  }
  return total;
}

}  // namespace asian
