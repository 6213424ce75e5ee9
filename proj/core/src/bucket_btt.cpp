#include "asian/bucket_btt.hpp"

#include <cmath>

#include "asian/error.hpp"
#include "asian/summation.hpp"

namespace asian {

SubtreePrices::SubtreePrices(double root_price, double u, int depth)
    : root_price_(root_price), depth_(depth), powers_(static_cast<std::size_t>(2 * depth + 1)) {
  for (int e = -depth; e <= depth; ++e) powers_[static_cast<std::size_t>(e + depth)] = std::pow(u, e);
}

namespace {

void push_into(const NodeBuckets& parent, double child_price, double branch_probability,
               NodeBuckets& child) {
  const double barrier = parent.barrier();
  if (parent.window_end() > parent.window_begin()) {
    const double v_lo = parent.core_value(parent.window_begin()) + child_price;
    const double v_hi = parent.core_value(parent.window_end() - 1) + child_price;
    if (v_lo < barrier) {
      child.reserve_range(child.core_index(v_lo),
                          v_hi < barrier ? child.core_index(v_hi) : parent.k() - 1);
    }
    const std::span<const double> w = parent.window();
    for (std::size_t off = 0; off < w.size(); ++off) {
      if (w[off] == 0.0) continue;
      const std::int64_t j = parent.window_begin() + static_cast<std::int64_t>(off);
      child.add(parent.core_value(j) + child_price, w[off] * branch_probability);
    }
  }
  const Bucket& over = parent.overflow();
  if (over.mass > 0.0) child.add_overflow(over.value + child_price, over.mass * branch_probability);
}

}  // namespace

std::vector<NodeBuckets> propagate_level(std::span<const NodeBuckets> level, int t,
                                         const SubtreePrices& prices, const LatticeParams& lattice) {
  require(static_cast<int>(level.size()) == t + 1, ErrorCode::InvalidArgument,
          "level t must hold t + 1 nodes");
  require(!level.empty(), ErrorCode::InvalidArgument, "empty level");
  const std::int64_t k = level.front().k();
  const double barrier = level.front().barrier();
  std::vector<NodeBuckets> next(static_cast<std::size_t>(t + 2), NodeBuckets(k, barrier));
  for (int i = 0; i <= t; ++i) {
    const NodeBuckets& parent = level[static_cast<std::size_t>(i)];
    check_same_shape(parent, level.front());
    if (parent.empty()) continue;
    push_into(parent, prices(t + 1, i), lattice.q, next[static_cast<std::size_t>(i)]);
    push_into(parent, prices(t + 1, i + 1), lattice.p, next[static_cast<std::size_t>(i + 1)]);
  }
  return next;
}

double overflow_payoff(std::span<const NodeBuckets> leaves) {
  CompensatedSum sum;
  for (const NodeBuckets& leaf : leaves) {
    const Bucket& over = leaf.overflow();
    if (over.mass > 0.0) sum.add(over.mass * (over.value - leaf.barrier()));
  }
  return sum.value();
}

BucketedTreeResult btt_traverse(const MarketParams& params, const LatticeParams& lattice, double barrier,
                                std::int64_t k) {
  validate(params);
  require(k >= 1, ErrorCode::InvalidArgument, "bucket count k must be at least 1");
  if (!(params.s0 < barrier)) {
    fail(ErrorCode::RootAboveBarrier, "initial price is not below the barrier");
  }
  const SubtreePrices prices(params.s0, lattice.u, params.n);
  std::vector<NodeBuckets> level{NodeBuckets(k, barrier)};
  level.front().add(params.s0, 1.0);
  for (int t = 0; t < params.n; ++t) level = propagate_level(level, t, prices, lattice);

  BucketedTreeResult result;
  result.payoff_estimate = overflow_payoff(level);
  result.leaf_buckets = std::move(level);
  return result;
}

PriceEstimate btt_price(const MarketParams& params, double strike, std::int64_t k) {
  validate(params);
  require(strike >= 0.0 && std::isfinite(strike), ErrorCode::InvalidArgument,
          "strike must be non-negative");
  require(k >= 1, ErrorCode::InvalidArgument, "bucket count k must be at least 1");
  const double horizon = static_cast<double>(params.n + 1);
  const double barrier = horizon * strike;

  PriceEstimate est;
  est.method = Method::BTT;
  est.error_kind = ErrorKind::Interval;
  est.confidence = 1.0;
  BttDiagnostics diag;
  diag.k = k;
  diag.barrier = barrier;

  if (params.s0 >= barrier) {
    diag.deterministic_exercise = true;
    diag.payoff_estimate = expected_total(params) - barrier;
    est.price = diag.payoff_estimate / horizon;
    est.error_value = 0.0;
  } else {
    const LatticeParams lattice = derive_lattice(params);
    const BucketedTreeResult tree = btt_traverse(params, lattice, barrier, k);
    diag.payoff_estimate = tree.payoff_estimate;
    est.price = tree.payoff_estimate / horizon;
    est.error_value = static_cast<double>(params.n) * strike / static_cast<double>(k);
  }
  est.diagnostics = diag;
  return est;
}

}  // namespace asian
