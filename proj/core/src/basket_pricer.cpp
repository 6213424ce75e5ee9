#include "asian/basket_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asian/convolution.hpp"
#include "asian/error.hpp"
#include "asian/summation.hpp"
#include "detail/parallel.hpp"

namespace asian {
namespace {

void validate_basket(const BasketSpec& spec) {
  require(!spec.stocks.empty(), ErrorCode::InvalidArgument, "basket needs at least one stock");
  require(spec.strike >= 0.0 && std::isfinite(spec.strike), ErrorCode::InvalidArgument,
          "strike must be non-negative");
  const int n = spec.stocks.front().n;
  for (const MarketParams& stock : spec.stocks) {
    validate(stock);
    require(stock.n == n, ErrorCode::InvalidArgument, "all stocks in a basket must share n");
  }
}

double none_probability(std::span<const double> p) {
  double none = 1.0;
  for (double x : p) none *= 1.0 - x;
  return none;
}

}  // namespace

SuperbucketArray superbuckets(std::span<const NodeBuckets> leaves, std::int64_t k, double barrier) {
  SuperbucketArray out;
  out.k = k;
  out.barrier = barrier;
  out.core_masses.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<CompensatedSum> core(static_cast<std::size_t>(k));
  CompensatedSum overflow_mass;
  CompensatedSum overflow_moment;
  const NodeBuckets shape(k, barrier);
  for (const NodeBuckets& leaf : leaves) {
    check_same_shape(leaf, shape);
    const std::span<const double> w = leaf.window();
    for (std::size_t off = 0; off < w.size(); ++off) {
      core[static_cast<std::size_t>(leaf.window_begin()) + off].add(w[off]);
    }
    overflow_mass.add(leaf.overflow().mass);
    overflow_moment.add(leaf.overflow().mass * leaf.overflow().value);
  }
  for (std::size_t j = 0; j < core.size(); ++j) out.core_masses[j] = core[j].value();
  out.overflow_mass = overflow_mass.value();
  if (out.overflow_mass > 0.0) {
    out.overflow_value = std::max(barrier, overflow_moment.value() / out.overflow_mass);
  }
  return out;
}

PriceEstimate basket_price(const BasketSpec& spec) {
  validate_basket(spec);
  const std::size_t m = spec.stocks.size();
  const int n = spec.stocks.front().n;
  const double horizon = static_cast<double>(n + 1);
  const double barrier = horizon * spec.strike;
  const std::int64_t k = spec.options.k0;

  std::vector<double> means(m);
  double mean_sum = 0.0;
  bool all_exercise = barrier == 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    means[i] = expected_total(spec.stocks[i]);
    mean_sum += means[i];
    all_exercise = all_exercise || spec.stocks[i].s0 >= barrier;
  }

  PriceEstimate est;
  est.method = Method::BasketBTT;
  est.error_kind = ErrorKind::Interval;
  est.confidence = 1.0;
  BasketDiagnostics diag;
  diag.stocks = static_cast<int>(m);
  diag.k = k;
  diag.barrier = barrier;

  if (all_exercise) {
    diag.deterministic_exercise = true;
    diag.overflow_term = mean_sum - barrier;
    est.price = diag.overflow_term / horizon;
    est.diagnostics = diag;
    return est;
  }

  std::vector<RecBttResult> trees(m);
  detail::parallel_for(m, spec.threads, [&](std::size_t i) {
    RecBttOptions options = spec.options;
    options.seed = spec.options.seed + i;
    trees[i] = rec_btt_traverse(spec.stocks[i], barrier, options);
  });

  std::vector<SuperbucketArray> supers;
  supers.reserve(m);
  for (const RecBttResult& tree : trees) {
    supers.push_back(superbuckets(tree.leaf_buckets, k, barrier));
    diag.per_stock_error_bound = std::max(diag.per_stock_error_bound, tree.diagnostics.error_bound);
  }

  CompensatedSum overflow;
  std::vector<double> overflow_probability(m);
  for (std::size_t i = 0; i < m; ++i) {
    const SuperbucketArray& s = supers[i];
    overflow_probability[i] = s.overflow_mass;
    if (s.overflow_mass == 0.0) continue;
    overflow.add(s.overflow_mass * (s.overflow_value + (mean_sum - means[i]) - barrier));
  }
  diag.overflow_term = overflow.value();

  std::vector<MassPolynomial> polys;
  polys.reserve(m);
  for (const SuperbucketArray& s : supers) polys.push_back(s.core_masses);
  const MassPolynomial f = product_tree(std::move(polys), spec.options.convolution);
  CompensatedSum core;
  for (std::size_t j = static_cast<std::size_t>(k); j < f.size(); ++j) {
    core.add(f[j] * (supers.front().core_value(static_cast<std::int64_t>(j)) - barrier));
  }
  diag.core_term = core.value();

  // Exercised mass of the events where no stock overflows, against the
  // overflow sum's treatment of them.
  const double none = none_probability(overflow_probability);
  double exactly_one = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double others = 1.0;
    for (std::size_t l = 0; l < m; ++l) {
      if (l != i) others *= 1.0 - overflow_probability[l];
    }
    exactly_one += overflow_probability[i] * others;
  }
  diag.multi_overflow_probability = std::max(0.0, 1.0 - none - exactly_one);
  double below_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const SuperbucketArray& s = supers[i];
    if (s.overflow_mass < 1.0) below_sum += (means[i] - s.overflow_mass * s.overflow_value) / (1.0 - s.overflow_mass);
  }
  const double any_overflow_payoff = mean_sum - barrier - (none > 0.0 ? none * (below_sum - barrier) : 0.0);
  diag.multi_overflow_overcount = diag.overflow_term - any_overflow_payoff;

  est.price = (diag.overflow_term + diag.core_term) / horizon;
  est.error_value = static_cast<double>(m) * diag.per_stock_error_bound / horizon;
  est.diagnostics = diag;
  return est;
}

}  // namespace asian
