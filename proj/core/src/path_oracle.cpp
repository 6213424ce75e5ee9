#include "asian/path_oracle.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "asian/error.hpp"
#include "asian/summation.hpp"
#include "detail/parallel.hpp"

namespace asian {
namespace {

struct Outcome {
  double probability;
  double total;
};

struct PartialSums {
  CompensatedSum payoff;
  CompensatedSum measure;
};

/// prices[t][i] = s(t, i).
std::vector<std::vector<double>> price_table(const MarketParams& params, const LatticeParams& lattice) {
  std::vector<std::vector<double>> prices(params.n + 1);
  for (int t = 0; t <= params.n; ++t) {
    prices[t].resize(t + 1);
    for (int i = 0; i <= t; ++i) prices[t][i] = node_price(params, lattice, {t, i});
  }
  return prices;
}

class SingleStockWalker {
 public:
  SingleStockWalker(const MarketParams& params, const LatticeParams& lattice)
      : n_(params.n), lattice_(lattice), prices_(price_table(params, lattice)) {}

  /// Visits every extension of the node reached after `prefix_steps` steps
  /// encoded (most significant first) in `prefix`, in lexicographic order.
  template <class Visit>
  void walk_prefix(std::uint64_t prefix, int prefix_steps, Visit&& visit) const {
    int ups = 0;
    double probability = 1.0;
    double total = prices_[0][0];
    for (int t = 0; t < prefix_steps; ++t) {
      const bool up = (prefix >> (prefix_steps - 1 - t)) & 1u;
      if (up) ++ups;
      probability *= up ? lattice_.p : lattice_.q;
      total += prices_[t + 1][ups];
    }
    descend(prefix_steps, ups, probability, total, visit);
  }

 private:
  template <class Visit>
  void descend(int t, int ups, double probability, double total, Visit& visit) const {
    if (t == n_) {
      visit(Outcome{probability, total});
      return;
    }
    descend(t + 1, ups, probability * lattice_.q, total + prices_[t + 1][ups], visit);
    descend(t + 1, ups + 1, probability * lattice_.p, total + prices_[t + 1][ups + 1], visit);
  }

  int n_;
  LatticeParams lattice_;
  std::vector<std::vector<double>> prices_;
};

void check_size(int steps, const OracleOptions& options) {
  if (steps > options.n_max || steps > 62) {
    fail(ErrorCode::InstanceTooLarge, "exhaustive enumeration of " + std::to_string(steps) +
                                          " binary steps exceeds n_max = " +
                                          std::to_string(options.n_max));
  }
}

PartialSums enumerate_single(const MarketParams& params, double barrier, const OracleOptions& options) {
  validate(params);
  check_size(params.n, options);
  const LatticeParams lattice = derive_lattice(params);
  const SingleStockWalker walker(params, lattice);

  const int split = std::min(params.n, 6);
  const std::size_t tasks = std::size_t{1} << split;
  std::vector<PartialSums> partial(tasks);
  detail::parallel_for(tasks, options.threads, [&](std::size_t task) {
    PartialSums& acc = partial[task];
    walker.walk_prefix(task, split, [&](const Outcome& o) {
      acc.measure.add(o.probability);
      if (o.total > barrier) acc.payoff.add(o.probability * (o.total - barrier));
    });
  });

  PartialSums result;
  for (const PartialSums& p : partial) {
    result.payoff.add(p.payoff);
    result.measure.add(p.measure);
  }
  return result;
}

std::vector<Outcome> leaf_outcomes(const MarketParams& params) {
  const LatticeParams lattice = derive_lattice(params);
  const SingleStockWalker walker(params, lattice);
  std::vector<Outcome> outcomes;
  outcomes.reserve(std::size_t{1} << params.n);
  walker.walk_prefix(0, 0, [&](const Outcome& o) { outcomes.push_back(o); });
  return outcomes;
}

}  // namespace

ExactPrice exact_price(const MarketParams& params, double strike, const OracleOptions& options) {
  require(strike >= 0.0, ErrorCode::InvalidArgument, "strike must be non-negative");
  const double barrier = static_cast<double>(params.n + 1) * strike;
  const PartialSums sums = enumerate_single(params, barrier, options);
  ExactPrice out;
  out.total_payoff = sums.payoff.value();
  out.price = out.total_payoff / static_cast<double>(params.n + 1);
  out.paths_enumerated = std::uint64_t{1} << params.n;
  out.measure = sums.measure.value();
  return out;
}

double exact_total_payoff(const MarketParams& params, double barrier, const OracleOptions& options) {
  return enumerate_single(params, barrier, options).payoff.value();
}

ExactPrice exact_basket_price(std::span<const MarketParams> stocks, double strike,
                              const OracleOptions& options) {
  require(!stocks.empty(), ErrorCode::InvalidArgument, "basket needs at least one stock");
  require(strike >= 0.0, ErrorCode::InvalidArgument, "strike must be non-negative");
  const int n = stocks.front().n;
  for (const MarketParams& s : stocks) {
    validate(s);
    require(s.n == n, ErrorCode::InvalidArgument, "all basket stocks must share n");
  }
  const int m = static_cast<int>(stocks.size());
  check_size(m * n, options);

  std::vector<std::vector<Outcome>> per_stock;
  per_stock.reserve(stocks.size());
  for (const MarketParams& s : stocks) per_stock.push_back(leaf_outcomes(s));

  const double barrier = static_cast<double>(n + 1) * strike;
  // Stock 0 is the outermost loop; its paths partition the work.
  const std::size_t tasks = per_stock[0].size();
  std::vector<PartialSums> partial(tasks);
  detail::parallel_for(tasks, options.threads, [&](std::size_t task) {
    PartialSums& acc = partial[task];
    const Outcome& first = per_stock[0][task];
    auto recurse = [&](auto&& self, int stock, double probability, double total) -> void {
      if (stock == m) {
        acc.measure.add(probability);
        if (total > barrier) acc.payoff.add(probability * (total - barrier));
        return;
      }
      for (const Outcome& o : per_stock[stock]) {
        self(self, stock + 1, probability * o.probability, total + o.total);
      }
    };
    recurse(recurse, 1, first.probability, first.total);
  });

  PartialSums sums;
  for (const PartialSums& p : partial) {
    sums.payoff.add(p.payoff);
    sums.measure.add(p.measure);
  }
  ExactPrice out;
  out.total_payoff = sums.payoff.value();
  out.price = out.total_payoff / static_cast<double>(n + 1);
  out.paths_enumerated = std::uint64_t{1} << (m * n);
  out.measure = sums.measure.value();
  return out;
}

PriceEstimate to_estimate(const ExactPrice& exact) {
  PriceEstimate est;
  est.price = exact.price;
  est.error_kind = ErrorKind::Interval;
  est.error_value = 0.0;
  est.confidence = 1.0;
  est.method = Method::Exact;
  est.diagnostics = ExactDiagnostics{exact.paths_enumerated};
  return est;
}

}  // namespace asian
