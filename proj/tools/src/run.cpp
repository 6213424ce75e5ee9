#include "asian_cli/run.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>

#include "asian/basket_pricer.hpp"
#include "asian/bucket_btt.hpp"
#include "asian/error.hpp"
#include "asian/monte_carlo.hpp"
#include "asian/path_oracle.hpp"
#include "asian/rec_btt.hpp"

namespace asian::cli {
namespace {

using nlohmann::json;

PriceEstimate dispatch(const RunConfig& c) {
  const std::span<const MarketParams> stocks = c.stocks;
  switch (c.method) {
    case MethodName::Exact: {
      OracleOptions options;
      options.threads = c.threads;
      if (stocks.size() == 1) return to_estimate(exact_price(stocks.front(), c.strike, options));
      return to_estimate(exact_basket_price(stocks, c.strike, options));
    }
    case MethodName::Mc: {
      McOptions options;
      options.threads = c.threads;
      if (stocks.size() == 1) return strong_mc_price(stocks.front(), c.strike, c.accuracy, *c.seed, options);
      return strong_mc_basket_price(stocks, c.strike, c.accuracy, *c.seed, options);
    }
    case MethodName::Btt:
      return btt_price(stocks.front(), c.strike, c.k);
    case MethodName::RecBtt:
    case MethodName::Basket: {
      RecBttOptions options;
      options.k0 = c.k0;
      options.R = c.R;
      options.base_solver = c.base_solver;
      options.seed = c.seed.value_or(0);
      if (c.method == MethodName::RecBtt) return rec_btt_price(stocks.front(), c.strike, options);
      BasketSpec spec{c.stocks, c.strike, options, c.threads};
      return basket_price(spec);
    }
  }
  fail(ErrorCode::InvariantViolation, "unhandled method");
}

json schedule_json(const RecursionSchedule& schedule) {
  json levels = json::array();
  for (const ScheduleLevel& level : schedule.levels) levels.push_back({{"depth", level.depth}, {"buckets", level.buckets}});
  return levels;
}

json diagnostics_json(const Diagnostics& diagnostics) {
  return std::visit(
      [](const auto& d) -> json {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, ExactDiagnostics>) {
          return {{"paths_enumerated", d.paths_enumerated}};
        } else if constexpr (std::is_same_v<D, McDiagnostics>) {
          return {{"n_samples", d.n_samples},     {"z_count", d.z_count},
                  {"z_fraction", d.z_fraction},   {"branch", to_string(d.branch)},
                  {"lambda0", d.lambda0},         {"stocks", d.stocks},
                  {"clamped_negative", d.clamped_negative}};
        } else if constexpr (std::is_same_v<D, BttDiagnostics>) {
          return {{"k", d.k},
                  {"barrier", d.barrier},
                  {"payoff_estimate", d.payoff_estimate},
                  {"deterministic_exercise", d.deterministic_exercise}};
        } else if constexpr (std::is_same_v<D, RecBttDiagnostics>) {
          return {{"schedule", schedule_json(d.schedule)},
                  {"base_solver", to_string(d.base_solver)},
                  {"barrier", d.barrier},
                  {"payoff_estimate", d.payoff_estimate},
                  {"error_bound", d.error_bound},
                  {"recurrence_bound", d.recurrence_bound},
                  {"fresh_solves", d.fresh_solves},
                  {"estimated_subtrees", d.estimated_subtrees},
                  {"merges", d.merges},
                  {"deterministic_exercise", d.deterministic_exercise},
                  {"probabilistic_base", d.probabilistic_base}};
        } else {
          return {{"stocks", d.stocks},
                  {"k", d.k},
                  {"barrier", d.barrier},
                  {"overflow_term", d.overflow_term},
                  {"core_term", d.core_term},
                  {"per_stock_error_bound", d.per_stock_error_bound},
                  {"multi_overflow_probability", d.multi_overflow_probability},
                  {"multi_overflow_overcount", d.multi_overflow_overcount},
                  {"deterministic_exercise", d.deterministic_exercise}};
        }
      },
      diagnostics);
}

json inputs_json(const RunConfig& c) {
  json stocks = json::array();
  for (const MarketParams& p : c.stocks) stocks.push_back({{"s0", p.s0}, {"sigma", p.sigma}, {"r", p.r}, {"n", p.n}});
  json in = {{"stocks", stocks}, {"strike", c.strike}, {"threads", c.threads}};
  switch (c.method) {
    case MethodName::Exact:
      break;
    case MethodName::Mc:
      in["epsilon"] = c.accuracy.epsilon;
      in["delta"] = c.accuracy.delta;
      break;
    case MethodName::Btt:
      in["k"] = c.k;
      break;
    case MethodName::RecBtt:
    case MethodName::Basket:
      in["k0"] = c.k0;
      in["R"] = c.R;
      in["base_solver"] = to_string(c.base_solver);
      break;
  }
  if (c.seed) in["seed"] = *c.seed;
  return in;
}

/// Shortest text that reads back to the same double.
std::string shortest(double x) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::int64_t k_or_samples(const RunRecord& r) {
  return std::visit(
      [&](const auto& d) -> std::int64_t {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, ExactDiagnostics>) {
          return static_cast<std::int64_t>(d.paths_enumerated);
        } else if constexpr (std::is_same_v<D, McDiagnostics>) {
          return static_cast<std::int64_t>(d.n_samples);
        } else if constexpr (std::is_same_v<D, BttDiagnostics>) {
          return r.config.k;
        } else {
          return r.config.k0;
        }
      },
      r.estimate.diagnostics);
}

}  // namespace

RunRecord run(const RunConfig& config) {
  RunRecord record;
  record.config = config;
  const auto start = std::chrono::steady_clock::now();
  record.estimate = dispatch(config);
  const auto stop = std::chrono::steady_clock::now();
  record.runtime_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
  return record;
}

json to_json(const RunRecord& record) {
  const PriceEstimate& e = record.estimate;
  return {{"method", to_string(record.config.method)},
          {"inputs", inputs_json(record.config)},
          {"price", e.price},
          {"error_kind", to_string(e.error_kind)},
          {"error_value", e.error_value},
          {"confidence", e.confidence},
          {"diagnostics", diagnostics_json(e.diagnostics)},
          {"runtime_ns", record.runtime_ns}};
}

json error_json(const std::exception& error) {
  std::string_view name = "InternalError";
  if (const auto* pe = dynamic_cast<const PricingError*>(&error)) name = error_name(pe->code());
  return {{"error", name}, {"message", error.what()}};
}

std::string csv_header() { return "method,n,k_or_N,sigma,price,error_bound,runtime_ns,seed"; }

std::string csv_row(const RunRecord& record) {
  const RunConfig& c = record.config;
  double sigma = 0.0;
  for (const MarketParams& p : c.stocks) sigma = std::max(sigma, p.sigma);
  std::string row = std::string(to_string(c.method)) + ',' + std::to_string(c.stocks.front().n) + ',' +
                    std::to_string(k_or_samples(record)) + ',' + shortest(sigma) + ',' +
                    shortest(record.estimate.price) + ',' + shortest(record.estimate.error_value) + ',' +
                    std::to_string(record.runtime_ns) + ',';
  if (c.seed) row += std::to_string(*c.seed);
  return row;
}

std::string bench_compare(std::span<const RunConfig> cells) {
  std::string table = csv_header() + '\n';
  for (const RunConfig& cell : cells) table += csv_row(run(cell)) + '\n';
  return table;
}

int exit_code_for(const std::exception& error) noexcept {
  const auto* pe = dynamic_cast<const PricingError*>(&error);
  if (pe == nullptr) return kInvariantError;
  switch (pe->code()) {
    case ErrorCode::ConfigError: return kConfigError;
    case ErrorCode::InvariantViolation: return kInvariantError;
    default: return kPreconditionError;
  }
}

}  // namespace asian::cli
