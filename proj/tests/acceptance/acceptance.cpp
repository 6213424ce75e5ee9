// Acceptance suite: one PASS/FAIL line per criterion. Criterion A6 compares
// machine-dependent timings and only warns. CSV reports go to argv[1].

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "asian/basket_pricer.hpp"
#include "asian/bucket_btt.hpp"
#include "asian/convolution.hpp"
#include "asian/monte_carlo.hpp"
#include "asian/path_oracle.hpp"
#include "asian/rec_btt.hpp"
#include "oracles.hpp"

using namespace asian;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

/// Per-period rate drawn from [0, cap] but kept below u - 1 so the lattice
/// stays arbitrage-free.
double draw_rate(oracle::InstanceGen& gen, double sigma, int n, double cap) {
  const double u = std::exp(sigma / std::sqrt(static_cast<double>(n)));
  return gen.uniform(0.0, std::min(cap, 0.9 * (u - 1.0)));
}

Outcome a1_btt_containment() {
  oracle::InstanceGen gen(101);
  const std::int64_t ks[] = {4, 16, 64};
  double worst_gap = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.integer(4, 16);
    const double sigma = gen.uniform(0.05, 0.5);
    const MarketParams m{100.0, sigma, draw_rate(gen, sigma, n, 0.05), n};
    const double strike = gen.uniform(80.0, 120.0);
    const std::int64_t k = ks[trial % 3];
    const double exact = exact_price(m, strike).price;
    const PriceEstimate e = btt_price(m, strike, k);
    const double slack = m.n * strike / static_cast<double>(k);
    if (!(e.price <= exact + 1e-9 && e.price >= exact - slack - 1e-9)) ++bad;
    worst_gap = std::max(worst_gap, (exact - e.price) / slack);
  }
  return {bad == 0, fmt("%d/100 outside [P - nX/k, P]; worst (P - est)/(nX/k) = %.3f", bad, worst_gap)};
}

Outcome a2_rec_btt_bound() {
  oracle::InstanceGen gen(202);
  int bad = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double sigma = gen.uniform(0.05, 0.5);
    const MarketParams m{100.0, sigma, draw_rate(gen, sigma, 16, 0.01), 16};
    const double strike = gen.uniform(80.0, 120.0);
    RecBttOptions options;
    options.k0 = trial % 2 == 0 ? 4 : 8;
    options.R = 3;
    const PriceEstimate e = rec_btt_price(m, strike, options);
    const double exact = exact_price(m, strike).price;
    const auto& d = std::get<RecBttDiagnostics>(e.diagnostics);
    const double bound = d.recurrence_bound / 17.0;
    const bool deterministic = d.deterministic_exercise;
    const bool ok = e.price <= exact + 1e-9 && (deterministic || exact - e.price <= bound);
    bad += !ok;
    if (!deterministic) worst_ratio = std::max(worst_ratio, (exact - e.price) / bound);
  }
  return {bad == 0, fmt("%d/50 violations; worst (P - est)/(E_0/(n+1)) = %.4f", bad, worst_ratio)};
}

Outcome a3_mc_deep_branch() {
  const MarketParams m{100.0, 0.2, 0.0, 12};
  const double strike = 80.0;
  const AccuracySpec spec{0.05, 0.05};
  const double exact = exact_price(m, strike).price;
  int deep = 0;
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const PriceEstimate e = strong_mc_price(m, strike, spec, seed);
    const auto& d = std::get<McDiagnostics>(e.diagnostics);
    if (d.branch != McBranch::DeepInMoney) continue;
    ++deep;
    inside += std::fabs(e.price - exact) <= 4.0 * spec.epsilon * strike;
  }
  const bool ok = deep == 200 && inside >= 190;
  return {ok, fmt("deep branch in %d/200 runs; within 4 eps X in %d", deep, inside)};
}

Outcome a4_mc_sampled_branch() {
  const MarketParams m{100.0, 0.2, 0.0, 12};
  const double strike = 100.0;
  const AccuracySpec spec{0.05, 0.05};
  const double exact = exact_price(m, strike).price;
  std::vector<double> prices;
  int sampled = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const PriceEstimate e = strong_mc_price(m, strike, spec, seed);
    sampled += std::get<McDiagnostics>(e.diagnostics).branch == McBranch::Sampled;
    prices.push_back(e.price);
  }
  const double mean = std::accumulate(prices.begin(), prices.end(), 0.0) / prices.size();
  double var = 0.0;
  for (double p : prices) var += (p - mean) * (p - mean);
  const double sd = std::sqrt(var / (prices.size() - 1));
  const double eps_x = spec.epsilon * strike;
  const bool ok = sampled == 200 && sd <= 1.2 * eps_x && std::fabs(mean - exact) <= 3.0 * eps_x / std::sqrt(200.0);
  return {ok, fmt("sampled %d/200; sd %.4f (limit %.2f); |mean - P| %.4f (limit %.4f)", sampled, sd, 1.2 * eps_x,
                  std::fabs(mean - exact), 3.0 * eps_x / std::sqrt(200.0))};
}

Outcome a5_basket(const fs::path& report_dir) {
  oracle::InstanceGen gen(505);
  std::ofstream csv(report_dir / "a5_basket.csv");
  csv << "instance,s0_1,sigma_1,s0_2,sigma_2,strike,exact,basket,deviation,error_bound,overcount,"
         "multi_overflow_probability\n";
  int bad = 0;
  double worst = 0.0;
  double worst_fraction = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<MarketParams> stocks{{gen.uniform(80.0, 120.0), gen.uniform(0.05, 0.5), 0.0, 8},
                                           {gen.uniform(80.0, 120.0), gen.uniform(0.05, 0.5), 0.0, 8}};
    const double strike = (stocks[0].s0 + stocks[1].s0) * gen.uniform(0.9, 1.1);
    BasketSpec spec;
    spec.stocks = stocks;
    spec.strike = strike;
    spec.options.k0 = 64;
    const PriceEstimate e = basket_price(spec);
    const double exact = exact_basket_price(stocks, strike).price;
    const auto& d = std::get<BasketDiagnostics>(e.diagnostics);
    const double deviation = std::fabs(e.price - exact);
    const double allowed = e.error_value + d.multi_overflow_overcount / 9.0;
    bad += !(deviation <= allowed + 1e-9);
    worst = std::max(worst, deviation);
    if (allowed > 0.0) worst_fraction = std::max(worst_fraction, deviation / allowed);
    csv << fmt("%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.10f,%.10f,%.3e,%.6f,%.6f,%.6f\n", trial, stocks[0].s0, stocks[0].sigma,
               stocks[1].s0, stocks[1].sigma, strike, exact, e.price, deviation, e.error_value,
               d.multi_overflow_overcount / 9.0, d.multi_overflow_probability);
  }
  return {bad == 0, fmt("%d/50 violations; worst |basket - P| = %.4f (%.3f of allowance)", bad, worst, worst_fraction)};
}

double median_runtime(const std::function<void()>& body, int reps) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    body();
    t.push_back(seconds_since(start));
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

Outcome a6_dominance(const fs::path& report_dir) {
  const MarketParams m{100.0, 0.3, 0.0, 64};
  const double strike = 100.0;
  struct Cell {
    std::string method;
    std::int64_t k;
    double seconds;
    double width;
    double price;
  };
  std::vector<Cell> btt;
  for (std::int64_t k = 64; k <= 32768; k *= 2) {
    PriceEstimate e;
    const double s = median_runtime([&] { e = btt_price(m, strike, k); }, 3);
    btt.push_back({"btt", k, s, e.error_value, e.price});
  }
  std::vector<Cell> rec;
  for (std::int64_t k0 = 64; k0 <= 65536; k0 *= 2) {
    RecBttOptions options;
    options.k0 = k0;
    PriceEstimate e;
    const double s = median_runtime([&] { e = rec_btt_price(m, strike, options); }, 3);
    rec.push_back({"recbtt", k0, s, e.error_value, e.price});
    if (s > 2.0 * btt.back().seconds) break;
  }

  std::ofstream csv(report_dir / "a6_dominance.csv");
  csv << "budget_ns,btt_k,btt_width,recbtt_k0,recbtt_ns,recbtt_width,recbtt_not_wider\n";
  int wins_top_two = 0;
  for (std::size_t b = 0; b < btt.size(); ++b) {
    const Cell* best = nullptr;
    for (const Cell& c : rec) {
      if (c.seconds <= btt[b].seconds && (best == nullptr || c.width < best->width)) best = &c;
    }
    const bool wins = best != nullptr && best->width <= btt[b].width;
    if (b + 2 >= btt.size()) wins_top_two += wins;
    csv << fmt("%.0f,%lld,%.6f,", btt[b].seconds * 1e9, static_cast<long long>(btt[b].k), btt[b].width);
    if (best != nullptr) {
      csv << fmt("%lld,%.0f,%.6f,%d\n", static_cast<long long>(best->k), best->seconds * 1e9, best->width, wins);
    } else {
      csv << ",,,0\n";
    }
  }
  std::ofstream raw(report_dir / "a6_cells.csv");
  raw << "method,n,k,sigma,price,error_bound,runtime_ns\n";
  for (const auto* list : {&btt, &rec}) {
    for (const Cell& c : *list) {
      raw << fmt("%s,64,%lld,0.3,%.10f,%.6f,%.0f\n", c.method.c_str(), static_cast<long long>(c.k), c.price, c.width,
                 c.seconds * 1e9);
    }
  }
  return {wins_top_two == 2, fmt("RecBTT interval not wider in %d of the 2 largest budgets", wins_top_two)};
}

Outcome a7_convolution() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_fft = 0.0;
  ConvolutionOptions fft_only;
  fft_only.naive_crossover = 1;
  for (int trial = 0; trial < 20; ++trial) {
    const auto la = static_cast<std::size_t>(1 + rng() % 4096);
    const auto lb = static_cast<std::size_t>(1 + rng() % 4096);
    std::vector<double> a(la);
    std::vector<double> b(lb);
    for (double& x : a) x = u(rng) / la;
    for (double& x : b) x = u(rng) / lb;
    const MassPolynomial fast = convolve(a, b, fft_only);
    const std::vector<double> slow = oracle::naive_product(a, b);
    for (std::size_t i = 0; i < slow.size(); ++i) worst_fft = std::max(worst_fft, std::fabs(fast[i] - slow[i]));
  }
  double worst_merge = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto fill = [&](NodeBuckets& b, double share) {
      std::vector<double> w(32);
      double total = 0.0;
      for (double& x : w) total += (x = u(rng));
      for (std::int64_t j = 0; j < 32; ++j) b.add_core(j, (1.0 - share) * w[j] / total);
      if (share > 0.0) b.add_overflow(10.0 * (1.0 + u(rng)), share);
    };
    NodeBuckets parent(32, 10.0);
    NodeBuckets leaf(32, 10.0);
    fill(parent, trial % 2 ? 0.05 : 0.0);
    fill(leaf, trial % 3 ? 0.1 : 0.0);
    NodeBuckets via_fft(32, 10.0);
    NodeBuckets via_loop(32, 10.0);
    merge(parent, leaf, via_fft, MergeKernel::Convolution, fft_only);
    merge(parent, leaf, via_loop, MergeKernel::Direct);
    for (std::int64_t j = 0; j < 32; ++j) {
      worst_merge = std::max(worst_merge, std::fabs(via_fft.core_mass(j) - via_loop.core_mass(j)));
    }
    worst_merge = std::max(worst_merge, std::fabs(via_fft.overflow().mass - via_loop.overflow().mass));
  }
  return {worst_fft <= 1e-9 && worst_merge <= 1e-12,
          fmt("fft vs naive max deviation %.2e; merge kernels max deviation %.2e", worst_fft, worst_merge)};
}

Outcome a8_closed_forms() {
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    for (double r : {0.0, 0.01, 0.1}) {
      const MarketParams m{100.0, 0.5, r, n};
      const double sweep = oracle::tree_sweep_expected_total(m);
      worst = std::max(worst, std::fabs(expected_total(m) - sweep) / sweep);
    }
  }
  double worst_lambda = 0.0;
  for (double eps : {0.5, 0.1, 0.01, 0.001}) {
    const double l0 = lambda0(eps);
    worst_lambda = std::max(worst_lambda, std::fabs(2.0 * std::exp(-l0 * l0 / 2.0) - eps));
  }
  return {worst <= 1e-10 && worst_lambda <= 1e-12,
          fmt("expected_total worst relative deviation %.2e; lambda0 identity worst %.2e", worst, worst_lambda)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path report_dir = argc > 1 ? fs::path(argv[1]) : fs::current_path();
  fs::create_directories(report_dir);

  struct Criterion {
    const char* id;
    double budget_seconds;
    bool soft;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria = {
      {"A1", 10.0, false, a1_btt_containment},
      {"A2", 30.0, false, a2_rec_btt_bound},
      {"A3", 60.0, false, a3_mc_deep_branch},
      {"A4", 120.0, false, a4_mc_sampled_branch},
      {"A5", 60.0, false, [&] { return a5_basket(report_dir); }},
      {"A6", 600.0, true, [&] { return a6_dominance(report_dir); }},
      {"A7", 5.0, false, a7_convolution},
      {"A8", 1.0, false, a8_closed_forms},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(start);
    if (elapsed > c.budget_seconds) {
      out.pass = false;
      out.detail += fmt(" [over runtime budget %.0f s]", c.budget_seconds);
    }
    const char* verdict = out.pass ? "PASS" : (c.soft ? "WARN" : "FAIL");
    std::printf("%s %s (%.2f s): %s\n", c.id, verdict, elapsed, out.detail.c_str());
    std::fflush(stdout);
    failures += !out.pass && !c.soft;
  }
  return failures == 0 ? 0 : 1;
}
