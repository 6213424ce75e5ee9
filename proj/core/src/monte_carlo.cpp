#include "asian/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "asian/error.hpp"
#include "asian/summation.hpp"
#include "detail/parallel.hpp"

namespace asian {
namespace {

constexpr std::uint64_t kChunkPaths = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void validate_spec(const AccuracySpec& spec) {
  require(spec.epsilon > 0.0 && spec.epsilon < 1.0, ErrorCode::InvalidArgument,
          "epsilon must lie in (0, 1)");
  require(spec.delta > 0.0 && spec.delta < 1.0, ErrorCode::InvalidArgument,
          "delta must lie in (0, 1)");
}

std::uint64_t ceil_count(double x, std::uint64_t cap) {
  if (!(x < static_cast<double>(cap))) {
    fail(ErrorCode::InstanceTooLarge, "required sample count exceeds the configured maximum");
  }
  return static_cast<std::uint64_t>(std::ceil(x));
}

struct StockSampler {
  LatticeParams lattice;
  std::vector<double> up_powers;  // u^e for e in [-n, n], offset by n
  double s0;
  int n;

  explicit StockSampler(const MarketParams& params)
      : lattice(derive_lattice(params)), s0(params.s0), n(params.n) {
    up_powers.resize(2 * n + 1);
    for (int e = -n; e <= n; ++e) up_powers[e + n] = std::pow(lattice.u, e);
  }

  /// T_n along one freshly drawn path.
  double draw_total(std::mt19937_64& rng) const {
    double total = s0;
    int height = 0;
    for (int t = 0; t < n; ++t) {
      height += draw_uptick(rng, lattice.p) ? 1 : -1;
      total += s0 * up_powers[height + n];
    }
    return total;
  }
};

struct ChunkResult {
  std::uint64_t z = 0;
  CompensatedSum payoff;
};

PriceEstimate run_strong_mc(std::span<const MarketParams> stocks, double strike,
                            const AccuracySpec& spec, std::uint64_t seed, const McOptions& options) {
  require(!stocks.empty(), ErrorCode::InvalidArgument, "at least one stock is required");
  require(strike >= 0.0 && std::isfinite(strike), ErrorCode::InvalidArgument,
          "strike must be non-negative");
  validate_spec(spec);
  const int n = stocks.front().n;
  double sigma_max = 0.0;
  std::vector<StockSampler> samplers;
  samplers.reserve(stocks.size());
  for (const MarketParams& s : stocks) {
    validate(s);
    require(s.n == n, ErrorCode::InvalidArgument, "all basket stocks must share n");
    sigma_max = std::max(sigma_max, s.sigma);
    samplers.emplace_back(s);
  }
  const int m = static_cast<int>(stocks.size());
  const std::uint64_t samples = required_samples(spec, sigma_max, m, options.constants);
  require(samples <= options.max_samples, ErrorCode::InstanceTooLarge,
          "required sample count exceeds the configured maximum");

  const double horizon = static_cast<double>(n + 1);
  const double barrier = horizon * strike;
  const std::uint64_t chunks = (samples + kChunkPaths - 1) / kChunkPaths;
  std::vector<ChunkResult> results(chunks);
  detail::parallel_for(chunks, options.threads, [&](std::size_t c) {
    std::mt19937_64 rng = substream(seed, c);
    const std::uint64_t begin = c * kChunkPaths;
    const std::uint64_t end = std::min(samples, begin + kChunkPaths);
    ChunkResult& out = results[c];
    for (std::uint64_t i = begin; i < end; ++i) {
      double total = 0.0;
      for (const StockSampler& s : samplers) total += s.draw_total(rng);
      if (total <= barrier) {
        ++out.z;
      } else {
        out.payoff.add(total / horizon - strike);
      }
    }
  });

  std::uint64_t z = 0;
  CompensatedSum payoff;
  for (const ChunkResult& r : results) {
    z += r.z;
    payoff.add(r.payoff);
  }

  McDiagnostics diag;
  diag.n_samples = samples;
  diag.z_count = z;
  diag.z_fraction = static_cast<double>(z) / static_cast<double>(samples);
  diag.lambda0 = lambda0(spec.epsilon);
  diag.stocks = m;

  PriceEstimate est;
  est.method = Method::StrongMC;
  est.confidence = 1.0 - spec.delta;
  if (diag.z_fraction <= 2.0 * spec.epsilon) {
    diag.branch = McBranch::DeepInMoney;
    double expected = 0.0;
    for (const MarketParams& s : stocks) expected += expected_total(s);
    double price = (expected - barrier) / horizon;
    if (price < 0.0) {
      price = 0.0;
      diag.clamped_negative = true;
    }
    est.price = price;
    est.error_kind = ErrorKind::AbsoluteBound;
    est.error_value = 4.0 * spec.epsilon * strike;
  } else {
    diag.branch = McBranch::Sampled;
    est.price = payoff.value() / static_cast<double>(samples);
    est.error_kind = ErrorKind::StdDevBound;
    est.error_value = spec.epsilon * strike;
  }
  est.diagnostics = diag;
  return est;
}

}  // namespace

double lambda0(double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  return std::sqrt(2.0 * std::log(2.0 / epsilon));
}

std::uint64_t required_samples(const AccuracySpec& spec, double sigma_max, int m,
                               const SampleConstants& constants) {
  validate_spec(spec);
  require(m >= 1, ErrorCode::InvalidArgument, "basket size must be at least 1");
  require(sigma_max >= 0.0 && std::isfinite(sigma_max), ErrorCode::InvalidArgument,
          "sigma_max must be non-negative");
  require(constants.chernoff > 0.0 && constants.variance > 0.0, ErrorCode::InvalidArgument,
          "sample-count constants must be positive");
  const double eps = spec.epsilon;
  const double l0 = lambda0(eps);
  const double spread = sigma_max * std::sqrt(static_cast<double>(m));
  if (!(l0 > 2.0 * spread)) {
    fail(ErrorCode::VarianceBoundVacuous,
         "lambda0 <= 2 sigma_max sqrt(m): the variance bound gives no finite sample count");
  }
  constexpr auto cap = std::uint64_t{1} << 62;
  const double chernoff = constants.chernoff * std::log(2.0 / spec.delta) / (2.0 * eps * eps);
  const double variance = constants.variance / (eps * eps) * std::exp(4.0 * spread * l0) *
                          (1.0 + 2.0 * spread * eps) / (l0 - 2.0 * spread);
  return ceil_count(chernoff, cap) + ceil_count(variance, cap);
}

Path sample_path(std::mt19937_64& rng, const LatticeParams& lattice, int n) {
  require(n >= 0, ErrorCode::InvalidArgument, "n must be non-negative");
  Path path(static_cast<std::size_t>(n));
  for (Step& s : path) s = draw_uptick(rng, lattice.p) ? Step::Up : Step::Down;
  return path;
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t chunk) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(chunk + 0x632BE59BD9B4E019ull)));
}

PriceEstimate strong_mc_price(const MarketParams& params, double strike, const AccuracySpec& spec,
                              std::uint64_t seed, const McOptions& options) {
  return run_strong_mc(std::span<const MarketParams>(&params, 1), strike, spec, seed, options);
}

PriceEstimate strong_mc_basket_price(std::span<const MarketParams> stocks, double strike,
                                     const AccuracySpec& spec, std::uint64_t seed,
                                     const McOptions& options) {
  return run_strong_mc(stocks, strike, spec, seed, options);
}

}  // namespace asian
