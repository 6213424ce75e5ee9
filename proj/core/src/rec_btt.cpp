#include "asian/rec_btt.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "asian/bucket_btt.hpp"
#include "asian/error.hpp"
#include "asian/monte_carlo.hpp"

namespace asian {
namespace {

constexpr std::int64_t kMaxBuckets = std::int64_t{1} << 48;

std::int64_t ceil_with_tolerance(double x) {
  // pow() results such as 16.000000000000004 must not round up to 17.
  return static_cast<std::int64_t>(std::ceil(x * (1.0 - 1e-12)));
}

double alpha_between(double u, int offset) { return std::pow(u, 2 * offset); }

/// Accumulates mass-weighted overflow contributions before a single update.
struct OverflowTally {
  double mass = 0.0;
  double weighted = 0.0;

  void add(double v, double m) {
    mass += m;
    weighted += m * v;
  }
  void flush(NodeBuckets& into) const {
    if (mass > 0.0) into.add_overflow(weighted / mass, mass);
  }
};

void merge_direct(const NodeBuckets& parent, const NodeBuckets& leaf, NodeBuckets& into) {
  const std::int64_t k = into.k();
  const double barrier = into.barrier();
  const std::span<const double> pw = parent.window();
  const std::span<const double> lw = leaf.window();
  const Bucket& po = parent.overflow();
  const Bucket& lo = leaf.overflow();

  auto route = [&](std::int64_t j0, std::int64_t j1, double v, double m) {
    if (m == 0.0) return;
    // Core representatives are exact multiples of B/k, so the bucket of
    // their sum is the index sum.
    if (j0 >= 0 && j1 >= 0 && j0 + j1 < k) {
      into.add_core(j0 + j1, m);
    } else if (v < barrier && (j0 < 0 || j1 < 0)) {
      into.add(v, m);
    } else {
      into.add_overflow(v, m);
    }
  };

  for (std::size_t a = 0; a < pw.size(); ++a) {
    const std::int64_t j0 = parent.window_begin() + static_cast<std::int64_t>(a);
    const double v0 = parent.core_value(j0);
    for (std::size_t b = 0; b < lw.size(); ++b) {
      const std::int64_t j1 = leaf.window_begin() + static_cast<std::int64_t>(b);
      route(j0, j1, v0 + leaf.core_value(j1), pw[a] * lw[b]);
    }
    route(j0, -1, v0 + lo.value, pw[a] * lo.mass);
  }
  if (po.mass > 0.0) {
    for (std::size_t b = 0; b < lw.size(); ++b) {
      const std::int64_t j1 = leaf.window_begin() + static_cast<std::int64_t>(b);
      route(-1, j1, po.value + leaf.core_value(j1), po.mass * lw[b]);
    }
    route(-1, -1, po.value + lo.value, po.mass * lo.mass);
  }
}

void merge_convolution(const NodeBuckets& parent, const NodeBuckets& leaf, NodeBuckets& into,
                       const ConvolutionOptions& options) {
  const std::int64_t k = into.k();
  const std::span<const double> pw = parent.window();
  const std::span<const double> lw = leaf.window();
  const Bucket& po = parent.overflow();
  const Bucket& lo = leaf.overflow();
  OverflowTally tally;

  double parent_core_mass = 0.0;
  double parent_core_moment = 0.0;
  for (std::size_t a = 0; a < pw.size(); ++a) {
    parent_core_mass += pw[a];
    parent_core_moment += pw[a] * parent.core_value(parent.window_begin() + static_cast<std::int64_t>(a));
  }
  double leaf_core_mass = 0.0;
  double leaf_core_moment = 0.0;
  for (std::size_t b = 0; b < lw.size(); ++b) {
    leaf_core_mass += lw[b];
    leaf_core_moment += lw[b] * leaf.core_value(leaf.window_begin() + static_cast<std::int64_t>(b));
  }

  // Overflow rows and columns: every pair lands in the overflow bucket.
  if (lo.mass > 0.0 && parent_core_mass > 0.0) {
    tally.add(parent_core_moment / parent_core_mass + lo.value, parent_core_mass * lo.mass);
  }
  if (po.mass > 0.0) {
    const double leaf_mass = leaf_core_mass + lo.mass;
    if (leaf_mass > 0.0) {
      const double leaf_mean = (leaf_core_moment + lo.mass * lo.value) / leaf_mass;
      tally.add(po.value + leaf_mean, po.mass * leaf_mass);
    }
  }

  if (!pw.empty() && !lw.empty()) {
    const MassPolynomial product = convolve(pw, lw, options);
    const std::int64_t offset = parent.window_begin() + leaf.window_begin();
    const std::int64_t last = offset + static_cast<std::int64_t>(product.size()) - 1;
    if (offset < k) into.reserve_range(offset, std::min(last, k - 1));
    for (std::size_t c = 0; c < product.size(); ++c) {
      const std::int64_t j2 = offset + static_cast<std::int64_t>(c);
      if (product[c] == 0.0) continue;
      if (j2 < k) {
        into.add_core(j2, product[c]);
      } else {
        tally.add(into.core_value(j2), product[c]);
      }
    }
  }
  tally.flush(into);
}

bool buckets_agree(const NodeBuckets& a, const NodeBuckets& b) {
  const std::int64_t lo = std::min(a.window_begin(), b.window_begin());
  const std::int64_t hi = std::max(a.window_end(), b.window_end());
  for (std::int64_t j = lo; j < hi; ++j) {
    if (std::fabs(a.core_mass(j) - b.core_mass(j)) > 1e-12) return false;
  }
  if (std::fabs(a.overflow().mass - b.overflow().mass) > 1e-12) return false;
  const double scale = std::max(1.0, std::fabs(b.overflow().value));
  return std::fabs(a.overflow().value - b.overflow().value) <= 1e-9 * scale;
}

/// Error bound of one subproblem, mirroring RecursiveSolver::solve.
double subproblem_error(const RecursionSchedule& schedule, std::size_t level, int depth, bool zero_root,
                        double barrier, int spacing, BaseSolver base) {
  const double width = barrier / static_cast<double>(schedule.levels[level].buckets);
  if (level + 1 == schedule.levels.size()) {
    if (!zero_root) return static_cast<double>(depth) * width;
    return base == BaseSolver::BTT ? static_cast<double>(depth) * width : width;
  }
  const int block = schedule.levels[level + 1].depth;
  const double leaf =
      subproblem_error(schedule, level + 1, block, true, barrier, spacing, base) + width;  // + regroup
  double error = zero_root ? 0.0 : width;  // root bucketing
  int t = 0;
  for (; t + block <= depth; t += block) {
    const bool estimated = t > 0 && spacing >= 1;
    error += (estimated ? 2.0 * leaf + 2.0 * width : leaf) + width;  // + merge
  }
  error += static_cast<double>(depth - t) * width;
  return error;
}

class RecursiveSolver {
 public:
  RecursiveSolver(const RecursionSchedule& schedule, const LatticeParams& lattice, double barrier,
                  const RecBttOptions& options, RecBttDiagnostics& diag)
      : schedule_(schedule), lattice_(lattice), barrier_(barrier), options_(options), diag_(diag) {}

  /// Leaf buckets (k of `level`) of the depth-`depth` subtree rooted at a
  /// node priced `root_price`; the root's own price is excluded when
  /// `zero_root` is set.
  std::vector<NodeBuckets> solve(std::size_t level, int depth, double root_price, bool zero_root) {
    const std::int64_t k = schedule_.levels[level].buckets;
    const SubtreePrices prices(root_price, lattice_.u, depth);
    if (level + 1 == schedule_.levels.size()) {
      if (!zero_root || options_.base_solver == BaseSolver::BTT) return traverse(k, prices, depth, zero_root);
      if (options_.base_solver == BaseSolver::Exact) return enumerate(k, prices, depth);
      return sample(k, prices, depth);
    }

    const int block = schedule_.levels[level + 1].depth;
    std::vector<NodeBuckets> current{NodeBuckets(k, barrier_)};
    current.front().add(zero_root ? 0.0 : root_price, 1.0);
    int t = 0;
    for (; t + block <= depth; t += block) {
      std::vector<NodeBuckets> next(static_cast<std::size_t>(t + block + 1), NodeBuckets(k, barrier_));
      std::optional<std::vector<NodeBuckets>> reference;
      int reference_index = 0;
      for (int j = 0; j <= t; ++j) {
        const NodeBuckets& node = current[static_cast<std::size_t>(j)];
        if (node.empty()) continue;
        std::vector<NodeBuckets> estimated;
        const std::vector<NodeBuckets>* leaves = nullptr;
        if (!reference || alpha_between(lattice_.u, j - reference_index) > 2.0) {
          std::vector<NodeBuckets> fine = solve(level + 1, block, prices(t, j), true);
          std::vector<NodeBuckets> coarse;
          coarse.reserve(fine.size());
          for (const NodeBuckets& f : fine) coarse.push_back(regroup(f, k));
          reference = std::move(coarse);
          reference_index = j;
          ++diag_.fresh_solves;
          leaves = &*reference;
        } else if (j == reference_index) {
          leaves = &*reference;
        } else {
          estimated = estimate_leaves(*reference, alpha_between(lattice_.u, j - reference_index));
          ++diag_.estimated_subtrees;
          leaves = &estimated;
        }
        for (int l = 0; l <= block; ++l) {
          merge_checked(node, (*leaves)[static_cast<std::size_t>(l)], next[static_cast<std::size_t>(j + l)]);
        }
      }
      current = std::move(next);
      check_mass(current);
    }
    for (; t < depth; ++t) current = propagate_level(current, t, prices, lattice_);
    return current;
  }

 private:
  std::vector<NodeBuckets> traverse(std::int64_t k, const SubtreePrices& prices, int depth,
                                    bool zero_root) const {
    std::vector<NodeBuckets> current{NodeBuckets(k, barrier_)};
    current.front().add(zero_root ? 0.0 : prices.root_price(), 1.0);
    for (int t = 0; t < depth; ++t) current = propagate_level(current, t, prices, lattice_);
    return current;
  }

  std::vector<NodeBuckets> enumerate(std::int64_t k, const SubtreePrices& prices, int depth) const {
    if (depth > 24) {
      fail(ErrorCode::InstanceTooLarge,
           "exact base case of depth " + std::to_string(depth) + " exceeds 24 levels");
    }
    std::vector<NodeBuckets> leaves(static_cast<std::size_t>(depth + 1), NodeBuckets(k, barrier_));
    auto descend = [&](auto&& self, int t, int ups, double probability, double total) -> void {
      if (t == depth) {
        leaves[static_cast<std::size_t>(ups)].add(total, probability);
        return;
      }
      self(self, t + 1, ups, probability * lattice_.q, total + prices(t + 1, ups));
      self(self, t + 1, ups + 1, probability * lattice_.p, total + prices(t + 1, ups + 1));
    };
    descend(descend, 0, 0, 1.0, 0.0);
    return leaves;
  }

  std::vector<NodeBuckets> sample(std::int64_t k, const SubtreePrices& prices, int depth) {
    std::vector<NodeBuckets> leaves(static_cast<std::size_t>(depth + 1), NodeBuckets(k, barrier_));
    std::mt19937_64 rng = substream(options_.seed, sample_stream_++);
    const std::uint64_t samples = std::max<std::uint64_t>(options_.base_mc_samples, 1);
    const double weight = 1.0 / static_cast<double>(samples);
    for (std::uint64_t s = 0; s < samples; ++s) {
      int ups = 0;
      double total = 0.0;
      for (int t = 0; t < depth; ++t) {
        if (draw_uptick(rng, lattice_.p)) ++ups;
        total += prices(t + 1, ups);
      }
      leaves[static_cast<std::size_t>(ups)].add(total, weight);
    }
    return leaves;
  }

  void merge_checked(const NodeBuckets& parent, const NodeBuckets& leaf, NodeBuckets& into) {
    ++diag_.merges;
    if (options_.verify_merges && diag_.merges % 16 == 0) {
      NodeBuckets via_kernel = into;
      NodeBuckets via_direct = into;
      merge(parent, leaf, via_kernel, options_.kernel, options_.convolution);
      merge(parent, leaf, via_direct, MergeKernel::Direct);
      if (!buckets_agree(via_kernel, via_direct)) {
        fail(ErrorCode::InvariantViolation, "convolution merge disagrees with the direct merge");
      }
      into = std::move(via_kernel);
      return;
    }
    merge(parent, leaf, into, options_.kernel, options_.convolution);
  }

  void check_mass(std::span<const NodeBuckets> level) const {
    if (!options_.check_mass) return;
    const double mass = total_mass(level);
    if (std::fabs(mass - 1.0) > 1e-8) {
      fail(ErrorCode::InvariantViolation, "probability mass not conserved across a merged level");
    }
  }

  const RecursionSchedule& schedule_;
  LatticeParams lattice_;
  double barrier_;
  const RecBttOptions& options_;
  RecBttDiagnostics& diag_;
  std::uint64_t sample_stream_ = 0;
};

}  // namespace

RecursionSchedule build_schedule(int n0, std::int64_t k0, double sigma, int R, int base_case_depth) {
  if (R <= 2) fail(ErrorCode::InvalidR, "R must be an integer greater than 2");
  require(n0 >= 1, ErrorCode::InvalidArgument, "n0 must be at least 1");
  require(k0 >= 1, ErrorCode::InvalidArgument, "k0 must be at least 1");
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::DegenerateVolatility, "sigma must be positive");
  require(base_case_depth >= 1, ErrorCode::InvalidArgument, "base case depth must be at least 1");

  RecursionSchedule schedule;
  schedule.R = R;
  schedule.gamma = 1.0 / static_cast<double>(R);
  schedule.levels.push_back({n0, k0});
  if (n0 <= base_case_depth) return schedule;

  const double ratio = static_cast<double>(n0) / (sigma * sigma);
  for (int i = 1;; ++i) {
    const double step = static_cast<double>(i) * schedule.gamma;
    const auto depth = static_cast<int>(std::max<long long>(1, std::llround(std::pow(ratio, 0.5 - step))));
    const ScheduleLevel& previous = schedule.levels.back();
    if (depth >= previous.depth) break;
    std::int64_t buckets = ceil_with_tolerance(std::pow(4.0, i) * static_cast<double>(k0) * std::pow(ratio, step));
    buckets = std::max(buckets, previous.buckets);
    buckets = (buckets + previous.buckets - 1) / previous.buckets * previous.buckets;
    if (buckets > kMaxBuckets) {
      fail(ErrorCode::InstanceTooLarge, "recursion schedule needs more than 2^48 buckets per node");
    }
    schedule.levels.push_back({depth, buckets});
    if (depth <= base_case_depth) break;
  }
  return schedule;
}

void merge(const NodeBuckets& parent, const NodeBuckets& leaf, NodeBuckets& into, MergeKernel kernel,
           const ConvolutionOptions& options) {
  check_same_shape(parent, leaf);
  check_same_shape(parent, into);
  if (kernel == MergeKernel::Direct) {
    merge_direct(parent, leaf, into);
  } else {
    merge_convolution(parent, leaf, into, options);
  }
}

NodeBuckets estimate_node(const NodeBuckets& source, double alpha) {
  if (!(alpha >= 1.0 && alpha <= 2.0)) {
    fail(ErrorCode::AlphaOutOfRange, "estimation needs 1 <= alpha <= 2; solve the subtree instead");
  }
  NodeBuckets out(source.k(), source.barrier());
  const std::span<const double> w = source.window();
  if (!w.empty()) {
    const double v_lo = alpha * source.core_value(source.window_begin());
    const double v_hi = alpha * source.core_value(source.window_end() - 1);
    if (v_lo < source.barrier()) {
      out.reserve_range(out.core_index(v_lo), v_hi < source.barrier() ? out.core_index(v_hi) : source.k() - 1);
    }
    for (std::size_t off = 0; off < w.size(); ++off) {
      if (w[off] == 0.0) continue;
      out.add(alpha * source.core_value(source.window_begin() + static_cast<std::int64_t>(off)), w[off]);
    }
  }
  out.add_overflow(alpha * source.overflow().value, source.overflow().mass);
  return out;
}

std::vector<NodeBuckets> estimate_leaves(std::span<const NodeBuckets> source, double alpha) {
  std::vector<NodeBuckets> out;
  out.reserve(source.size());
  for (const NodeBuckets& node : source) out.push_back(estimate_node(node, alpha));
  return out;
}

int estimate_spacing(double u) {
  require(u > 1.0, ErrorCode::InvalidArgument, "uptick factor must exceed 1");
  auto spacing = static_cast<int>(std::floor(std::log(2.0) / (2.0 * std::log(u))));
  while (spacing > 0 && alpha_between(u, spacing) > 2.0) --spacing;
  while (alpha_between(u, spacing + 1) <= 2.0) ++spacing;
  return spacing;
}

double tracked_error_bound(const RecursionSchedule& schedule, double barrier, double u, BaseSolver base) {
  require(!schedule.levels.empty(), ErrorCode::InvalidArgument, "empty schedule");
  return subproblem_error(schedule, 0, schedule.levels.front().depth, false, barrier, estimate_spacing(u), base);
}

double recurrence_error_bound(const RecursionSchedule& schedule, double barrier) {
  require(!schedule.levels.empty(), ErrorCode::InvalidArgument, "empty schedule");
  const auto& levels = schedule.levels;
  const std::size_t last = levels.size() - 1;
  if (last == 0) {
    return static_cast<double>(levels[0].depth) * barrier / static_cast<double>(levels[0].buckets);
  }
  double error = barrier / static_cast<double>(levels[last].buckets);
  for (std::size_t i = last; i-- > 0;) {
    const double ratio = static_cast<double>(levels[i].depth) / static_cast<double>(levels[i + 1].depth);
    error = 5.0 * barrier * ratio / static_cast<double>(levels[i].buckets) + 2.0 * ratio * error;
  }
  return error;
}

RecBttResult rec_btt_traverse(const MarketParams& params, double barrier, const RecBttOptions& options) {
  validate(params);
  const LatticeParams lattice = derive_lattice(params);
  if (!(params.s0 < barrier)) {
    fail(ErrorCode::RootAboveBarrier, "initial price is not below the barrier");
  }
  RecBttResult result;
  RecBttDiagnostics& diag = result.diagnostics;
  diag.schedule = build_schedule(params.n, options.k0, params.sigma, options.R, options.base_case_depth);
  diag.base_solver = options.base_solver;
  diag.barrier = barrier;
  diag.error_bound = tracked_error_bound(diag.schedule, barrier, lattice.u, options.base_solver);
  diag.recurrence_bound = recurrence_error_bound(diag.schedule, barrier);
  diag.probabilistic_base = options.base_solver == BaseSolver::StrongMC && !diag.schedule.degenerate();

  RecursiveSolver solver(diag.schedule, lattice, barrier, options, diag);
  result.leaf_buckets = solver.solve(0, params.n, params.s0, false);
  result.payoff_estimate = overflow_payoff(result.leaf_buckets);
  diag.payoff_estimate = result.payoff_estimate;
  return result;
}

PriceEstimate rec_btt_price(const MarketParams& params, double strike, const RecBttOptions& options) {
  validate(params);
  require(strike >= 0.0 && std::isfinite(strike), ErrorCode::InvalidArgument, "strike must be non-negative");
  const double horizon = static_cast<double>(params.n + 1);
  const double barrier = horizon * strike;

  PriceEstimate est;
  est.method = Method::RecBTT;
  est.error_kind = ErrorKind::Interval;
  est.confidence = 1.0;

  if (params.s0 >= barrier) {
    RecBttDiagnostics diag;
    diag.base_solver = options.base_solver;
    diag.barrier = barrier;
    diag.deterministic_exercise = true;
    diag.payoff_estimate = expected_total(params) - barrier;
    est.price = diag.payoff_estimate / horizon;
    est.diagnostics = diag;
    return est;
  }
  RecBttResult result = rec_btt_traverse(params, barrier, options);
  est.price = result.payoff_estimate / horizon;
  est.error_value = result.diagnostics.error_bound / horizon;
  est.diagnostics = std::move(result.diagnostics);
  return est;
}

}  // namespace asian
