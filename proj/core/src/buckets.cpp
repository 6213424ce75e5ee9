#include "asian/buckets.hpp"

#include <algorithm>
#include <cmath>

#include "asian/error.hpp"
#include "asian/summation.hpp"

namespace asian {

NodeBuckets::NodeBuckets(std::int64_t k, double barrier) : k_(k), barrier_(barrier) {
  require(k >= 1, ErrorCode::InvalidArgument, "bucket count k must be at least 1");
  require(std::isfinite(barrier) && barrier > 0.0, ErrorCode::InvalidArgument,
          "barrier must be positive");
}

std::int64_t NodeBuckets::core_index(double v) const noexcept {
  if (v <= 0.0) return 0;
  auto j = static_cast<std::int64_t>(std::floor(v * static_cast<double>(k_) / barrier_));
  j = std::clamp<std::int64_t>(j, 0, k_ - 1);
  // floor() of the rounded quotient can be off by one next to a boundary.
  if (j + 1 < k_ && core_value(j + 1) <= v) ++j;
  if (j > 0 && core_value(j) > v) --j;
  return j;
}

void NodeBuckets::reserve_range(std::int64_t lo, std::int64_t hi) {
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, k_ - 1);
  if (lo > hi) return;
  if (mass_.empty()) {
    first_ = lo;
    mass_.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    return;
  }
  const std::int64_t new_first = std::min(lo, first_);
  const std::int64_t new_end = std::max(hi + 1, window_end());
  if (new_first == first_ && new_end == window_end()) return;
  std::vector<double> grown(static_cast<std::size_t>(new_end - new_first), 0.0);
  std::copy(mass_.begin(), mass_.end(), grown.begin() + (first_ - new_first));
  mass_ = std::move(grown);
  first_ = new_first;
}

void NodeBuckets::add_core(std::int64_t j, double mass) {
  if (mass == 0.0) return;
  reserve_range(j, j);
  mass_[static_cast<std::size_t>(j - first_)] += mass;
}

void NodeBuckets::add(double v, double mass) {
  if (v < barrier_) {
    add_core(core_index(v), mass);
  } else {
    add_overflow(v, mass);
  }
}

void NodeBuckets::add_overflow(double v, double mass) noexcept {
  if (!(mass > 0.0)) return;
  const double total = overflow_.mass + mass;
  overflow_.value += (mass / total) * (v - overflow_.value);
  overflow_.mass = total;
}

void NodeBuckets::assign_window(std::int64_t first, std::vector<double> masses) {
  require(first >= 0 && first + static_cast<std::int64_t>(masses.size()) <= k_,
          ErrorCode::InvalidArgument, "core window exceeds [0, k)");
  first_ = first;
  mass_ = std::move(masses);
}

double NodeBuckets::core_total() const noexcept {
  CompensatedSum sum;
  for (double m : mass_) sum.add(m);
  return sum.value();
}

bool NodeBuckets::empty() const noexcept {
  if (overflow_.mass > 0.0) return false;
  return std::all_of(mass_.begin(), mass_.end(), [](double m) { return m == 0.0; });
}

void NodeBuckets::trim() {
  std::size_t lo = 0;
  while (lo < mass_.size() && mass_[lo] == 0.0) ++lo;
  std::size_t hi = mass_.size();
  while (hi > lo && mass_[hi - 1] == 0.0) --hi;
  if (lo == 0 && hi == mass_.size()) return;
  std::vector<double> kept(mass_.begin() + static_cast<std::ptrdiff_t>(lo),
                           mass_.begin() + static_cast<std::ptrdiff_t>(hi));
  first_ = kept.empty() ? 0 : first_ + static_cast<std::int64_t>(lo);
  mass_ = std::move(kept);
}

NodeBuckets regroup(const NodeBuckets& fine, std::int64_t coarse_k) {
  require(coarse_k >= 1 && fine.k() % coarse_k == 0, ErrorCode::BucketShapeMismatch,
          "fine bucket count must be a multiple of the coarse count");
  const std::int64_t h = fine.k() / coarse_k;
  NodeBuckets coarse(coarse_k, fine.barrier());
  if (fine.window_end() > fine.window_begin()) {
    const std::int64_t lo = fine.window_begin() / h;
    const std::int64_t hi = (fine.window_end() - 1) / h;
    std::vector<double> masses(static_cast<std::size_t>(hi - lo + 1), 0.0);
    const std::span<const double> w = fine.window();
    for (std::size_t off = 0; off < w.size(); ++off) {
      const std::int64_t j = fine.window_begin() + static_cast<std::int64_t>(off);
      masses[static_cast<std::size_t>(j / h - lo)] += w[off];
    }
    coarse.assign_window(lo, std::move(masses));
  }
  coarse.add_overflow(fine.overflow().value, fine.overflow().mass);
  return coarse;
}

void check_same_shape(const NodeBuckets& a, const NodeBuckets& b) {
  if (a.k() != b.k() || a.barrier() != b.barrier()) {
    fail(ErrorCode::BucketShapeMismatch, "bucket arrays disagree on k or barrier");
  }
}

double total_mass(std::span<const NodeBuckets> nodes) {
  CompensatedSum sum;
  for (const NodeBuckets& node : nodes) {
    sum.add(node.core_total());
    sum.add(node.overflow().mass);
  }
  return sum.value();
}

}  // namespace asian
