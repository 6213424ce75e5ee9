#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace asian {

struct Bucket {
  double mass = 0.0;
  double value = 0.0;
};

/// The k core buckets and one overflow bucket held at a tree node.
///
/// Core bucket j covers running totals in [jB/k, (j+1)B/k) and is
/// represented by its left endpoint jB/k. Core masses are stored as a dense
/// window [first, first + size) of the index range; buckets outside the
/// window have zero mass. The overflow bucket carries the mass-weighted
/// average of the (estimated) totals that reached B.
class NodeBuckets {
 public:
  NodeBuckets() = default;
  NodeBuckets(std::int64_t k, double barrier);

  std::int64_t k() const noexcept { return k_; }
  double barrier() const noexcept { return barrier_; }

  double core_value(std::int64_t j) const noexcept {
    return static_cast<double>(j) * barrier_ / static_cast<double>(k_);
  }

  /// Core index whose range contains v, for 0 <= v < B. The result always
  /// satisfies core_value(j) <= v, so representatives never overshoot.
  std::int64_t core_index(double v) const noexcept;

  double core_mass(std::int64_t j) const noexcept {
    const std::int64_t off = j - first_;
    return off >= 0 && off < static_cast<std::int64_t>(mass_.size()) ? mass_[off] : 0.0;
  }

  std::int64_t window_begin() const noexcept { return first_; }
  std::int64_t window_end() const noexcept { return first_ + static_cast<std::int64_t>(mass_.size()); }
  std::span<const double> window() const noexcept { return mass_; }

  const Bucket& overflow() const noexcept { return overflow_; }

  /// Grows the stored window to cover [lo, hi] (clamped to [0, k)).
  void reserve_range(std::int64_t lo, std::int64_t hi);

  void add_core(std::int64_t j, double mass);

  /// Adds mass at total v: core bucket when v < B, overflow otherwise.
  void add(double v, double mass);

  /// Weighted-average update value += M / (mass + M) * (v - value).
  void add_overflow(double v, double mass) noexcept;

  /// Replaces the core window wholesale; `masses` covers [first, first + size).
  void assign_window(std::int64_t first, std::vector<double> masses);

  double core_total() const noexcept;
  double total_mass() const noexcept { return core_total() + overflow_.mass; }
  bool empty() const noexcept;

  /// Drops zero-mass entries at both ends of the window.
  void trim();

 private:
  std::int64_t k_ = 1;
  double barrier_ = 0.0;
  std::int64_t first_ = 0;
  std::vector<double> mass_;
  Bucket overflow_;
};

/// Combines h = fine.k() / coarse_k consecutive buckets into one. The coarse
/// representative is the group's left endpoint, costing one bucket width.
NodeBuckets regroup(const NodeBuckets& fine, std::int64_t coarse_k);

/// Throws BucketShapeMismatch unless both share k and B.
void check_same_shape(const NodeBuckets& a, const NodeBuckets& b);

/// Sum of all masses over a set of nodes.
double total_mass(std::span<const NodeBuckets> nodes);

}  // namespace asian
