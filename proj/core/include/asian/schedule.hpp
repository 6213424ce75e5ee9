#pragma once

#include <cstdint>
#include <vector>

namespace asian {

/// One recursion level: subproblems of `depth` periods bucketed with
/// `buckets` core buckets.
struct ScheduleLevel {
  int depth = 1;
  std::int64_t buckets = 1;
};

/// levels[0] is the contract itself (n0, k0); depths strictly decrease.
struct RecursionSchedule {
  std::vector<ScheduleLevel> levels;
  int R = 3;
  double gamma = 1.0 / 3.0;

  /// True when no recursion happens and the pricer is plain BTT.
  bool degenerate() const { return levels.size() < 2; }
};

}  // namespace asian
