#pragma once

#include <span>

namespace athena::stats {

struct RankSumResult {
  /// Mann-Whitney U of each group; u_a + u_b == |A| * |B|.
  double u_a = 0.0;
  double u_b = 0.0;
  /// Two-sided.
  double p_value = 1.0;
  /// True when the p-value comes from the exact permutation distribution.
  bool exact = false;
};

/// Wilcoxon rank-sum test with midranks for ties. Exact when either group has
/// fewer than 8 values, otherwise the normal approximation with tie and
/// continuity correction. Throws InvalidArgument on an empty group or a
/// non-finite value.
RankSumResult rank_sum(std::span<const double> a, std::span<const double> b);

}  // namespace athena::stats
