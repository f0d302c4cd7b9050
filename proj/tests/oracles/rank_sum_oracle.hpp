#pragma once

// Exact two-sided rank-sum p-value by listing every way of choosing which
// |A| of the pooled observations form group A.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct RankSum {
  double u_a;
  double p;
};

inline std::vector<double> midranks(const std::vector<double>& pooled) {
  std::vector<double> r(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : pooled) {
      less += x < pooled[i];
      equal += x == pooled[i];
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

inline RankSum rank_sum_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto r = midranks(pooled);
  const std::size_t m = a.size(), n = pooled.size();
  double ra = 0;
  for (std::size_t i = 0; i < m; ++i) ra += r[i];
  const double centre = m * (n + 1) / 2.0;
  const double observed = std::fabs(ra - centre);
  std::size_t hits = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) continue;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s += r[i];
    }
    ++total;
    if (std::fabs(s - centre) >= observed - 1e-9) ++hits;
  }
  return {ra - m * (m + 1) / 2.0, static_cast<double>(hits) / static_cast<double>(total)};
}

}  // namespace oracle
