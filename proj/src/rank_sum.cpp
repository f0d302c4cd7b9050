#include "athena/rank_sum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "athena/errors.hpp"

namespace athena::stats {

namespace {

constexpr std::size_t kExactBelow = 8;

/// Twice the midrank of every pooled value, so ties stay integral.
std::vector<long> doubled_ranks(const std::vector<double>& pooled, double& tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<long> ranks(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // ranks i+1 .. j+1 share the midrank (i + j + 2) / 2
    const long twice = static_cast<long>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = twice;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

/// P(|S - centre| >= |observed - centre|) where S is the doubled rank sum of
/// a uniformly random m-subset of `ranks` and `observed` is a doubled sum.
double exact_p(const std::vector<long>& ranks, std::size_t m, long observed) {
  const long total = std::accumulate(ranks.begin(), ranks.end(), 0L);
  // count[k][s]: number of k-subsets of the ranks seen so far with sum s
  std::vector<std::vector<long double>> count(m + 1,
                                              std::vector<long double>(total + 1, 0.0L));
  count[0][0] = 1.0L;
  for (const long r : ranks) {
    for (std::size_t k = m; k >= 1; --k) {
      auto& dst = count[k];
      const auto& src = count[k - 1];
      for (long s = total; s >= r; --s) dst[s] += src[s - r];
    }
  }
  const long n_total = static_cast<long>(ranks.size());
  const long centre = static_cast<long>(m) * (n_total + 1);
  const long dev = std::labs(observed - centre);
  long double hit = 0.0L;
  long double all = 0.0L;
  for (long s = 0; s <= total; ++s) {
    const long double c = count[m][s];
    if (c == 0.0L) continue;
    all += c;
    if (std::labs(s - centre) >= dev) hit += c;
  }
  return std::min(1.0, static_cast<double>(hit / all));
}

}  // namespace

RankSumResult rank_sum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("rank_sum needs two non-empty groups");
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(a.begin(), a.end(), finite) || !std::all_of(b.begin(), b.end(), finite)) {
    throw InvalidArgument("rank_sum values must be finite");
  }
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const auto ranks = doubled_ranks(pooled, tie_term);

  long twice_ra = 0;
  for (std::size_t i = 0; i < m; ++i) twice_ra += ranks[i];
  long twice_rb = 0;
  for (std::size_t i = m; i < m + n; ++i) twice_rb += ranks[i];

  const double dm = static_cast<double>(m);
  const double dn = static_cast<double>(n);
  RankSumResult r;
  r.u_a = 0.5 * static_cast<double>(twice_ra) - dm * (dm + 1.0) / 2.0;
  r.u_b = 0.5 * static_cast<double>(twice_rb) - dn * (dn + 1.0) / 2.0;

  if (m < kExactBelow || n < kExactBelow) {
    r.exact = true;
    // Enumerate subsets of the smaller group; the statistic is symmetric.
    if (n < m) {
      std::vector<long> swapped(ranks.begin() + static_cast<std::ptrdiff_t>(m), ranks.end());
      swapped.insert(swapped.end(), ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(m));
      r.p_value = exact_p(swapped, n, twice_rb);
    } else {
      r.p_value = exact_p(ranks, m, twice_ra);
    }
    return r;
  }

  const double N = dm + dn;
  const double mu = dm * dn / 2.0;
  const double var = dm * dn / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = std::max(0.0, std::abs(r.u_a - mu) - 0.5) / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

}  // namespace athena::stats
