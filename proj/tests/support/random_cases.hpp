#pragma once

#include <random>
#include <string>
#include <vector>

#include "athena/stl.hpp"
#include "athena/trace.hpp"

namespace testgen {

inline const std::vector<std::string> kChannels{"a", "b", "c"};

/// Three channels on [0, (n-1)*step]. About a third of the traces are
/// integer-valued so ties and zero robustness show up.
inline athena::Trace random_trace(std::mt19937_64& rng, std::size_t n, double step) {
  athena::Trace tr(athena::TimeGrid(step * static_cast<double>(n - 1), step));
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  const bool integral = std::uniform_int_distribution<int>(0, 2)(rng) == 0;
  for (const auto& ch : kChannels) {
    std::vector<double> v(n);
    for (auto& x : v) x = integral ? std::round(val(rng)) : val(rng);
    tr.add(ch, std::move(v));
  }
  return tr;
}

inline athena::stl::Expr random_expr(std::mt19937_64& rng, int depth = 0) {
  using athena::stl::Expr;
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<std::size_t> ch(0, kChannels.size() - 1);
  const double coefs[] = {1.0, -1.0, 2.0, 0.5, -0.25};
  Expr e = Expr::channel(kChannels[ch(rng)], coefs[pick(rng) % 5]);
  const int extra = pick(rng);
  if (extra < 3) {
    e.terms.push_back(Expr::channel(kChannels[ch(rng)], coefs[pick(rng) % 5]).terms[0]);
  } else if (extra < 5 && depth == 0) {
    Expr inner = random_expr(rng, depth + 1);
    Expr wrapped = Expr::abs(std::move(inner));
    wrapped.terms[0].coefficient = coefs[pick(rng) % 5];
    e.terms.push_back(wrapped.terms[0]);
  }
  if (pick(rng) < 3) e.constant = std::round(std::uniform_real_distribution<double>(-3, 3)(rng));
  return e;
}

/// Formula whose total look-ahead stays within `budget` samples.
inline athena::stl::Formula random_formula(std::mt19937_64& rng, int depth, std::size_t budget,
                                           double step) {
  namespace s = athena::stl;
  std::uniform_int_distribution<int> kind(0, depth <= 0 ? 0 : 7);
  const int k = kind(rng);
  if (k == 0) {
    std::uniform_int_distribution<int> cmp(0, 3);
    const bool integral = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
    double bound = std::uniform_real_distribution<double>(-4, 4)(rng);
    if (integral) bound = std::round(bound);
    return s::predicate(random_expr(rng), static_cast<s::Comparator>(cmp(rng)), bound);
  }
  if (k == 1) return s::negation(random_formula(rng, depth - 1, budget, step));
  if (k <= 4) {
    auto lhs = random_formula(rng, depth - 1, budget, step);
    auto rhs = random_formula(rng, depth - 1, budget, step);
    if (k == 2) return s::conjunction(lhs, rhs);
    if (k == 3) return s::disjunction(lhs, rhs);
    return s::implication(lhs, rhs);
  }
  // temporal: choose sample offsets lo <= hi <= budget, then blur the bounds
  // off the grid so the ceil/floor selection is exercised
  std::uniform_int_distribution<std::size_t> off(0, std::min<std::size_t>(budget, 40));
  std::size_t lo = off(rng), hi = off(rng);
  if (lo > hi) std::swap(lo, hi);
  std::uniform_real_distribution<double> blur(0.05, 0.45);
  const bool aligned = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
  double a = static_cast<double>(lo) * step;
  double b = static_cast<double>(hi) * step;
  if (!aligned) {
    if (lo > 0) a -= blur(rng) * step;
    b += blur(rng) * step;
  }
  auto operand = random_formula(rng, depth - 1, budget - hi, step);
  return k % 2 ? s::globally({a, b}, operand) : s::eventually({a, b}, operand);
}

}  // namespace testgen
