#pragma once

// Naive recursive evaluation of the discrete robustness semantics. Every
// temporal operator scans the whole trace and keeps the samples whose time
// lies in [t + a, t + b]; no sliding windows, no sharing.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include "athena/stl.hpp"

namespace oracle {

inline double expr_at(const athena::stl::Expr& e, const athena::Trace& trace, std::size_t i) {
  double acc = 0.0;
  for (const auto& term : e.terms) {
    double f;
    if (const auto* name = std::get_if<std::string>(&term.factor)) {
      f = trace.channel(*name)[i];
    } else {
      f = std::abs(expr_at(*std::get<athena::stl::AbsFactor>(term.factor).inner, trace, i));
    }
    acc += term.coefficient * f;
  }
  return acc + e.constant;
}

inline double rho(const athena::stl::Formula& f, const athena::Trace& trace, std::size_t i) {
  namespace s = athena::stl;
  const auto& node = f.node().value;
  const double step = trace.grid().step();
  const std::size_t n = trace.grid().size();
  if (const auto* p = std::get_if<s::Predicate>(&node)) {
    const double v = expr_at(p->expr, trace, i);
    const bool upper = p->comparator == s::Comparator::Less || p->comparator == s::Comparator::LessEqual;
    return upper ? p->bound - v : v - p->bound;
  }
  if (const auto* x = std::get_if<s::Not>(&node)) return -rho(x->operand, trace, i);
  if (const auto* x = std::get_if<s::And>(&node)) {
    return std::min(rho(x->lhs, trace, i), rho(x->rhs, trace, i));
  }
  if (const auto* x = std::get_if<s::Or>(&node)) {
    return std::max(rho(x->lhs, trace, i), rho(x->rhs, trace, i));
  }
  if (const auto* x = std::get_if<s::Implies>(&node)) {
    return std::max(-rho(x->lhs, trace, i), rho(x->rhs, trace, i));
  }
  const bool is_g = std::holds_alternative<s::Globally>(node);
  const s::Interval iv = is_g ? std::get<s::Globally>(node).interval
                              : std::get<s::Eventually>(node).interval;
  const s::Formula& g = is_g ? std::get<s::Globally>(node).operand
                             : std::get<s::Eventually>(node).operand;
  const double t = static_cast<double>(i) * step;
  double best = is_g ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t j = 0; j < n; ++j) {
    const double u = static_cast<double>(j) * step;
    if (u < t + iv.lower - 1e-9 || u > t + iv.upper + 1e-9) continue;
    any = true;
    const double r = rho(g, trace, j);
    best = is_g ? std::min(best, r) : std::max(best, r);
  }
  if (!any) throw std::runtime_error("oracle: empty window");
  return best;
}

inline double robustness(const athena::stl::Formula& f, const athena::Trace& trace) {
  return rho(f, trace, 0);
}

}  // namespace oracle
