#include "athena/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "athena/errors.hpp"

namespace athena {

namespace {

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// Shape-preserving derivative estimates at each knot (pchip rule: weighted
// harmonic mean of neighbouring secants in the interior, one-sided
// three-point formula with monotonicity clamping at the ends).
std::vector<double> pchip_slopes(std::span<const double> t, std::span<const double> v) {
  const std::size_t n = t.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = t[k + 1] - t[k];
    delta[k] = (v[k + 1] - v[k]) / h[k];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] > 0.0) {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  auto end_slope = [](double h0, double h1, double del0, double del1) {
    double s = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (sign(s) != sign(del0)) {
      s = 0.0;
    } else if (sign(del0) != sign(del1) && std::abs(s) > std::abs(3.0 * del0)) {
      s = 3.0 * del0;
    }
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

// Index range [first, last] of grid samples inside the closed window.
std::pair<std::size_t, std::size_t> window_indices(const TimeGrid& grid, Window w) {
  if (!(w.begin >= -kTimeTolerance && w.begin < w.end && w.end <= grid.end() + kTimeTolerance)) {
    throw InvalidArgument("window [" + std::to_string(w.begin) + "," + std::to_string(w.end) +
                          "] is not inside [0," + std::to_string(grid.end()) + "]");
  }
  const double first = std::ceil((w.begin - kTimeTolerance) / grid.step());
  const double last = std::floor((w.end + kTimeTolerance) / grid.step());
  const auto lo = static_cast<std::size_t>(std::max(first, 0.0));
  const auto hi = static_cast<std::size_t>(std::min(last, static_cast<double>(grid.size() - 1)));
  if (lo > hi) throw InvalidArgument("window contains no samples");
  return {lo, hi};
}

}  // namespace

TimeGrid::TimeGrid(double end, double step) : end_(end), step_(step), size_(0) {
  if (!(std::isfinite(end) && end > 0.0)) throw InvalidArgument("grid end must be positive");
  if (!(std::isfinite(step) && step > 0.0)) throw InvalidArgument("grid step must be positive");
  const double ratio = end / step;
  const double whole = std::round(ratio);
  if (std::abs(ratio - whole) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("grid end " + std::to_string(end) + " is not a multiple of step " +
                          std::to_string(step));
  }
  if (whole < 1.0) throw InvalidArgument("grid needs at least two samples");
  size_ = static_cast<std::size_t>(whole) + 1;
}

Signal::Signal(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("signal has " + std::to_string(values_.size()) + " values for " +
                          std::to_string(grid_.size()) + " grid samples");
  }
  if (!all_finite(values_)) throw InvalidArgument("signal values must be finite");
}

Signal Signal::constant(const TimeGrid& grid, double value) {
  return Signal(grid, std::vector<double>(grid.size(), value));
}

ControlPoints::ControlPoints(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty()) throw InvalidArgument("control points must not be empty");
  if (times_.size() != values_.size()) {
    throw InvalidArgument("control times and values differ in length");
  }
  if (times_.front() != 0.0) throw InvalidArgument("first control time must be 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw InvalidArgument("control times must be strictly increasing");
    }
  }
  if (!all_finite(times_) || !all_finite(values_)) {
    throw InvalidArgument("control points must be finite");
  }
}

std::string_view to_string(Interpolation kind) {
  switch (kind) {
    case Interpolation::Pchip: return "pchip";
    case Interpolation::Linear: return "linear";
    case Interpolation::PiecewiseConstant: return "pconst";
    case Interpolation::Constant: return "const";
  }
  return "?";
}

Interpolation parse_interpolation(std::string_view name) {
  if (name == "pchip") return Interpolation::Pchip;
  if (name == "linear") return Interpolation::Linear;
  if (name == "pconst") return Interpolation::PiecewiseConstant;
  if (name == "const") return Interpolation::Constant;
  throw InvalidArgument("unknown interpolation '" + std::string(name) + "'");
}

std::size_t min_control_points(Interpolation kind) {
  switch (kind) {
    case Interpolation::Pchip:
    case Interpolation::Linear: return 2;
    case Interpolation::PiecewiseConstant:
    case Interpolation::Constant: return 1;
  }
  return 1;
}

std::vector<double> uniform_control_times(const TimeGrid& grid, std::size_t n) {
  if (n == 0) throw InvalidArgument("control point count must be positive");
  if (n == 1) return {0.0};
  std::vector<double> times(n);
  for (std::size_t j = 0; j < n; ++j) {
    times[j] = grid.end() * static_cast<double>(j) / static_cast<double>(n - 1);
  }
  return times;
}

Signal interpolate(const ControlPoints& cp, Interpolation kind, const TimeGrid& grid) {
  const std::size_t n = cp.size();
  if (n < min_control_points(kind) || (kind == Interpolation::Constant && n != 1)) {
    throw InvalidArgument(std::string(to_string(kind)) + " interpolation cannot use " +
                          std::to_string(n) + " control points");
  }
  const auto t = cp.times();
  const auto v = cp.values();
  if (n > 1 && std::abs(t.back() - grid.end()) > kTimeTolerance) {
    throw InvalidArgument("last control time must equal the grid end");
  }

  std::vector<double> out(grid.size());
  if (kind == Interpolation::Constant) {
    std::fill(out.begin(), out.end(), v[0]);
    return Signal(grid, std::move(out));
  }

  std::vector<double> slopes;
  if (kind == Interpolation::Pchip) slopes = pchip_slopes(t, v);

  std::size_t seg = 0;  // t[seg] <= time < t[seg + 1], advanced monotonically
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double time = grid.time(i);
    while (seg + 1 < n && time >= t[seg + 1] - kTimeTolerance) ++seg;
    if (std::abs(time - t[seg]) <= kTimeTolerance || seg + 1 == n) {
      out[i] = v[seg];
      continue;
    }
    const double h = t[seg + 1] - t[seg];
    const double s = (time - t[seg]) / h;
    switch (kind) {
      case Interpolation::PiecewiseConstant: out[i] = v[seg]; break;
      case Interpolation::Linear: out[i] = v[seg] + s * (v[seg + 1] - v[seg]); break;
      case Interpolation::Pchip: {
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        out[i] = h00 * v[seg] + h10 * h * slopes[seg] + h01 * v[seg + 1] + h11 * h * slopes[seg + 1];
        break;
      }
      case Interpolation::Constant: break;
    }
  }
  return Signal(grid, std::move(out));
}

double window_stat(std::span<const double> values, const TimeGrid& grid, Stat stat, Window window) {
  if (values.size() != grid.size()) throw InvalidArgument("values do not match grid");
  const auto [lo, hi] = window_indices(grid, window);
  const auto first = values.begin() + static_cast<std::ptrdiff_t>(lo);
  const auto last = values.begin() + static_cast<std::ptrdiff_t>(hi) + 1;
  switch (stat) {
    case Stat::Min: return *std::min_element(first, last);
    case Stat::Max: return *std::max_element(first, last);
    case Stat::PeakToPeak: {
      const auto [mn, mx] = std::minmax_element(first, last);
      return *mx - *mn;
    }
    case Stat::Mean: {
      // Shifted accumulation: a constant window yields its value exactly.
      const double ref = *first;
      double acc = 0.0;
      for (auto it = first; it != last; ++it) acc += *it - ref;
      return ref + acc / static_cast<double>(last - first);
    }
  }
  return 0.0;
}

double window_stat(const Signal& signal, Stat stat, Window window) {
  return window_stat(signal.values(), signal.grid(), stat, window);
}

double steepest_slope(const ControlPoints& cp, SlopeDirection direction, Window window) {
  const auto t = cp.times();
  const auto v = cp.values();
  auto inside = [&](double x) {
    return x >= window.begin - kTimeTolerance && x <= window.end + kTimeTolerance;
  };
  std::size_t in_window = 0;
  double steepest = 0.0;
  for (std::size_t j = 0; j < cp.size(); ++j) {
    if (!inside(t[j])) continue;
    ++in_window;
    if (j + 1 == cp.size() || !inside(t[j + 1])) continue;
    const double slope = (v[j + 1] - v[j]) / (t[j + 1] - t[j]);
    steepest = std::max(steepest, direction == SlopeDirection::Positive ? slope : -slope);
  }
  if (in_window < 2) throw InvalidArgument("fewer than two control points in the slope window");
  return steepest;
}

double scale(double value, double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("scale range needs lo < hi");
  return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace athena
