#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace athena {

/// Absolute tolerance (seconds) used whenever a time instant is compared
/// against a grid sample or an interval bound.
inline constexpr double kTimeTolerance = 1e-9;

/// Uniform simulation time domain [0, end] sampled every `step` seconds.
class TimeGrid {
 public:
  TimeGrid(double end, double step);

  double start() const noexcept { return 0.0; }
  double end() const noexcept { return end_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return size_; }

  /// Time of sample i. The last sample is exactly end().
  double time(std::size_t i) const noexcept {
    return end_ * static_cast<double>(i) / static_cast<double>(size_ - 1);
  }

  bool operator==(const TimeGrid&) const = default;

 private:
  double end_;
  double step_;
  std::size_t size_;
};

/// A finite-valued signal sampled on a TimeGrid.
class Signal {
 public:
  Signal(TimeGrid grid, std::vector<double> values);

  static Signal constant(const TimeGrid& grid, double value);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  bool operator==(const Signal&) const = default;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

/// Control points (t_j, v_j) an input signal is interpolated from.
/// Times are strictly increasing and start at 0.
class ControlPoints {
 public:
  ControlPoints(std::vector<double> times, std::vector<double> values);

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return times_.size(); }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

enum class Interpolation { Pchip, Linear, PiecewiseConstant, Constant };

std::string_view to_string(Interpolation kind);

/// Accepts "pchip", "linear", "pconst" and "const".
Interpolation parse_interpolation(std::string_view name);

/// Smallest control-point count the kind accepts. Constant takes exactly one.
std::size_t min_control_points(Interpolation kind);

/// n evenly spaced instants from 0 to grid.end(); {0} when n == 1.
std::vector<double> uniform_control_times(const TimeGrid& grid, std::size_t n);

/// Samples the interpolant through `cp` at every grid instant. Control values
/// are reproduced exactly at grid samples that coincide with control times.
Signal interpolate(const ControlPoints& cp, Interpolation kind, const TimeGrid& grid);

enum class Stat { Min, Max, Mean, PeakToPeak };

/// Closed time window [begin, end] in seconds.
struct Window {
  double begin;
  double end;
};

/// Statistic over the samples whose time lies in the (inclusive) window.
double window_stat(std::span<const double> values, const TimeGrid& grid, Stat stat, Window window);
double window_stat(const Signal& signal, Stat stat, Window window);

enum class SlopeDirection { Positive, Negative };

/// Steepest slope between consecutive control points inside the window.
/// Negative reports the magnitude of the most negative slope; a direction with
/// no matching segment yields 0.
double steepest_slope(const ControlPoints& cp, SlopeDirection direction, Window window);

/// (value - lo) / (hi - lo) clamped to [0, 1].
double scale(double value, double lo, double hi);

}  // namespace athena
