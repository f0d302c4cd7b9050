#include <doctest.h>

#include <algorithm>
#include <random>

#include "athena/errors.hpp"
#include "athena/signals.hpp"
#include "oracles/pchip_oracle.hpp"

using namespace athena;

TEST_SUITE("signals") {

TEST_CASE("time grid") {
  const TimeGrid g(10.0, 0.5);
  CHECK(g.size() == 21);
  CHECK(g.time(0) == 0.0);
  CHECK(g.time(20) == 10.0);
  CHECK(g.time(3) == doctest::Approx(1.5));
  CHECK(TimeGrid(50.0, 0.01).size() == 5001);
  CHECK_THROWS_AS(TimeGrid(10.0, 0.3), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid(0.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid(1.0, -0.1), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid(1.0, 2.0), InvalidArgument);
}

TEST_CASE("signal rejects bad values") {
  const TimeGrid g(1.0, 0.5);
  CHECK_THROWS_AS(Signal(g, {1, 2}), InvalidArgument);
  CHECK_THROWS_AS(Signal(g, {1, NAN, 2}), InvalidArgument);
  CHECK(Signal::constant(g, 3.0).values()[2] == 3.0);
}

TEST_CASE("uniform control times") {
  const auto t = uniform_control_times(TimeGrid(100, 1), 5);
  CHECK(t == std::vector<double>{0, 25, 50, 75, 100});
  const auto t7 = uniform_control_times(TimeGrid(50, 0.01), 7);
  REQUIRE(t7.size() == 7);
  CHECK(t7.front() == 0.0);
  CHECK(t7.back() == 50.0);
  for (std::size_t k = 1; k < 7; ++k) CHECK(t7[k] - t7[k - 1] == doctest::Approx(50.0 / 6).epsilon(1e-12));
  CHECK(uniform_control_times(TimeGrid(40, 1), 1) == std::vector<double>{0});
  CHECK_THROWS_AS(uniform_control_times(TimeGrid(40, 1), 0), InvalidArgument);
}

TEST_CASE("control points validation") {
  CHECK_THROWS_AS(ControlPoints({1, 2}, {0, 0}), InvalidArgument);
  CHECK_THROWS_AS(ControlPoints({0, 2, 2}, {0, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(ControlPoints({0, 1}, {0}), InvalidArgument);
  CHECK_THROWS_AS(ControlPoints({0, 1}, {0, INFINITY}), InvalidArgument);
}

TEST_CASE("interpolation examples") {
  const TimeGrid g(10, 1);
  const auto c = interpolate(ControlPoints({0}, {5.0}), Interpolation::Constant, g);
  CHECK(std::all_of(c.values().begin(), c.values().end(), [](double v) { return v == 5.0; }));

  const auto lin = interpolate(ControlPoints({0, 10}, {0, 10}), Interpolation::Linear, g);
  for (std::size_t i = 0; i <= 10; ++i) CHECK(lin[i] == doctest::Approx(double(i)).epsilon(1e-15));

  const TimeGrid fine(10, 0.5);
  const std::vector<double> t{0, 5, 10}, v{0, 1, 0};
  const auto p = interpolate(ControlPoints(t, v), Interpolation::Pchip, fine);
  CHECK(std::abs(p[5] - oracle::pchip_eval(t, v, 2.5)) <= 1e-12);
  CHECK(std::abs(p[15] - oracle::pchip_eval(t, v, 7.5)) <= 1e-12);
  CHECK(p[10] == 1.0);
}

TEST_CASE("pchip two points is linear") {
  const auto p = interpolate(ControlPoints({0, 4}, {1, 3}), Interpolation::Pchip, TimeGrid(4, 1));
  CHECK(p[1] == doctest::Approx(1.5));
  CHECK(p[2] == doctest::Approx(2.0));
}

TEST_CASE("arity violations") {
  const TimeGrid g(10, 1);
  CHECK_THROWS_AS(interpolate(ControlPoints({0}, {1}), Interpolation::Pchip, g), InvalidArgument);
  CHECK_THROWS_AS(interpolate(ControlPoints({0}, {1}), Interpolation::Linear, g), InvalidArgument);
  CHECK_THROWS_AS(interpolate(ControlPoints({0, 10}, {1, 2}), Interpolation::Constant, g),
                  InvalidArgument);
  CHECK_NOTHROW(interpolate(ControlPoints({0}, {1}), Interpolation::PiecewiseConstant, g));
  // control times must reach the end of the grid
  CHECK_THROWS_AS(interpolate(ControlPoints({0, 5}, {1, 2}), Interpolation::Linear, g),
                  InvalidArgument);
}

TEST_CASE("piecewise constant holds the left value") {
  const TimeGrid g(10, 0.5);
  const auto s = interpolate(ControlPoints({0, 4, 10}, {1, 2, 3}), Interpolation::PiecewiseConstant, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.time(i);
    CHECK(s[i] == (t < 4 ? 1 : (t < 10 ? 2 : 3)));
  }
}

TEST_CASE("interpolation parse names") {
  CHECK(parse_interpolation("pchip") == Interpolation::Pchip);
  CHECK(parse_interpolation("pconst") == Interpolation::PiecewiseConstant);
  CHECK(to_string(Interpolation::Constant) == "const");
  CHECK_THROWS_AS(parse_interpolation("spline"), InvalidArgument);
}

TEST_CASE("pchip against oracle, random") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-10, 10);
  std::uniform_int_distribution<int> count(2, 9);
  for (int trial = 0; trial < 100; ++trial) {
    const TimeGrid g(40, 0.05);
    const int n = count(rng);
    const auto t = uniform_control_times(g, n);
    std::vector<double> v(n);
    for (auto& x : v) x = val(rng);
    const auto s = interpolate(ControlPoints(t, v), Interpolation::Pchip, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      REQUIRE(std::abs(s[i] - oracle::pchip_eval(t, v, g.time(i))) <= 1e-12);
    }
  }
}

TEST_CASE("exactness at control times and pchip boundedness") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(0, 1);
  const TimeGrid g(60, 0.1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = uniform_control_times(g, 7);  // every 10 s, on the grid
    std::vector<double> v(7);
    for (auto& x : v) x = val(rng);
    for (auto kind : {Interpolation::Pchip, Interpolation::Linear, Interpolation::PiecewiseConstant}) {
      const auto s = interpolate(ControlPoints(t, v), kind, g);
      for (int j = 0; j < 7; ++j) CHECK(s[static_cast<std::size_t>(j * 100)] == v[j]);
    }
    std::sort(v.begin(), v.end());
    const auto s = interpolate(ControlPoints(t, v), Interpolation::Pchip, g);
    for (double x : s.values()) {
      CHECK(x >= v.front());
      CHECK(x <= v.back());
    }
  }
}

TEST_CASE("window statistics") {
  const TimeGrid g(10, 1);
  const Signal five = Signal::constant(g, 5.0);
  CHECK(window_stat(five, Stat::Mean, {0, 10}) == 5.0);
  std::vector<double> ramp(11);
  for (int i = 0; i <= 10; ++i) ramp[i] = i;
  const Signal r(g, ramp);
  CHECK(window_stat(r, Stat::Min, {3, 7}) == 3.0);
  CHECK(window_stat(r, Stat::Max, {3, 7}) == 7.0);
  CHECK(window_stat(r, Stat::PeakToPeak, {2, 8}) == 6.0);
  CHECK(window_stat(r, Stat::Mean, {2, 4}) == 3.0);
  CHECK_THROWS_AS(window_stat(r, Stat::Min, {2.2, 2.8}), InvalidArgument);
  CHECK_THROWS_AS(window_stat(r, Stat::Min, {5, 3}), InvalidArgument);
  CHECK_THROWS_AS(window_stat(r, Stat::Min, {0, 11}), InvalidArgument);
}

TEST_CASE("mean of a constant is that constant for any window") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-1e3, 1e3);
  const TimeGrid g(20, 0.1);
  for (int trial = 0; trial < 200; ++trial) {
    const double c = val(rng);
    std::uniform_real_distribution<double> edge(0, 20);
    double a = edge(rng), b = edge(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 0.2) continue;
    CHECK(window_stat(Signal::constant(g, c), Stat::Mean, {a, b}) == c);
  }
}

TEST_CASE("steepest slope") {
  CHECK(steepest_slope(ControlPoints({0, 1, 2}, {0, 3, 3}), SlopeDirection::Positive, {0, 2}) == 3.0);
  CHECK(steepest_slope(ControlPoints({0, 1, 2}, {4, 1, 1}), SlopeDirection::Negative, {0, 2}) == 3.0);
  CHECK(steepest_slope(ControlPoints({0, 2}, {1, 1}), SlopeDirection::Positive, {0, 2}) == 0.0);
  CHECK_THROWS_AS(steepest_slope(ControlPoints({0, 2}, {1, 1}), SlopeDirection::Positive, {0, 1}),
                  InvalidArgument);
}

TEST_CASE("scale") {
  CHECK(scale(50, 0, 100) == 0.5);
  CHECK(scale(-10, 0, 100) == 0.0);
  CHECK(scale(325, 0, 325) == 1.0);
  CHECK_THROWS_AS(scale(1, 2, 2), InvalidArgument);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> val(-2, 3);
  for (int i = 0; i < 200; ++i) {
    const double a = val(rng), b = val(rng);
    CHECK((a <= b) <= (scale(a, -1, 2) <= scale(b, -1, 2)));
    const double once = scale(a, 0, 1);
    CHECK(scale(once, 0, 1) == once);
  }
}

}
