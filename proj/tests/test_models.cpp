#include <doctest.h>

#include <cmath>
#include <random>

#include "athena/errors.hpp"
#include "athena/models.hpp"
#include "oracles/cars_reference.hpp"

using namespace athena;
using namespace athena::models;

namespace {

// x' = x * u: blows up for large u.
class Exploding final : public PlantModel {
 public:
  std::string_view name() const override { return "exploding"; }
  const PortSpec& ports() const override { return ports_; }
  std::vector<double> initial_state() const override { return {1.0}; }
  double default_horizon() const override { return 10; }
  void derivative(double, std::span<const double> s, std::span<const double> u,
                  std::span<double> ds) const override {
    ds[0] = s[0] * s[0] * u[0];
  }
  void output(double, std::span<const double> s, std::span<const double>,
              std::span<double> y) const override {
    y[0] = s[0];
  }

 private:
  PortSpec ports_{{"u"}, {"x"}};
};

std::map<std::string, Signal> cc_inputs(const TimeGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(0, 1);
  const auto t7 = uniform_control_times(g, 7);
  const auto t3 = uniform_control_times(g, 3);
  std::vector<double> thr(7), brk(3);
  for (auto& v : thr) v = val(rng);
  for (auto& v : brk) v = val(rng);
  return {{"throttle", interpolate(ControlPoints(t7, thr), Interpolation::Pchip, g)},
          {"brake", interpolate(ControlPoints(t3, brk), Interpolation::Pchip, g)}};
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("builtin catalogue") {
  const auto cc = builtin("chasing_cars");
  CHECK(cc->ports().inputs == std::vector<std::string>{"throttle", "brake"});
  CHECK(cc->ports().outputs == std::vector<std::string>{"y1", "y2", "y3", "y4", "y5"});
  CHECK(cc->default_horizon() == 100.0);
  const auto at = builtin("at_lite");
  CHECK(at->ports().inputs == std::vector<std::string>{"Throttle", "Brake"});
  CHECK(at->ports().outputs == std::vector<std::string>{"Speed", "RPM", "Gear"});
  CHECK(at->default_horizon() == 50.0);
  CHECK(builtin("passthrough")->ports().outputs.size() == 1);
  CHECK_THROWS_AS(builtin("f16"), NotFound);
}

TEST_CASE("passthrough is the identity") {
  const TimeGrid g(10, 0.01);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.3 * double(i));
  const auto r = simulate(*builtin("passthrough"), {{"x", Signal(g, v)}}, g);
  const auto y = r.trace.channel("y");
  CHECK(std::equal(y.begin(), y.end(), v.begin()));
  CHECK(r.trace.names() == std::vector<std::string>{"y", "x"});
}

TEST_CASE("chasing cars matches the stand-alone integrator") {
  const TimeGrid g(100, 0.01);
  const auto in = cc_inputs(g, 17);
  const auto r = simulate(*builtin("chasing_cars"), in, g);
  const auto thr = in.at("throttle").values();
  const auto brk = in.at("brake").values();
  const auto ref = oracle::simulate_cars({thr.begin(), thr.end()}, {brk.begin(), brk.end()}, 0.01);
  double worst = 0;
  for (int k = 0; k < 5; ++k) {
    const auto y = r.trace.channel("y" + std::to_string(k + 1));
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(y[i] - ref[i][k]));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("chasing cars: zero input stays finite, gaps at rest") {
  const TimeGrid g(100, 0.01);
  const auto r = simulate(*builtin("chasing_cars"),
                          {{"throttle", Signal::constant(g, 0)}, {"brake", Signal::constant(g, 0)}}, g);
  for (int k = 1; k < 5; ++k) {
    const auto lead = r.trace.channel("y" + std::to_string(k + 1));
    const auto follow = r.trace.channel("y" + std::to_string(k));
    for (std::size_t i = 0; i < g.size(); ++i) {
      REQUIRE(std::isfinite(lead[i] - follow[i]));
      CHECK(lead[i] - follow[i] == doctest::Approx(10.0));
    }
  }
}

TEST_CASE("determinism and halving dt") {
  const TimeGrid g(100, 0.01), fine(100, 0.005);
  const auto in = cc_inputs(g, 3);
  const auto a = simulate(*builtin("chasing_cars"), in, g);
  const auto b = simulate(*builtin("chasing_cars"), in, g);
  CHECK(a.trace == b.trace);
  CHECK(a.trace.grid() == g);
  CHECK(a.trace.channel_count() == 7);

  // inputs sampled from the same control points on the finer grid
  std::map<std::string, Signal> in_fine;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(0, 1);
  std::vector<double> thr(7), brk(3);
  for (auto& v : thr) v = val(rng);
  for (auto& v : brk) v = val(rng);
  in_fine.emplace("throttle", interpolate(ControlPoints(uniform_control_times(fine, 7), thr),
                                          Interpolation::Pchip, fine));
  in_fine.emplace("brake", interpolate(ControlPoints(uniform_control_times(fine, 3), brk),
                                       Interpolation::Pchip, fine));
  const auto c = simulate(*builtin("chasing_cars"), in_fine, fine);
  double worst = 0;
  for (const auto& ch : {"y1", "y2", "y3", "y4", "y5"}) {
    const auto coarse = a.trace.channel(ch);
    const auto f = c.trace.channel(ch);
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(coarse[i] - f[2 * i]));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("at_lite behaviour") {
  const TimeGrid g(50, 0.01);
  const auto full = simulate(*builtin("at_lite"), {{"Throttle", Signal::constant(g, 100)},
                                                   {"Brake", Signal::constant(g, 0)}}, g);
  const auto speed = full.trace.channel("Speed");
  const auto gear = full.trace.channel("Gear");
  CHECK(speed[0] == 0.0);
  CHECK(full.trace.channel("RPM")[0] == 600.0);
  CHECK(speed[g.size() - 1] > 120.0);
  CHECK(gear[g.size() - 1] == 4.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(speed[i] >= speed[i - 1]);
    CHECK(std::abs(gear[i] - gear[i - 1]) <= 1.0);
  }
  const auto braking = simulate(*builtin("at_lite"), {{"Throttle", Signal::constant(g, 0)},
                                                      {"Brake", Signal::constant(g, 325)}}, g);
  for (double s : braking.trace.channel("Speed")) CHECK(s == 0.0);
}

TEST_CASE("port mismatch") {
  const TimeGrid g(10, 0.1);
  const auto cc = builtin("chasing_cars");
  CHECK_THROWS_AS(simulate(*cc, {{"throttle", Signal::constant(g, 0)}}, g), PortMismatch);
  CHECK_THROWS_AS(simulate(*cc, {{"throttle", Signal::constant(g, 0)},
                                 {"brakes", Signal::constant(g, 0)}}, g), PortMismatch);
  const TimeGrid other(10, 0.05);
  CHECK_THROWS_AS(simulate(*cc, {{"throttle", Signal::constant(other, 0)},
                                 {"brake", Signal::constant(other, 0)}}, g), PortMismatch);
}

TEST_CASE("numerical divergence names the time") {
  const TimeGrid g(10, 0.1);
  Exploding plant;
  try {
    simulate(plant, {{"u", Signal::constant(g, 1.0)}}, g);
    FAIL("expected divergence");
  } catch (const NumericalDivergence& e) {
    // x(t) = 1 / (1 - t) blows up at t = 1
    CHECK(e.time() > 0.5);
    CHECK(e.time() <= 2.0);
  }
}

}
