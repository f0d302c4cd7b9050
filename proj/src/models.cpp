#include "athena/models.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "athena/errors.hpp"

namespace athena::models {

SimResult simulate(const PlantModel& model, const std::map<std::string, Signal>& inputs,
                   const TimeGrid& grid) {
  const PortSpec& ports = model.ports();
  if (inputs.size() != ports.inputs.size()) {
    throw PortMismatch(fmt::format("{} expects {} inputs, got {}", model.name(),
                                   ports.inputs.size(), inputs.size()));
  }
  std::vector<std::span<const double>> u;
  for (const std::string& name : ports.inputs) {
    const auto it = inputs.find(name);
    if (it == inputs.end()) {
      throw PortMismatch(fmt::format("{} has no input named '{}'", model.name(), name));
    }
    if (!(it->second.grid() == grid)) {
      throw PortMismatch(fmt::format("input '{}' is not sampled on the simulation grid", name));
    }
    u.push_back(it->second.values());
  }

  const std::size_t n_in = ports.inputs.size();
  const std::size_t n_out = ports.outputs.size();
  const std::size_t samples = grid.size();
  const double h = grid.step();

  std::vector<double> x = model.initial_state();
  const std::size_t dim = x.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  std::vector<double> u_now(n_in), u_mid(n_in), u_next(n_in), y(n_out);
  std::vector<std::vector<double>> out(n_out, std::vector<double>(samples));

  auto axpy = [&](const std::vector<double>& k, double a) {
    for (std::size_t j = 0; j < dim; ++j) tmp[j] = x[j] + a * k[j];
  };
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
  };

  for (std::size_t i = 0; i < samples; ++i) {
    const double t = grid.time(i);
    for (std::size_t p = 0; p < n_in; ++p) u_now[p] = u[p][i];
    model.output(t, x, u_now, y);
    if (!finite(y)) throw NumericalDivergence(t);
    for (std::size_t o = 0; o < n_out; ++o) out[o][i] = y[o];
    if (i + 1 == samples) break;

    for (std::size_t p = 0; p < n_in; ++p) {
      u_next[p] = u[p][i + 1];
      u_mid[p] = 0.5 * (u_now[p] + u_next[p]);
    }
    model.derivative(t, x, u_now, k1);
    axpy(k1, 0.5 * h);
    model.derivative(t + 0.5 * h, tmp, u_mid, k2);
    axpy(k2, 0.5 * h);
    model.derivative(t + 0.5 * h, tmp, u_mid, k3);
    axpy(k3, h);
    model.derivative(t + h, tmp, u_next, k4);
    for (std::size_t j = 0; j < dim; ++j) {
      x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    const double t_next = grid.time(i + 1);
    model.update_discrete(t_next, x, u_next);
    if (!finite(x)) throw NumericalDivergence(t_next);
  }

  SimResult result{Trace(grid)};
  for (std::size_t o = 0; o < n_out; ++o) result.trace.add(ports.outputs[o], std::move(out[o]));
  for (std::size_t p = 0; p < n_in; ++p) {
    result.trace.add(ports.inputs[p], std::vector<double>(u[p].begin(), u[p].end()));
  }
  return result;
}

namespace {

/// Output equals input; no state.
class Passthrough final : public PlantModel {
 public:
  std::string_view name() const override { return "passthrough"; }
  const PortSpec& ports() const override { return ports_; }
  std::vector<double> initial_state() const override { return {}; }
  double default_horizon() const override { return 10.0; }
  void derivative(double, std::span<const double>, std::span<const double>,
                  std::span<double>) const override {}
  void output(double, std::span<const double>, std::span<const double> inputs,
              std::span<double> outputs) const override {
    outputs[0] = inputs[0];
  }

 private:
  PortSpec ports_{{"x"}, {"y"}};
};

// Five cars in a line. y5 is driven by throttle/brake; car k (k = 1..4)
// tracks a 10 m gap behind car k+1 with a spring-damper law. State layout:
// positions y1..y5 then velocities v1..v5.
class ChasingCars final : public PlantModel {
 public:
  static constexpr double kGap = 10.0;
  static constexpr double kSpring = 0.08;
  static constexpr double kDamper = 0.4;

  std::string_view name() const override { return "chasing_cars"; }
  const PortSpec& ports() const override { return ports_; }
  std::vector<double> initial_state() const override {
    return {0.0, 10.0, 20.0, 30.0, 40.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  }
  double default_horizon() const override { return 100.0; }

  void derivative(double, std::span<const double> s, std::span<const double> u,
                  std::span<double> ds) const override {
    const auto y = s.subspan(0, 5);
    const auto v = s.subspan(5, 5);
    for (std::size_t k = 0; k < 5; ++k) ds[k] = v[k];
    ds[5 + 4] = 5.0 * u[0] - 6.0 * u[1] - 0.1 * v[4];
    for (std::size_t k = 0; k < 4; ++k) {
      ds[5 + k] = kSpring * ((y[k + 1] - y[k]) - kGap) - kDamper * v[k] + kDamper * v[k + 1];
    }
  }

  void output(double, std::span<const double> s, std::span<const double>,
              std::span<double> out) const override {
    std::copy_n(s.begin(), 5, out.begin());
  }

 private:
  PortSpec ports_{{"throttle", "brake"}, {"y1", "y2", "y3", "y4", "y5"}};
};

// Speed in mph with a four-gear shift schedule. State: {Speed, gear}; the gear
// is piecewise constant and only changes in update_discrete.
class AutoTransmissionLite final : public PlantModel {
 public:
  static constexpr std::array<double, 4> kGearRatio{4.0, 2.5, 1.6, 1.0};
  static constexpr std::array<double, 4> kTorqueRatio{25.0, 17.0, 12.0, 9.0};
  static constexpr std::array<double, 3> kUpshift{15.0, 30.0, 50.0};    // 1->2, 2->3, 3->4
  static constexpr std::array<double, 3> kDownshift{12.0, 25.0, 45.0};  // 2->1, 3->2, 4->3

  std::string_view name() const override { return "at_lite"; }
  const PortSpec& ports() const override { return ports_; }
  std::vector<double> initial_state() const override { return {0.0, 1.0}; }
  double default_horizon() const override { return 50.0; }

  void derivative(double, std::span<const double> s, std::span<const double> u,
                  std::span<double> ds) const override {
    const double throttle = u[0] / 100.0;
    const double brake = u[1] / 325.0;
    ds[0] = 0.9 * throttle * kTorqueRatio[gear_index(s)] - 0.35 * brake * 3.25 - 0.02 * s[0];
    ds[1] = 0.0;
  }

  void output(double, std::span<const double> s, std::span<const double> u,
              std::span<double> out) const override {
    out[0] = s[0];
    out[1] = s[0] * kGearRatio[gear_index(s)] * 40.0 + 600.0 * (u[0] / 100.0);
    out[2] = s[1];
  }

  // Speed is clamped at 0 (no reversing); at most one shift per step.
  void update_discrete(double, std::span<double> s, std::span<const double>) const override {
    s[0] = std::max(s[0], 0.0);
    const std::size_t g = gear_index(s);
    if (g < 3 && s[0] >= kUpshift[g]) {
      s[1] += 1.0;
    } else if (g > 0 && s[0] < kDownshift[g - 1]) {
      s[1] -= 1.0;
    }
  }

 private:
  static std::size_t gear_index(std::span<const double> s) {
    return static_cast<std::size_t>(std::clamp(s[1], 1.0, 4.0)) - 1;
  }

  PortSpec ports_{{"Throttle", "Brake"}, {"Speed", "RPM", "Gear"}};
};

}  // namespace

std::shared_ptr<const PlantModel> builtin(std::string_view name) {
  if (name == "chasing_cars") return std::make_shared<const ChasingCars>();
  if (name == "at_lite") return std::make_shared<const AutoTransmissionLite>();
  if (name == "passthrough") return std::make_shared<const Passthrough>();
  throw NotFound(fmt::format("unknown plant '{}'", name));
}

std::vector<std::string> builtin_names() { return {"at_lite", "chasing_cars", "passthrough"}; }

}  // namespace athena::models
