#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "athena/signals.hpp"
#include "athena/trace.hpp"

namespace athena::models {

struct PortSpec {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

/// A plant maps input signals to outputs through continuous dynamics plus
/// optional discrete transitions that run between integration steps.
/// Implementations must be stateless: all mutable state lives in the state
/// vector handed to each call.
class PlantModel {
 public:
  virtual ~PlantModel() = default;

  virtual std::string_view name() const = 0;
  virtual const PortSpec& ports() const = 0;
  virtual std::vector<double> initial_state() const = 0;
  /// Simulation horizon in seconds used when none is given.
  virtual double default_horizon() const = 0;

  virtual void derivative(double t, std::span<const double> state, std::span<const double> inputs,
                          std::span<double> dstate) const = 0;
  virtual void output(double t, std::span<const double> state, std::span<const double> inputs,
                      std::span<double> outputs) const = 0;
  /// Mode switching applied once after every step; default is none.
  virtual void update_discrete(double /*t*/, std::span<double> /*state*/,
                               std::span<const double> /*inputs*/) const {}
};

struct SimResult {
  /// Output channels in port order, then input channels in port order.
  Trace trace;
};

/// Fixed-step RK4 over `grid`. Inputs at the half step are the mean of the
/// adjacent samples. Throws PortMismatch or NumericalDivergence.
SimResult simulate(const PlantModel& model, const std::map<std::string, Signal>& inputs,
                   const TimeGrid& grid);

/// "chasing_cars", "at_lite" or "passthrough"; throws NotFound otherwise.
std::shared_ptr<const PlantModel> builtin(std::string_view name);
std::vector<std::string> builtin_names();

}  // namespace athena::models
