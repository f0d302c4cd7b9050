#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "athena/assumption.hpp"
#include "athena/fitness.hpp"
#include "athena/models.hpp"
#include "athena/signals.hpp"

namespace athena::search {

/// Concatenated control values, one slice per input in assumption order.
using ParameterVector = std::vector<double>;
using Rng = std::mt19937_64;

struct SearchConfig {
  std::size_t max_iterations = 300;
  std::uint64_t seed = 0;
  double initial_temperature = 0.1;
  /// Geometric cooling factor applied after every iteration.
  double cooling = 0.97;
  /// Proposal stddev as a fraction of each range width.
  double sigma = 1.0;
  /// Non-improving iterations before the chain restarts from a uniform draw.
  std::size_t restart_after_stall = 50;

  /// Throws InvalidArgument.
  void validate() const;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double automatic = 0.0;
  double manual = 0.0;
  double combined = 0.0;
  /// +inf when the simulation diverged.
  double robustness = 0.0;
  double p = 0.0;
  /// Best combined fitness up to and including this iteration.
  double best_combined = 0.0;
  bool diverged = false;
  bool accepted = false;
  bool restart = false;

  bool operator==(const IterationRecord&) const = default;
};

struct TestCase {
  ParameterVector parameters;
  std::map<std::string, Signal> inputs;
  double robustness = 0.0;
  std::uint64_t seed = 0;
  std::size_t iteration = 0;
};

enum class Outcome { FailureFound, NoFailureFound };

struct RunResult {
  Outcome outcome = Outcome::NoFailureFound;
  /// Set exactly when outcome is FailureFound.
  std::optional<TestCase> test_case;
  std::size_t iterations_used = 0;
  double best_combined = 0.0;
  /// Lowest raw robustness over all evaluated candidates.
  double best_robustness = 0.0;
  /// Candidate with the lowest combined fitness.
  ParameterVector best_parameters;
  std::vector<IterationRecord> history;
  std::uint64_t seed = 0;
};

/// Called with every candidate before it is simulated.
using CandidateObserver = std::function<void(std::size_t iteration, const ParameterVector&)>;

/// Builds one signal per input from its slice of `v` (evenly spaced control
/// times, the input's interpolation kind). Throws InvalidArgument when the
/// length does not match or a value is outside its range.
std::map<std::string, Signal> encode_inputs(const Assumption& a, std::span<const double> v,
                                            const TimeGrid& grid);
fitness::ControlPointMap control_points(const Assumption& a, std::span<const double> v,
                                        const TimeGrid& grid);

/// Uniform draw inside the assumption box.
ParameterVector uniform_draw(const Assumption& a, Rng& rng);

/// Gaussian step with stddev sigma * width * max(temperature, 0.05) per
/// coordinate, clamped to the box.
ParameterVector propose(const ParameterVector& current, const Assumption& a, double temperature,
                        double sigma, Rng& rng);

/// Simulated-annealing falsification. One iteration is one simulation.
/// Returns at the first candidate whose robustness is below the threshold.
RunResult falsify(const models::PlantModel& plant, const Assumption& assumption,
                  const fitness::FitnessAssessment& fitness, const SearchConfig& config,
                  const TimeGrid& grid, const CandidateObserver& observer = {});

}  // namespace athena::search
