#include "athena/search.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "athena/errors.hpp"

namespace athena::search {

void SearchConfig::validate() const {
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  if (!(cooling > 0.0 && cooling < 1.0)) throw InvalidArgument("cooling must lie in (0,1)");
  if (!(sigma > 0.0 && std::isfinite(sigma))) throw InvalidArgument("sigma must be positive");
  if (!(initial_temperature >= 0.0 && std::isfinite(initial_temperature))) {
    throw InvalidArgument("initial temperature must be finite and non-negative");
  }
  if (restart_after_stall < 1) throw InvalidArgument("restart_after_stall must be at least 1");
}

namespace {

void check_vector(const Assumption& a, std::span<const double> v) {
  if (v.size() != a.dimension()) {
    throw InvalidArgument(
        fmt::format("parameter vector has {} entries, assumption needs {}", v.size(), a.dimension()));
  }
  std::size_t k = 0;
  for (const auto& in : a.inputs) {
    for (std::size_t j = 0; j < in.control_points; ++j, ++k) {
      if (!(v[k] >= in.lo && v[k] <= in.hi)) {
        throw InvalidArgument(fmt::format("control value {} for '{}' outside [{},{}]", v[k],
                                          in.name, in.lo, in.hi));
      }
    }
  }
}

}  // namespace

fitness::ControlPointMap control_points(const Assumption& a, std::span<const double> v,
                                        const TimeGrid& grid) {
  check_vector(a, v);
  fitness::ControlPointMap out;
  std::size_t offset = 0;
  for (const auto& in : a.inputs) {
    std::vector<double> values(v.begin() + static_cast<std::ptrdiff_t>(offset),
                               v.begin() + static_cast<std::ptrdiff_t>(offset + in.control_points));
    out.emplace(in.name, ControlPoints(uniform_control_times(grid, in.control_points),
                                       std::move(values)));
    offset += in.control_points;
  }
  return out;
}

std::map<std::string, Signal> encode_inputs(const Assumption& a, std::span<const double> v,
                                            const TimeGrid& grid) {
  std::map<std::string, Signal> out;
  for (auto& [name, cp] : control_points(a, v, grid)) {
    const auto it = std::find_if(a.inputs.begin(), a.inputs.end(),
                                 [&](const InputAssumption& in) { return in.name == name; });
    out.emplace(name, interpolate(cp, it->kind, grid));
  }
  return out;
}

ParameterVector uniform_draw(const Assumption& a, Rng& rng) {
  ParameterVector v;
  v.reserve(a.dimension());
  for (const auto& in : a.inputs) {
    std::uniform_real_distribution<double> dist(in.lo, in.hi);
    for (std::size_t j = 0; j < in.control_points; ++j) v.push_back(dist(rng));
  }
  return v;
}

ParameterVector propose(const ParameterVector& current, const Assumption& a, double temperature,
                        double sigma, Rng& rng) {
  check_vector(a, current);
  ParameterVector next(current.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double spread = sigma * std::max(temperature, 0.05);
  std::size_t k = 0;
  for (const auto& in : a.inputs) {
    const double width = in.hi - in.lo;
    for (std::size_t j = 0; j < in.control_points; ++j, ++k) {
      next[k] = std::clamp(current[k] + spread * width * gauss(rng), in.lo, in.hi);
    }
  }
  return next;
}

namespace {

struct Evaluation {
  fitness::FitnessValue value;
  bool diverged = false;
};

Evaluation evaluate(const models::PlantModel& plant, const Assumption& assumption,
                    const fitness::FitnessAssessment& fitness, const ParameterVector& v,
                    const TimeGrid& grid, std::size_t iteration, std::size_t max_iterations) {
  const auto cps = control_points(assumption, v, grid);
  const auto inputs = encode_inputs(assumption, v, grid);
  Evaluation e;
  try {
    const auto sim = models::simulate(plant, inputs, grid);
    e.value = fitness::assess(fitness, sim.trace, iteration, max_iterations, &cps);
  } catch (const NumericalDivergence&) {
    // Diverged candidates score as the worst possible fitness.
    e.diverged = true;
    e.value.p = fitness.effective_p(iteration, max_iterations);
    e.value.automatic = 1.0;
    e.value.manual = 1.0;
    e.value.combined = 1.0;
    e.value.robustness = std::numeric_limits<double>::infinity();
    e.value.stop = false;
  }
  return e;
}

}  // namespace

RunResult falsify(const models::PlantModel& plant, const Assumption& assumption,
                  const fitness::FitnessAssessment& fitness, const SearchConfig& config,
                  const TimeGrid& grid, const CandidateObserver& observer) {
  config.validate();
  assumption.validate(plant.ports());
  const double look_ahead = stl::horizon(fitness.formula());
  if (look_ahead > grid.end() + kTimeTolerance) {
    throw HorizonError(fmt::format("grid ends at {} s, formula needs {} s", grid.end(), look_ahead));
  }

  Rng rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RunResult result;
  result.seed = config.seed;
  result.best_combined = std::numeric_limits<double>::infinity();
  result.best_robustness = std::numeric_limits<double>::infinity();
  result.history.reserve(config.max_iterations);

  ParameterVector current;
  double current_f = 0.0;
  double temperature = config.initial_temperature;
  std::size_t stall = 0;
  bool restart = true;

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const bool fresh = restart;
    ParameterVector candidate =
        fresh ? uniform_draw(assumption, rng)
              : propose(current, assumption, temperature, config.sigma, rng);
    restart = false;
    if (observer) observer(it, candidate);

    const Evaluation e =
        evaluate(plant, assumption, fitness, candidate, grid, it, config.max_iterations);
    const fitness::FitnessValue& f = e.value;

    IterationRecord rec;
    rec.iteration = it;
    rec.automatic = f.automatic;
    rec.manual = f.manual;
    rec.combined = f.combined;
    rec.robustness = f.robustness;
    rec.p = f.p;
    rec.diverged = e.diverged;
    rec.restart = fresh && it > 0;

    result.iterations_used = it + 1;
    result.best_robustness = std::min(result.best_robustness, f.robustness);
    if (f.combined < result.best_combined) {
      result.best_combined = f.combined;
      result.best_parameters = candidate;
      stall = 0;
    } else {
      ++stall;
    }
    rec.best_combined = result.best_combined;

    if (f.stop) {
      rec.accepted = true;
      result.history.push_back(rec);
      result.outcome = Outcome::FailureFound;
      result.test_case = TestCase{candidate, encode_inputs(assumption, candidate, grid),
                                  f.robustness, config.seed, it};
      return result;
    }

    // Metropolis acceptance; the draw happens on every non-fresh iteration so
    // the random stream does not depend on the fitness sign.
    bool accept = fresh;
    if (!fresh) {
      const double delta = f.combined - current_f;
      const double u = unit(rng);
      accept = delta <= 0.0 || (temperature > 0.0 && u < std::exp(-delta / temperature));
    }
    if (accept) {
      current = std::move(candidate);
      current_f = f.combined;
    }
    rec.accepted = accept;
    result.history.push_back(rec);

    temperature *= config.cooling;
    if (stall >= config.restart_after_stall) {
      restart = true;
      stall = 0;
    }
  }
  return result;
}

}  // namespace athena::search
