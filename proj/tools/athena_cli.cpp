// athena: command-line front end for falsification runs, benchmarks and the
// trace utilities.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "athena/csv.hpp"
#include "athena/errors.hpp"
#include "athena/harness.hpp"
#include "athena/models.hpp"
#include "athena/search.hpp"
#include "athena/stl.hpp"

namespace fs = std::filesystem;
using namespace athena;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoFailure = 1;
constexpr int kExitError = 2;

struct FalsifyArgs {
  std::string catalog_id;
  std::string plant, formula, manual, assumption;
  double auto_scale = 1.0;
  double horizon = 0.0;
  std::string mode = "athena";
  double p = 0.5;
  std::vector<double> schedule;
  std::uint64_t seed = 0;
  std::size_t max_iters = 300;
  double dt = 0.01;
  fs::path out = "falsify_out";
};

harness::Problem resolve_problem(const FalsifyArgs& a) {
  if (!a.catalog_id.empty()) {
    if (!a.plant.empty() || !a.formula.empty() || !a.manual.empty() || !a.assumption.empty()) {
      throw InvalidArgument("--catalog cannot be combined with an inline problem");
    }
    return harness::from_catalog(a.catalog_id);
  }
  if (a.plant.empty() || a.formula.empty() || a.assumption.empty()) {
    throw InvalidArgument("give --catalog, or --plant, --formula and --assumption");
  }
  harness::Problem p;
  p.id = "inline";
  p.plant = a.plant;
  p.formula = a.formula;
  p.manual = a.manual.empty() ? "0" : a.manual;
  p.assumption = parse_assumption(a.assumption);
  p.auto_scale = a.auto_scale;
  p.horizon = a.horizon > 0.0 ? a.horizon
                              : std::max(models::builtin(p.plant)->default_horizon(),
                                         stl::horizon(stl::parse(p.formula)));
  return p;
}

int cmd_falsify(const FalsifyArgs& a) {
  harness::ExperimentConfig cfg;
  cfg.problem = resolve_problem(a);
  cfg.mode = harness::parse_mode(a.mode);
  cfg.p = a.p;
  if (!a.schedule.empty()) cfg.schedule = fitness::PSchedule{a.schedule[0], a.schedule[1]};
  cfg.dt = a.dt;
  cfg.repetitions = 1;
  cfg.base_seed = a.seed;
  cfg.search.max_iterations = a.max_iters;
  cfg.search.seed = a.seed;
  cfg.validate();

  const auto plant = models::builtin(cfg.problem.plant);
  const TimeGrid grid = cfg.grid();
  const auto run =
      search::falsify(*plant, cfg.problem.assumption, cfg.assessment(), cfg.search, grid);

  fs::create_directories(a.out);
  const bool found = run.outcome == search::Outcome::FailureFound;
  const search::ParameterVector& params =
      found ? run.test_case->parameters : run.best_parameters;

  nlohmann::ordered_json j;
  j["requirement"] = cfg.problem.id;
  j["plant"] = cfg.problem.plant;
  j["formula"] = cfg.problem.formula;
  j["assumption"] = to_string(cfg.problem.assumption);
  j["mode"] = a.mode;
  j["seed"] = a.seed;
  j["outcome"] = found ? "FailureFound" : "NoFailureFound";
  j["iterations_used"] = run.iterations_used;
  j["iteration_found"] = found ? nlohmann::ordered_json(run.test_case->iteration) : nullptr;
  j["robustness"] = found ? nlohmann::ordered_json(run.test_case->robustness) : nullptr;
  j["best_combined"] = run.best_combined;
  j["best_robustness"] = std::isfinite(run.best_robustness)
                             ? nlohmann::ordered_json(run.best_robustness)
                             : nlohmann::ordered_json(nullptr);
  j["parameters"] = params;
  std::ofstream(a.out / "testcase.json") << j.dump(2) << '\n';

  Trace inputs(grid);
  for (const auto& [name, sig] : search::encode_inputs(cfg.problem.assumption, params, grid)) {
    inputs.add(name, sig);
  }
  io::write_trace_csv(a.out / "inputs.csv", inputs);

  std::ofstream hist(a.out / "history.csv");
  hist << "iteration,combined,automatic,manual,robustness,p,best_combined,accepted,restart\n";
  for (const auto& r : run.history) {
    hist << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.iteration, r.combined, r.automatic,
                        r.manual, r.robustness, r.p, r.best_combined, int(r.accepted),
                        int(r.restart));
  }

  std::cout << fmt::format("{} after {} iteration(s); outputs in {}\n",
                           found ? "failure found" : "no failure found", run.iterations_used,
                           a.out.string());
  return found ? kExitOk : kExitNoFailure;
}

struct BenchArgs {
  fs::path config;
  std::size_t reps = 0;
  std::string modes;
  std::size_t jobs = 0;
  fs::path out;
  bool no_timestamp = false;
};

int cmd_bench(const BenchArgs& a) {
  harness::Suite suite = harness::load_suite(a.config);
  if (!a.out.empty()) suite.output_dir = a.out;
  std::vector<harness::ExperimentConfig> experiments;
  std::vector<harness::Mode> modes;
  if (!a.modes.empty()) {
    std::stringstream ss(a.modes);
    std::string m;
    while (std::getline(ss, m, ',')) modes.push_back(harness::parse_mode(m));
  }
  for (auto cfg : suite.experiments) {
    if (!modes.empty() && std::find(modes.begin(), modes.end(), cfg.mode) == modes.end()) continue;
    if (a.reps > 0) cfg.repetitions = a.reps;
    cfg.validate();
    experiments.push_back(std::move(cfg));
  }
  for (const auto& cfg : experiments) {
    const auto report = harness::run_experiment(cfg, a.jobs);
    const fs::path stem = suite.output_dir / harness::report_stem(cfg);
    harness::write_report(report, stem, !a.no_timestamp);
    std::cout << fmt::format("{:<6} {:<9} {:6.1f}% failure-revealing ({} runs) -> {}.json\n",
                             cfg.problem.id, harness::to_string(cfg.mode), report.percentage,
                             cfg.repetitions, stem.string());
  }
  return kExitOk;
}

int cmd_robustness(const std::string& formula, const fs::path& trace_path) {
  const auto f = stl::parse(formula);
  const Trace trace = io::read_trace_csv(trace_path);
  std::cout << fmt::format("{}\n", stl::robustness(f, trace));
  return kExitOk;
}

int cmd_simulate(const std::string& plant_name, const fs::path& inputs_path, double dt,
                 double horizon, const fs::path& out) {
  const auto plant = models::builtin(plant_name);
  const Trace in = io::read_trace_csv(inputs_path);
  const double end = horizon > 0.0 ? horizon : in.grid().end();
  const TimeGrid grid(end, dt > 0.0 ? dt : in.grid().step());
  std::map<std::string, Signal> signals;
  for (const auto& name : plant->ports().inputs) {
    if (!in.has(name)) throw PortMismatch(fmt::format("inputs CSV has no column '{}'", name));
    if (grid == in.grid()) {
      signals.emplace(name, in.signal(name));
      continue;
    }
    // Different grid: the CSV rows act as linear control points.
    if (std::abs(in.grid().end() - end) > kTimeTolerance * std::max(1.0, end)) {
      throw InvalidArgument(
          fmt::format("inputs cover [0,{}] but the horizon is {}", in.grid().end(), end));
    }
    std::vector<double> times(in.grid().size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = in.grid().time(i);
    const auto values = in.channel(name);
    signals.emplace(name, interpolate(ControlPoints(std::move(times), {values.begin(), values.end()}),
                                      Interpolation::Linear, grid));
  }
  for (const auto& name : in.names()) {
    const auto& ins = plant->ports().inputs;
    if (std::find(ins.begin(), ins.end(), name) == ins.end()) {
      throw PortMismatch(fmt::format("inputs CSV column '{}' is not a {} input", name,
                                     plant->name()));
    }
  }
  const auto result = models::simulate(*plant, signals, grid);
  if (out.empty()) {
    io::write_trace_csv(std::cout, result.trace);
  } else {
    io::write_trace_csv(out, result.trace);
  }
  return kExitOk;
}

int cmd_compare(const fs::path& a, const fs::path& b) {
  const auto c = harness::compare(harness::read_report(a), harness::read_report(b));
  std::cout << harness::comparison_json(c).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search-based falsification of STL requirements"};
  app.require_subcommand(1);

  FalsifyArgs fa;
  auto* falsify = app.add_subcommand("falsify", "single falsification run (exit 1: no failure)");
  falsify->add_option("--catalog", fa.catalog_id, "requirement id, e.g. CC1");
  falsify->add_option("--plant", fa.plant, "built-in plant");
  falsify->add_option("--formula", fa.formula, "STL requirement");
  falsify->add_option("--manual", fa.manual, "manual fitness expression (default 0)");
  falsify->add_option("--assumption", fa.assumption, "name:kind:lo:hi:n,...");
  falsify->add_option("--auto-scale", fa.auto_scale, "robustness normaliser (inline problems)");
  falsify->add_option("--horizon", fa.horizon, "simulation horizon in seconds");
  falsify->add_option("--mode", fa.mode, "automatic | manual | athena")
      ->check(CLI::IsMember({"automatic", "manual", "athena"}));
  falsify->add_option("--p", fa.p, "athena weight");
  falsify->add_option("--p-schedule", fa.schedule, "athena weight from START to END")
      ->expected(2);
  falsify->add_option("--seed", fa.seed);
  falsify->add_option("--max-iters", fa.max_iters);
  falsify->add_option("--dt", fa.dt);
  falsify->add_option("--out", fa.out, "output directory");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "repeated runs from a suite config");
  bench->add_option("--config", ba.config)->required();
  bench->add_option("--reps", ba.reps, "override repetitions");
  bench->add_option("--modes", ba.modes, "comma-separated subset of modes");
  bench->add_option("--jobs", ba.jobs, "worker threads (default $ATHENA_JOBS or 1)");
  bench->add_option("--out", ba.out, "override output directory");
  bench->add_flag("--no-timestamp", ba.no_timestamp, "omit wall-clock fields");

  std::string rob_formula;
  fs::path rob_trace;
  auto* rob = app.add_subcommand("robustness", "robustness of a formula over a trace CSV");
  rob->add_option("--formula", rob_formula)->required();
  rob->add_option("--trace", rob_trace)->required();

  std::string sim_plant;
  fs::path sim_inputs, sim_out;
  double sim_dt = 0.0, sim_horizon = 0.0;
  auto* sim = app.add_subcommand("simulate", "simulate a plant from an inputs CSV");
  sim->add_option("--plant", sim_plant)->required();
  sim->add_option("--inputs", sim_inputs)->required();
  sim->add_option("--dt", sim_dt, "integration step (default: inputs grid)");
  sim->add_option("--horizon", sim_horizon, "seconds (default: inputs end)");
  sim->add_option("--out", sim_out, "trace CSV (default stdout)");

  fs::path cmp_a, cmp_b;
  auto* cmp = app.add_subcommand("compare", "rank-sum comparison of two reports");
  cmp->add_option("--a", cmp_a)->required();
  cmp->add_option("--b", cmp_b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*falsify) return cmd_falsify(fa);
    if (*bench) return cmd_bench(ba);
    if (*rob) return cmd_robustness(rob_formula, rob_trace);
    if (*sim) return cmd_simulate(sim_plant, sim_inputs, sim_dt, sim_horizon, sim_out);
    if (*cmp) return cmd_compare(cmp_a, cmp_b);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
