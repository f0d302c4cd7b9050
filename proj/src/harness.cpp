#include "athena/harness.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include "athena/errors.hpp"
#include "athena/models.hpp"
#include "athena/stl.hpp"

namespace athena::harness {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Automatic: return "automatic";
    case Mode::Manual: return "manual";
    case Mode::Athena: return "athena";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  if (name == "automatic") return Mode::Automatic;
  if (name == "manual") return Mode::Manual;
  if (name == "athena") return Mode::Athena;
  throw InvalidArgument(fmt::format("unknown mode '{}' (automatic, manual, athena)", name));
}

void Problem::validate() const {
  const auto model = models::builtin(plant);
  const auto formula_ast = stl::parse(formula);
  fitness::parse_manual(manual);
  assumption.validate(model->ports());
  if (!(auto_scale > 0.0 && std::isfinite(auto_scale))) {
    throw InvalidArgument("auto_scale must be positive");
  }
  if (stl::horizon(formula_ast) > horizon + kTimeTolerance) {
    throw HorizonError(fmt::format("horizon {} s is shorter than the formula's {} s", horizon,
                                   stl::horizon(formula_ast)));
  }
}

Problem from_catalog(std::string_view id) {
  const auto& e = fitness::catalog(id);
  return Problem{e.id,         e.plant,      e.formula_text, e.manual_text,
                 e.assumption, e.auto_scale, e.horizon};
}

void ExperimentConfig::validate() const {
  problem.validate();
  search.validate();
  if (repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0,1]");
  if (!(dt > 0.0 && std::isfinite(dt))) throw InvalidArgument("dt must be positive");
  if (schedule && mode != Mode::Athena) {
    throw InvalidArgument("a p schedule only applies to athena mode");
  }
  assessment();
  grid();
}

double ExperimentConfig::static_p() const {
  switch (mode) {
    case Mode::Automatic: return 1.0;
    case Mode::Manual: return 0.0;
    case Mode::Athena: return p;
  }
  return p;
}

fitness::FitnessAssessment ExperimentConfig::assessment() const {
  return fitness::FitnessAssessment(stl::parse(problem.formula),
                                    fitness::parse_manual(problem.manual), static_p(),
                                    problem.auto_scale, schedule, threshold);
}

TimeGrid ExperimentConfig::grid() const { return TimeGrid(problem.horizon, dt); }

std::size_t default_jobs() {
  if (const char* env = std::getenv("ATHENA_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

std::optional<IterationStats> iteration_stats(const std::vector<RunSummary>& runs) {
  std::vector<double> its;
  for (const auto& r : runs) {
    if (r.failure_found) its.push_back(static_cast<double>(r.iterations_used));
  }
  if (its.empty()) return std::nullopt;
  IterationStats s;
  s.count = its.size();
  double sum = 0.0;
  for (double v : its) sum += v;
  s.mean = sum / static_cast<double>(its.size());
  s.min = *std::min_element(its.begin(), its.end());
  s.max = *std::max_element(its.begin(), its.end());
  if (its.size() > 1) {
    double ss = 0.0;
    for (double v : its) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(its.size() - 1));
  }
  return s;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
  cfg.validate();
  if (jobs == 0) jobs = default_jobs();
  jobs = std::min(jobs, cfg.repetitions);

  const auto plant = models::builtin(cfg.problem.plant);
  const auto fitness_cfg = cfg.assessment();
  const TimeGrid grid = cfg.grid();

  ExperimentReport report;
  report.config = cfg;
  report.runs.resize(cfg.repetitions);

  const auto started = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.repetitions; i = next++) {
      RunSummary& row = report.runs[i];
      row.index = i;
      row.seed = cfg.base_seed + i;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        search::SearchConfig sc = cfg.search;
        sc.seed = row.seed;
        const auto r = search::falsify(*plant, cfg.problem.assumption, fitness_cfg, sc, grid);
        row.failure_found = r.outcome == search::Outcome::FailureFound;
        row.iterations_used = r.iterations_used;
        row.best_combined = r.best_combined;
        row.best_robustness = r.best_robustness;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::size_t found = 0;
  for (const auto& r : report.runs) found += r.failure_found ? 1 : 0;
  report.percentage = 100.0 * static_cast<double>(found) / static_cast<double>(cfg.repetitions);
  report.iterations = iteration_stats(report.runs);
  return report;
}

namespace {

// nlohmann writes non-finite numbers as null.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double number_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

ordered_json search_json(const search::SearchConfig& s) {
  ordered_json j;
  j["max_iterations"] = s.max_iterations;
  j["initial_temperature"] = s.initial_temperature;
  j["cooling"] = s.cooling;
  j["sigma"] = s.sigma;
  j["restart_after_stall"] = s.restart_after_stall;
  return j;
}

}  // namespace

ordered_json report_json(const ExperimentReport& report, bool timestamp) {
  const ExperimentConfig& c = report.config;
  ordered_json j;
  j["requirement"] = c.problem.id;
  j["plant"] = c.problem.plant;
  j["formula"] = c.problem.formula;
  j["manual"] = c.problem.manual;
  j["assumption"] = to_string(c.problem.assumption);
  j["auto_scale"] = c.problem.auto_scale;
  j["horizon"] = c.problem.horizon;
  j["mode"] = to_string(c.mode);
  j["p"] = c.static_p();
  j["p_schedule"] = c.schedule ? ordered_json::array({c.schedule->start, c.schedule->end})
                               : ordered_json(nullptr);
  j["repetitions"] = c.repetitions;
  j["base_seed"] = c.base_seed;
  j["dt"] = c.dt;
  j["threshold"] = c.threshold;
  j["search"] = search_json(c.search);

  std::size_t found = 0;
  for (const auto& r : report.runs) found += r.failure_found ? 1 : 0;
  j["failure_revealing"] = found;
  j["percentage"] = report.percentage;
  if (report.iterations) {
    const auto& s = *report.iterations;
    j["iterations"] = {{"count", s.count}, {"mean", s.mean}, {"min", s.min},
                       {"max", s.max},     {"stddev", s.stddev}};
  } else {
    j["iterations"] = nullptr;
  }
  ordered_json runs = ordered_json::array();
  for (const auto& r : report.runs) {
    ordered_json row;
    row["index"] = r.index;
    row["seed"] = r.seed;
    row["outcome"] = r.failure_found ? "FailureFound" : "NoFailureFound";
    row["iterations"] = r.iterations_used;
    row["best_combined"] = number(r.best_combined);
    row["best_robustness"] = number(r.best_robustness);
    row["error"] = r.error ? ordered_json(*r.error) : ordered_json(nullptr);
    if (timestamp) row["wall_seconds"] = r.wall_seconds;
    runs.push_back(std::move(row));
  }
  j["runs"] = std::move(runs);
  if (timestamp) {
    j["wall_seconds"] = report.wall_seconds;
    j["created_at"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                                  fmt::gmtime(std::chrono::system_clock::to_time_t(
                                      std::chrono::system_clock::now())));
  }
  return j;
}

std::string report_csv(const ExperimentReport& report) {
  std::string out = "index,seed,outcome,iterations,best_combined,best_robustness,error\n";
  for (const auto& r : report.runs) {
    std::string err = r.error.value_or("");
    std::replace(err.begin(), err.end(), '"', '\'');
    out += fmt::format("{},{},{},{},{},{},{}\n", r.index, r.seed,
                       r.failure_found ? "FailureFound" : "NoFailureFound", r.iterations_used,
                       r.best_combined, r.best_robustness, err.empty() ? "" : "\"" + err + "\"");
  }
  return out;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& stem,
                  bool timestamp) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  auto json_path = stem;
  json_path += ".json";
  auto csv_path = stem;
  csv_path += ".csv";
  std::ofstream js(json_path);
  std::ofstream cs(csv_path);
  if (!js || !cs) throw InvalidArgument(fmt::format("cannot write report '{}'", stem.string()));
  js << report_json(report, timestamp).dump(2) << '\n';
  cs << report_csv(report);
}

ReportDigest read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound(fmt::format("cannot open report '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
    ReportDigest d;
    d.requirement = j.at("requirement").get<std::string>();
    d.mode = j.at("mode").get<std::string>();
    d.percentage = j.at("percentage").get<double>();
    for (const auto& row : j.at("runs")) {
      RunSummary r;
      r.index = row.at("index").get<std::size_t>();
      r.seed = row.at("seed").get<std::uint64_t>();
      r.failure_found = row.at("outcome").get<std::string>() == "FailureFound";
      r.iterations_used = row.at("iterations").get<std::size_t>();
      r.best_combined = number_or_inf(row.at("best_combined"));
      r.best_robustness = number_or_inf(row.at("best_robustness"));
      if (!row.at("error").is_null()) r.error = row.at("error").get<std::string>();
      d.runs.push_back(std::move(r));
    }
    return d;
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("malformed report '{}': {}", path.string(), e.what()));
  }
}

Comparison compare(const ReportDigest& a, const ReportDigest& b) {
  Comparison c;
  c.percentage_a = a.percentage;
  c.percentage_b = b.percentage;
  auto iterations = [](const ReportDigest& d) {
    std::vector<double> v;
    for (const auto& r : d.runs) {
      if (r.failure_found) v.push_back(static_cast<double>(r.iterations_used));
    }
    return v;
  };
  const auto ia = iterations(a);
  const auto ib = iterations(b);
  if (!ia.empty() && !ib.empty()) c.iterations = stats::rank_sum(ia, ib);
  return c;
}

ordered_json comparison_json(const Comparison& c) {
  ordered_json j;
  j["percentage_a"] = c.percentage_a;
  j["percentage_b"] = c.percentage_b;
  j["percentage_delta"] = c.percentage_b - c.percentage_a;
  if (c.iterations) {
    j["rank_sum"] = {{"u_a", c.iterations->u_a},
                     {"u_b", c.iterations->u_b},
                     {"p_value", c.iterations->p_value},
                     {"exact", c.iterations->exact}};
  } else {
    j["rank_sum"] = nullptr;
  }
  return j;
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, std::string_view where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InvalidArgument(fmt::format("unknown key '{}' in {}", key, where));
  }
}

Problem inline_problem(const json& j) {
  reject_unknown(j, {"id", "plant", "formula", "manual", "assumption", "auto_scale", "horizon"},
                 "problem");
  Problem p;
  p.id = j.at("id").get<std::string>();
  p.plant = j.at("plant").get<std::string>();
  p.formula = j.at("formula").get<std::string>();
  p.manual = j.at("manual").get<std::string>();
  p.assumption = parse_assumption(j.at("assumption").get<std::string>());
  p.auto_scale = j.value("auto_scale", 1.0);
  const double look_ahead = stl::horizon(stl::parse(p.formula));
  p.horizon = j.contains("horizon")
                  ? j.at("horizon").get<double>()
                  : std::max(models::builtin(p.plant)->default_horizon(), look_ahead);
  return p;
}

}  // namespace

Suite parse_suite(const json& doc) {
  try {
    reject_unknown(doc,
                   {"name", "requirements", "problems", "modes", "repetitions", "seed", "dt",
                    "threshold", "p", "p_schedule", "search", "output_dir"},
                   "suite");
    Suite suite;
    suite.name = doc.value("name", std::string("suite"));
    suite.output_dir = doc.value("output_dir", std::string("reports"));

    std::vector<Problem> problems;
    for (const auto& id : doc.value("requirements", json::array())) {
      problems.push_back(from_catalog(id.get<std::string>()));
    }
    for (const auto& p : doc.value("problems", json::array())) problems.push_back(inline_problem(p));
    if (problems.empty()) throw InvalidArgument("suite lists no requirements or problems");

    std::vector<Mode> modes;
    for (const auto& m : doc.value("modes", json::array({"automatic", "manual", "athena"}))) {
      modes.push_back(parse_mode(m.get<std::string>()));
    }

    ExperimentConfig base;
    base.repetitions = doc.value("repetitions", base.repetitions);
    base.base_seed = doc.value("seed", base.base_seed);
    base.dt = doc.value("dt", base.dt);
    base.threshold = doc.value("threshold", base.threshold);
    base.p = doc.value("p", base.p);
    if (doc.contains("p_schedule") && !doc.at("p_schedule").is_null()) {
      const auto& s = doc.at("p_schedule");
      if (!s.is_array() || s.size() != 2) throw InvalidArgument("p_schedule must be [start, end]");
      base.schedule = fitness::PSchedule{s[0].get<double>(), s[1].get<double>()};
    }
    if (doc.contains("search")) {
      const auto& s = doc.at("search");
      reject_unknown(s,
                     {"max_iterations", "initial_temperature", "cooling", "sigma",
                      "restart_after_stall"},
                     "search");
      auto& sc = base.search;
      sc.max_iterations = s.value("max_iterations", sc.max_iterations);
      sc.initial_temperature = s.value("initial_temperature", sc.initial_temperature);
      sc.cooling = s.value("cooling", sc.cooling);
      sc.sigma = s.value("sigma", sc.sigma);
      sc.restart_after_stall = s.value("restart_after_stall", sc.restart_after_stall);
    }

    for (const auto& problem : problems) {
      for (const Mode m : modes) {
        ExperimentConfig cfg = base;
        cfg.problem = problem;
        cfg.mode = m;
        if (m != Mode::Athena) cfg.schedule.reset();
        cfg.validate();
        suite.experiments.push_back(std::move(cfg));
      }
    }
    return suite;
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("malformed suite config: {}", e.what()));
  }
}

Suite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound(fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("invalid JSON in '{}': {}", path.string(), e.what()), e.byte);
  }
  return parse_suite(doc);
}

std::string report_stem(const ExperimentConfig& cfg) {
  return fmt::format("{}_{}", cfg.problem.id, to_string(cfg.mode));
}

}  // namespace athena::harness
