// Python bindings over the core library. Signals cross the boundary as 1-D
// float64 arrays on a uniform grid starting at 0.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "athena/assumption.hpp"
#include "athena/errors.hpp"
#include "athena/fitness.hpp"
#include "athena/harness.hpp"
#include "athena/models.hpp"
#include "athena/rank_sum.hpp"
#include "athena/search.hpp"
#include "athena/signals.hpp"
#include "athena/stl.hpp"

namespace py = pybind11;
using namespace athena;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw InvalidArgument("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

/// Channel arrays must all have the same length n; the grid is (n-1)*step long.
Trace make_trace(const std::map<std::string, Array>& channels, double step) {
  if (channels.empty()) throw InvalidArgument("trace needs at least one channel");
  const auto n = static_cast<std::size_t>(channels.begin()->second.size());
  if (n < 2) throw InvalidArgument("trace needs at least two samples");
  Trace trace(TimeGrid(static_cast<double>(n - 1) * step, step));
  for (const auto& [name, values] : channels) trace.add(name, to_vector(values));
  return trace;
}

py::dict trace_dict(const Trace& trace) {
  py::dict d;
  std::vector<double> t(trace.grid().size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = trace.grid().time(i);
  d["time"] = to_array(t);
  for (const auto& name : trace.names()) d[py::str(name)] = to_array(trace.channel(name));
  return d;
}

harness::Problem make_problem(const std::string& requirement, const std::string& plant,
                              const std::string& formula, const std::string& manual,
                              const std::string& assumption, double auto_scale, double horizon) {
  if (!requirement.empty()) return harness::from_catalog(requirement);
  harness::Problem p{"inline", plant, formula, manual.empty() ? "0" : manual,
                     parse_assumption(assumption), auto_scale, horizon};
  if (p.horizon <= 0) {
    p.horizon = std::max(models::builtin(plant)->default_horizon(), stl::horizon(stl::parse(formula)));
  }
  return p;
}

py::dict falsify(const std::string& requirement, const std::string& plant, const std::string& formula,
                 const std::string& manual, const std::string& assumption, double auto_scale,
                 double horizon, const std::string& mode, double p, std::uint64_t seed,
                 std::size_t max_iterations, double dt) {
  harness::ExperimentConfig cfg;
  cfg.problem = make_problem(requirement, plant, formula, manual, assumption, auto_scale, horizon);
  cfg.mode = harness::parse_mode(mode);
  cfg.p = p;
  cfg.repetitions = 1;
  cfg.base_seed = seed;
  cfg.dt = dt;
  cfg.search.max_iterations = max_iterations;
  cfg.search.seed = seed;
  cfg.validate();

  const auto model = models::builtin(cfg.problem.plant);
  const auto grid = cfg.grid();
  search::RunResult r;
  {
    py::gil_scoped_release release;
    r = search::falsify(*model, cfg.problem.assumption, cfg.assessment(), cfg.search, grid);
  }
  py::dict out;
  out["failure_found"] = r.outcome == search::Outcome::FailureFound;
  out["iterations_used"] = r.iterations_used;
  out["best_combined"] = r.best_combined;
  out["best_robustness"] = r.best_robustness;
  out["best_parameters"] = r.best_parameters;
  out["seed"] = r.seed;
  py::list combined;
  for (const auto& rec : r.history) combined.append(rec.combined);
  out["combined_history"] = combined;
  if (r.test_case) {
    py::dict tc;
    tc["parameters"] = r.test_case->parameters;
    tc["robustness"] = r.test_case->robustness;
    tc["iteration"] = r.test_case->iteration;
    py::dict inputs;
    for (const auto& [name, sig] : r.test_case->inputs) inputs[py::str(name)] = to_array(sig.values());
    tc["inputs"] = inputs;
    out["test_case"] = tc;
  } else {
    out["test_case"] = py::none();
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "STL falsification core";

  auto base = py::register_exception<Error>(m, "AthenaError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<NotFound>(m, "NotFound", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SemanticError>(m, "SemanticError", base.ptr());
  py::register_exception<MissingChannel>(m, "MissingChannel", base.ptr());
  py::register_exception<HorizonError>(m, "HorizonError", base.ptr());
  py::register_exception<PortMismatch>(m, "PortMismatch", base.ptr());
  py::register_exception<NumericalDivergence>(m, "NumericalDivergence", base.ptr());

  m.def("normalize", [](const std::string& f) { return stl::to_string(stl::parse(f)); }, py::arg("formula"),
        "Parse a formula and print it back in canonical form.");
  m.def("formula_horizon", [](const std::string& f) { return stl::horizon(stl::parse(f)); },
        py::arg("formula"));
  m.def(
      "robustness",
      [](const std::string& f, const std::map<std::string, Array>& trace, double step) {
        return stl::robustness(stl::parse(f), make_trace(trace, step));
      },
      py::arg("formula"), py::arg("trace"), py::arg("step"),
      "Robustness at time 0. `trace` maps channel names to equally long arrays.");
  m.def(
      "satisfied",
      [](const std::string& f, const std::map<std::string, Array>& trace, double step) {
        return stl::satisfied(stl::parse(f), make_trace(trace, step));
      },
      py::arg("formula"), py::arg("trace"), py::arg("step"));

  m.def(
      "interpolate",
      [](const Array& times, const Array& values, const std::string& kind, double end, double step) {
        const auto s = interpolate(ControlPoints(to_vector(times), to_vector(values)),
                                   parse_interpolation(kind), TimeGrid(end, step));
        return to_array(s.values());
      },
      py::arg("times"), py::arg("values"), py::arg("kind"), py::arg("end"), py::arg("step"));

  m.def("plants", &models::builtin_names);
  m.def(
      "simulate",
      [](const std::string& plant, const std::map<std::string, Array>& inputs, double step) {
        const auto model = models::builtin(plant);
        const auto n = inputs.empty() ? std::size_t{0} : static_cast<std::size_t>(inputs.begin()->second.size());
        if (n < 2) throw InvalidArgument("inputs need at least two samples");
        const TimeGrid grid(static_cast<double>(n - 1) * step, step);
        std::map<std::string, Signal> sig;
        for (const auto& [name, v] : inputs) sig.emplace(name, Signal(grid, to_vector(v)));
        return trace_dict(models::simulate(*model, sig, grid).trace);
      },
      py::arg("plant"), py::arg("inputs"), py::arg("step"),
      "Simulate a built-in plant. Returns time, outputs and inputs as arrays.");

  m.def("catalog_ids", &fitness::catalog_ids);
  m.def(
      "catalog",
      [](const std::string& id) {
        const auto& e = fitness::catalog(id);
        py::dict d;
        d["id"] = e.id;
        d["description"] = e.description;
        d["plant"] = e.plant;
        d["formula"] = e.formula_text;
        d["manual"] = e.manual_text;
        d["assumption"] = to_string(e.assumption);
        d["auto_scale"] = e.auto_scale;
        d["horizon"] = e.horizon;
        return d;
      },
      py::arg("id"));

  m.def("falsify", &falsify, py::arg("requirement") = "", py::kw_only(), py::arg("plant") = "",
        py::arg("formula") = "", py::arg("manual") = "", py::arg("assumption") = "",
        py::arg("auto_scale") = 1.0, py::arg("horizon") = 0.0, py::arg("mode") = "athena",
        py::arg("p") = 0.5, py::arg("seed") = 0, py::arg("max_iterations") = 300, py::arg("dt") = 0.01,
        "One seeded falsification run on a catalog requirement or an inline problem.");

  m.def(
      "rank_sum",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = stats::rank_sum(a, b);
        py::dict d;
        d["u_a"] = r.u_a;
        d["u_b"] = r.u_b;
        d["p_value"] = r.p_value;
        d["exact"] = r.exact;
        return d;
      },
      py::arg("a"), py::arg("b"), "Two-sided Wilcoxon rank-sum test.");
}
