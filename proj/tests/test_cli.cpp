#include <doctest.h>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "athena/csv.hpp"
#include "athena/models.hpp"
#include "athena/stl.hpp"

namespace fs = std::filesystem;
using namespace athena;

namespace {

const fs::path kCli = ATHENA_CLI_PATH;

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path p = fs::temp_directory_path() / "athena_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

// Runs the CLI; returns its exit status and stores stdout in `out`.
int run(const std::string& args, std::string* out = nullptr) {
  const fs::path so = workdir() / "stdout.txt";
  const std::string cmd =
      "\"" + kCli.string() + "\" " + args + " > \"" + so.string() + "\" 2> /dev/null";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(so);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("robustness of a constant speed trace") {
  Trace t(TimeGrid(50, 0.1));
  t.add("Speed", Signal::constant(t.grid(), 100));
  io::write_trace_csv(workdir() / "speed_const100.csv", t);
  std::string out;
  CHECK(run("robustness --formula \"G[0,20](Speed<120)\" --trace " +
            (workdir() / "speed_const100.csv").string(), &out) == 0);
  CHECK(out == "20\n");
}

TEST_CASE("simulate output feeds robustness exactly") {
  const TimeGrid g(100, 0.05);
  Trace in(g);
  in.add("throttle", interpolate(ControlPoints({0, 50, 100}, {1, 0.2, 0.7}), Interpolation::Pchip, g));
  in.add("brake", interpolate(ControlPoints({0, 100}, {0, 0.3}), Interpolation::Linear, g));
  io::write_trace_csv(workdir() / "cc_in.csv", in);
  const fs::path trace_csv = workdir() / "cc_trace.csv";
  REQUIRE(run("simulate --plant chasing_cars --inputs " + (workdir() / "cc_in.csv").string() +
              " --out " + trace_csv.string()) == 0);

  const auto sim = models::simulate(*models::builtin("chasing_cars"),
                                    {{"throttle", in.signal("throttle")}, {"brake", in.signal("brake")}}, g);
  const Trace back = io::read_trace_csv(trace_csv);
  CHECK(back == sim.trace);
  const char* formula = "G[0,100](y5 - y4 <= 40)";
  std::string out;
  REQUIRE(run(std::string("robustness --formula \"") + formula + "\" --trace " + trace_csv.string(), &out) == 0);
  CHECK(std::stod(out) == stl::robustness(stl::parse(formula), sim.trace));
  CHECK(out == fmt::format("{}\n", stl::robustness(stl::parse(formula), sim.trace)));

  // resampling onto a coarser grid
  CHECK(run("simulate --plant chasing_cars --dt 0.1 --inputs " + (workdir() / "cc_in.csv").string() +
            " --out " + (workdir() / "coarse.csv").string()) == 0);
  CHECK(io::read_trace_csv(workdir() / "coarse.csv").grid() == TimeGrid(100, 0.1));
}

TEST_CASE("falsify writes a test case") {
  const fs::path out = workdir() / "fals";
  const int code = run("falsify --catalog AT1 --mode athena --seed 7 --dt 0.05 --out " + out.string());
  CHECK((code == 0 || code == 1));
  const auto tc = nlohmann::json::parse(slurp(out / "testcase.json"));
  CHECK(tc.at("outcome") == (code == 0 ? "FailureFound" : "NoFailureFound"));
  CHECK(tc.at("parameters").size() == 10);
  CHECK(fs::exists(out / "inputs.csv"));
  CHECK(fs::exists(out / "history.csv"));
  if (code == 0) {
    const Trace inputs = io::read_trace_csv(out / "inputs.csv");
    const auto sim = models::simulate(*models::builtin("at_lite"),
                                      {{"Throttle", inputs.signal("Throttle")}, {"Brake", inputs.signal("Brake")}},
                                      inputs.grid());
    CHECK(stl::robustness(stl::parse("G[0,20](Speed < 120)"), sim.trace) < 0);
  }
}

TEST_CASE("falsify exit codes") {
  CHECK(run("falsify --plant passthrough --formula \"G[0,10](x < 2)\" --assumption x:const:0:1:1 "
            "--max-iters 20 --out " + (workdir() / "nff").string()) == 1);
  CHECK(run("falsify --plant passthrough --formula \"G[0,10](x < 0.5)\" --assumption x:const:0:1:1 "
            "--mode automatic --out " + (workdir() / "ff").string()) == 0);
  CHECK(run("falsify --catalog CC1 --bogus-flag") == 2);
  CHECK(run("falsify --catalog NOPE") == 2);
  CHECK(run("falsify --catalog CC1 --mode best") == 2);
  CHECK(run("robustness --formula \"G[0,20](Speed<\" --trace x.csv") == 2);
  CHECK(run("") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("bench and compare") {
  const fs::path cfg = workdir() / "suite.json";
  std::ofstream(cfg) << R"({"requirements": ["CC1"], "modes": ["automatic", "athena"],
    "repetitions": 4, "seed": 3, "dt": 0.05, "search": {"max_iterations": 40},
    "output_dir": ")" << (workdir() / "reports").string() << "\"}";
  REQUIRE(run("bench --config " + cfg.string() + " --no-timestamp") == 0);
  const std::string first = slurp(workdir() / "reports" / "CC1_athena.json");
  REQUIRE(run("bench --config " + cfg.string() + " --no-timestamp --jobs 2") == 0);
  CHECK(slurp(workdir() / "reports" / "CC1_athena.json") == first);

  REQUIRE(run("bench --config " + cfg.string() + " --reps 2 --modes athena --no-timestamp --out " +
              (workdir() / "r2").string()) == 0);
  CHECK(fs::exists(workdir() / "r2" / "CC1_athena.json"));
  CHECK_FALSE(fs::exists(workdir() / "r2" / "CC1_automatic.json"));
  CHECK(nlohmann::json::parse(slurp(workdir() / "r2" / "CC1_athena.json")).at("runs").size() == 2);

  std::string out;
  REQUIRE(run("compare --a " + (workdir() / "reports" / "CC1_automatic.json").string() + " --b " +
              (workdir() / "reports" / "CC1_athena.json").string(), &out) == 0);
  const auto j = nlohmann::json::parse(out);
  CHECK(j.contains("percentage_delta"));
  CHECK(j.contains("rank_sum"));
  CHECK(run("bench --config " + (workdir() / "missing.json").string()) == 2);
}

}
