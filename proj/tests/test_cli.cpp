#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "crowdrate/config.hpp"
#include "crowdrate/run_config.hpp"
#include "support.hpp"

using namespace crowdrate;
namespace fs = std::filesystem;

namespace {

const std::string kCli = CROWDRATE_CLI;
const std::string kConfigs = CROWDRATE_CONFIGS;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("crowdrate-cli-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code = -1;
  std::string err;
};

// Runs the CLI from `cwd`, capturing stderr.
Run run(const fs::path& cwd, const std::string& args) {
  const fs::path err = cwd / "stderr.txt";
  const std::string cmd = "cd '" + cwd.string() + "' && '" + kCli + "' " + args + " 2> '" + err.string() + "' > /dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

std::string error_category(const Run& r) {
  const auto doc = nlohmann::json::parse(r.err);
  return doc.at("error").get<std::string>();
}

}  // namespace

TEST_CASE("toml subset") {
  const Config c = Config::parse_toml(R"(
# comment
[run]
seed = 42   # trailing comment
name = "a # b"

[region]
hi = inf
lo = -inf
on = true
rows = [
  [0.1, 0.2],
  [0.5, 1],
]
)");
  CHECK(c.seed("run", "seed", 0) == 42);
  CHECK(c.text("run", "name") == "a # b");
  CHECK(c.number("region", "hi") == std::numeric_limits<double>::infinity());
  CHECK(c.number("region", "lo") == -std::numeric_limits<double>::infinity());
  CHECK(c.flag("region", "on", false));
  const auto rows = c.rows("region", "rows");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][1] == 1.0);
  CHECK(c.number("run", "missing", 3.5) == 3.5);
  CHECK_ERROR_CATEGORY(c.text("run", "seed"), "config");
  CHECK_ERROR_CATEGORY(c.integer("run", "name"), "config");

  CHECK_ERROR_CATEGORY(Config::parse_toml("[a]\nx = 1\nx = 2\n"), "config");
  CHECK_ERROR_CATEGORY(Config::parse_toml("[a]\nx = \n"), "config");
  CHECK_ERROR_CATEGORY(Config::parse_toml("[a\nx = 1\n"), "config");
  try {
    Config::parse_toml("[a]\nx = 1\n\ny = [1, 2\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("config json round trip and overrides") {
  Config c = Config::parse_toml("[grid]\nlo = -3.0\nhi = inf\nnodes = 10\n[gamma]\nxs = [0.1, 0.5]\n");
  c.set_assignment("grid.nodes=20");
  c.set_assignment("run.seed=9");
  CHECK(c.integer("grid", "nodes") == 20);
  CHECK(c.seed("run", "seed", 0) == 9);
  CHECK_ERROR_CATEGORY(c.set_assignment("grid.nodes"), "config");
  const Config back = Config::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.number("grid", "hi") == std::numeric_limits<double>::infinity());
  CHECK(back.numbers("gamma", "xs") == std::vector<double>{0.1, 0.5});

  CHECK_ERROR_CATEGORY(Config::parse_toml("[bogus]\nx = 1\n").validate(run_schema()), "config");
  CHECK_ERROR_CATEGORY(Config::parse_toml("[grid]\nbogus = 1\n").validate(run_schema()), "config");
  CHECK_ERROR_CATEGORY(Config::load("/nonexistent/eq.toml"), "config");
}

TEST_CASE("run config validation") {
  const Config base = Config::load(kConfigs + "/eqm_semicircle.toml");
  const RunConfig rc = make_run_config("eqm", base);
  CHECK(rc.grid->size() == 400);
  CHECK(rc.beta == 2.0);
  CHECK(rc.solver.el_tolerance == 1e-5);
  CHECK_ERROR_CATEGORY(make_run_config("bogus", base), "config");
  CHECK_ERROR_CATEGORY(make_run_config("gamma", base), "config");

  Config complex = base;
  complex.set_assignment("ensemble.field=\"complex\"");
  CHECK_ERROR_CATEGORY(make_run_config("eqm", complex), "dimension");
  Config beta = base;
  beta.set_assignment("ensemble.beta=-1");
  CHECK_ERROR_CATEGORY(make_run_config("eqm", beta), "parameter");
  Config grid = base;
  grid.set_assignment("grid.nodes=1");
  CHECK_ERROR_CATEGORY(make_run_config("eqm", grid), "grid");
  CHECK_ERROR_CATEGORY(make_density("striped"), "config");
}

TEST_CASE("eqm and gamma happy paths") {
  const fs::path dir = scratch("happy");
  Run r = run(dir, "eqm --config '" + kConfigs + "/eqm_semicircle.toml' --out eq");
  CHECK(r.code == 0);
  for (const char* f : {"measure.csv", "energy.json", "el_report.json", "partition.json", "manifest.json"})
    CHECK(fs::exists(dir / "eq" / f));
  const auto el = nlohmann::json::parse(slurp(dir / "eq" / "el_report.json"));
  CHECK(el.at("passed") == true);
  const auto manifest = nlohmann::json::parse(slurp(dir / "eq" / "manifest.json"));
  CHECK(manifest.at("command") == "eqm");
  CHECK(manifest.at("config").contains("grid"));
  CHECK(manifest.contains("wall_time_seconds"));
  CHECK(manifest.at("versions").contains("crowdrate"));

  r = run(dir, "gamma --config '" + kConfigs + "/gamma_interval.toml' --xs 0.1:0.9:9 --out g --set grid.nodes=120");
  CHECK(r.code == 0);
  const std::string csv = slurp(dir / "g" / "rate_profile.csv");
  CHECK(csv.rfind("x,gamma,iterations,el_residual,converged\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("validation errors exit with 1") {
  const fs::path dir = scratch("errors");
  Run r = run(dir, "eqm --config missing.toml");
  CHECK(r.code == 1);
  CHECK(error_category(r) == "config");
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  std::ofstream(dir / "bad.toml") << "[grid]\nlo = -3.0\nhi = 3.0\nnodes = 50\nspacing = 2\n";
  r = run(dir, "eqm --config bad.toml");
  CHECK(r.code == 1);
  CHECK(error_category(r) == "config");

  r = run(dir, "eqm --config '" + kConfigs + "/eqm_semicircle.toml' --set ensemble.beta=0");
  CHECK(r.code == 1);
  CHECK(error_category(r) == "parameter");

  r = run(dir, "eqm --config '" + kConfigs + "/eqm_semicircle.toml' --bogus");
  CHECK(r.code == 1);
}

TEST_CASE("solver errors exit with 2") {
  const fs::path dir = scratch("solver");
  Run r = run(dir, "eqm --config '" + kConfigs + "/eqm_semicircle.toml' --set solver.max_iterations=2");
  CHECK(r.code == 2);
  CHECK(error_category(r) == "maxiter");
  r = run(dir, "eqm --config '" + kConfigs + "/eqm_semicircle.toml' --set grid.lo=-1.5 --set grid.hi=1.5");
  CHECK(r.code == 2);
  CHECK(error_category(r) == "domain-too-small");
}

TEST_CASE("subcommands keep to their own output directories") {
  const fs::path dir = scratch("isolation");
  REQUIRE(run(dir, "tube --config '" + kConfigs + "/tube_square.toml'").code == 0);
  const std::string tube = slurp(dir / "out" / "tube" / "tube.csv");
  REQUIRE(run(dir, "construct --config '" + kConfigs + "/construct_tilted.toml'").code == 0);
  CHECK(fs::exists(dir / "out" / "construct" / "points.csv"));
  CHECK(slurp(dir / "out" / "tube" / "tube.csv") == tube);
  for (const auto& entry : fs::directory_iterator(dir / "out" / "tube"))
    CHECK(entry.path().filename().string().find("points") == std::string::npos);
}

TEST_CASE("manifest replay") {
  const fs::path dir = scratch("replay");
  REQUIRE(run(dir, "crowd --config '" + kConfigs + "/crowd_two_point.toml' --out a --set sampler.sweeps=6000").code == 0);
  REQUIRE(run(dir, "crowd --config a/manifest.json --out b").code == 0);
  CHECK(slurp(dir / "a" / "crowding.csv") == slurp(dir / "b" / "crowding.csv"));
  const auto m = nlohmann::json::parse(slurp(dir / "b" / "manifest.json"));
  CHECK(m.at("config") == nlohmann::json::parse(slurp(dir / "a" / "manifest.json")).at("config"));
}
