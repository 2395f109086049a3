// Command-line front end. Each subcommand reads a TOML (or manifest JSON)
// config, applies flag overrides, writes its outputs plus manifest.json into
// --out, and exits 0 / 1 (validation) / 2 (solver or sampler failure).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crowdrate/construction.hpp"
#include "crowdrate/energy.hpp"
#include "crowdrate/equilibrium.hpp"
#include "crowdrate/error.hpp"
#include "crowdrate/geometry.hpp"
#include "crowdrate/harness.hpp"
#include "crowdrate/io.hpp"
#include "crowdrate/measures.hpp"
#include "crowdrate/run_config.hpp"
#include "crowdrate/sampler.hpp"
#include "crowdrate/version.hpp"
#include "oracles/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace crowdrate;

namespace {

const std::set<std::string> kValidation = {"config", "parameter", "grid", "measure", "dimension", "potential",
                                           "density"};

int report_error(const std::string& category, const std::string& message) {
  std::cerr << json{{"error", category}, {"message", message}}.dump() << '\n';
  return kValidation.count(category) ? 1 : 2;
}

class Outputs {
public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  std::ostream& open(const std::string& name) {
    auto f = std::make_unique<std::ofstream>(dir_ / name);
    if (!*f) fail("config", "cannot write " + (dir_ / name).string());
    names_.push_back(name);
    files_.push_back(std::move(f));
    return *files_.back();
  }
  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }
  const std::vector<std::string>& names() const { return names_; }
  const fs::path& dir() const { return dir_; }

private:
  fs::path dir_;
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<std::ofstream>> files_;
};

void run_eqm(const RunConfig& rc, Outputs& out) {
  const Potential& v = *rc.potential;
  const EquilibriumSolution sol = solve_equilibrium(v, rc.beta, *rc.grid, rc.solver);
  write_measure_csv(out.open("measure.csv"), sol.measure);
  json energy = to_json(rate_i_beta(sol.measure, v, rc.beta, sol.c_beta()));
  energy["c_beta"] = sol.c_beta();
  energy["el_constant"] = sol.el_constant;
  energy["iterations"] = sol.iterations;
  energy["el_residual"] = sol.el_residual;
  energy["converged"] = sol.converged;
  out.write_json("energy.json", energy);
  out.write_json("el_report.json", to_json(verify_euler_lagrange(sol, v, rc.beta, rc.el_check_tolerance)));
  if (rc.grid->dimension() == 2)
    out.write_json("obstacle.json", to_json(obstacle_identity_check(sol, v, rc.beta, rc.obstacle_tolerance, rc.erosion)));
  out.write_json("partition.json", to_json(partition_asymptote_report(sol)));
}

json profile_json(const RateProfile& p) {
  json msgs = json::array();
  for (const auto& d : p.diagnostics) msgs.push_back(d.message);
  return {{"x_star", p.x_star}, {"c_beta", p.c_beta}, {"messages", msgs}};
}

void run_gamma(const RunConfig& rc, Outputs& out) {
  const RateProfile p =
      gamma_profile(*rc.potential, rc.beta, *rc.grid, *rc.region, rc.xs, rc.solver, rc.sweep_mode, rc.threads);
  write_rate_profile_csv(out.open("rate_profile.csv"), p);
  out.write_json("profile.json", profile_json(p));
}

std::size_t tridiagonal_count(const SamplerConfig& s) { return (s.sweeps - s.burn_in + s.thinning - 1) / s.thinning; }

void run_sample(const RunConfig& rc, Outputs& out) {
  std::vector<EnsembleSample> samples;
  json chains = json::array();
  if (rc.sampler_method == "tridiagonal") {
    tridiagonal_visit(rc.sampler.n, rc.beta, rc.seed, tridiagonal_count(rc.sampler),
                      [&](const EnsembleSample& s) { samples.push_back(s); });
  } else {
    std::vector<std::vector<EnsembleSample>> per_chain(rc.sampler.chains);
    const auto summaries = mh_visit(rc.sampler, [&](std::size_t c) -> SampleSink {
      return [&per_chain, c](const EnsembleSample& s) { per_chain[c].push_back(s); };
    });
    for (auto& chain : per_chain)
      for (auto& s : chain) samples.push_back(std::move(s));
    for (const auto& s : summaries) chains.push_back(to_json(s));
  }
  write_samples_csv(out.open("samples.csv"), samples);
  out.write_json("chains.json", {{"method", rc.sampler_method}, {"chains", chains}});
}

void run_crowd(const RunConfig& rc, Outputs& out) {
  const CrowdingStats st = rc.sampler_method == "tridiagonal"
                               ? tridiagonal_crowding(rc.sampler.n, rc.beta, rc.seed, tridiagonal_count(rc.sampler),
                                                      *rc.region)
                               : mh_crowding(rc.sampler, *rc.region);
  write_crowding_csv(out.open("crowding.csv"), st);
  out.write_json("crowding.json", {{"n", st.n},
                                   {"region", st.region_id},
                                   {"counts", st.counts},
                                   {"sweeps_used", st.sweeps_used},
                                   {"thinning", st.thinning}});
}

void run_tube(const RunConfig& rc, Outputs& out) {
  const TubeReport t = minkowski_content(*rc.region, rc.radii, rc.tube_resolution);
  write_tube_csv(out.open("tube.csv"), t);
  json closed = json::array();
  for (double r : rc.radii) closed.push_back(tube_area_detailed(*rc.region, r, rc.tube_resolution).closed_form);
  out.write_json("tube.json", {{"region", rc.region->id()},
                               {"h1_estimate", t.h1_estimate},
                               {"h1_boundary", rc.region->h1_boundary()},
                               {"c_constant", t.c_constant},
                               {"closed_form", closed}});
}

void run_construct(const RunConfig& rc, Outputs& out) {
  const SquareDensity nu = make_density(rc.density);
  const ConstructedPoints pts = construct_points(nu, rc.construct_n);
  write_points_csv(out.open("points.csv"), pts.points);
  out.write_json("cells.json", cells_json(pts));
  json summary = {{"n", rc.construct_n},
                  {"density", rc.density},
                  {"c_bound", nu.c_bound()},
                  {"separation", to_json(verify_separation(pts, nu.c_bound(), rc.construct_n))}};
  if (rc.construct_n >= 2) summary["empirical_energy"] = empirical_energy(pts.points);
  out.write_json("construct.json", summary);
  if (!rc.construct_ns.empty())
    out.write_json("weak_convergence.json",
                   to_json(weak_convergence_check(nu, rc.construct_ns, nu.discretize(rc.density_grid), rc.bl_bound)));
}

void run_ldp(const RunConfig& rc, Outputs& out) {
  const RateProfile p =
      gamma_profile(*rc.potential, rc.beta, *rc.grid, *rc.region, rc.xs, rc.solver, rc.sweep_mode, rc.threads);
  write_rate_profile_csv(out.open("rate_profile.csv"), p);
  LdpConfig cfg;
  cfg.sampler = rc.sampler;
  cfg.sampler.threads = 1;
  cfg.region = *rc.region;
  cfg.target = TargetSet(rc.target);
  cfg.ns = rc.ldp_ns;
  cfg.resolution = rc.resolution;
  cfg.threads = rc.threads;
  cfg.estimator = rc.estimator;
  const LdpReport r = run_ldp_experiment(cfg, p);
  write_ldp_csv(out.open("ldp.csv"), r);
  write_ldp_json(out.open("ldp.json"), cfg, r);
}

void run_oracle(const RunConfig&, Outputs& out) {
  const Potential v = Potential::quadratic(0.5);
  const auto sm = oracle::semicircle_moments();
  const auto half_line = oracle::two_point_crowding(v, 2.0, {{0.0, std::numeric_limits<double>::infinity()}});
  const auto centred = oracle::two_point_crowding(v, 2.0, {{-0.5, 0.5}});
  const std::vector<double> edges = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 16.0};
  auto tilted = [](double x, double) { return (1.0 + x) / 1.5; };
  const auto e_uniform = oracle::square_log_energy([](double, double) { return 1.0; }, 1.0, 4000000, 1);
  const auto e_tilted = oracle::square_log_energy(tilted, 4.0 / 3.0, 4000000, 2);
  out.write_json("oracle.json",
                 {{"semicircle", {{"potential_term", sm.potential_term}, {"sigma", sm.sigma}, {"c_beta", sm.c_beta}}},
                  {"self_cell", {{"interval", oracle::unit_interval_self_energy()},
                                 {"square", oracle::unit_square_self_energy()}}},
                  {"two_point_half_line", half_line},
                  {"two_point_centred", centred},
                  {"two_point_gap", {{"edges", edges}, {"p", oracle::two_point_gap_histogram(v, 2.0, edges)}}},
                  {"one_point_second_moment", oracle::one_point_second_moment(v)},
                  {"square_energy_uniform", {{"mean", e_uniform.mean}, {"se", e_uniform.se}}},
                  {"square_energy_tilted", {{"mean", e_tilted.mean}, {"se", e_tilted.se}}},
                  {"tilted_column_cuts_m3", oracle::column_cuts(tilted, 3, 1.0 / 3.0)}});
}

ConfigValue parse_range(const std::string& text) {
  // lo:hi:count, inclusive of both ends.
  const auto a = text.find(':'), b = text.rfind(':');
  if (a == std::string::npos || a == b) fail("config", "--xs must look like lo:hi:count");
  double lo = 0, hi = 0;
  long count = 0;
  try {
    lo = std::stod(text.substr(0, a));
    hi = std::stod(text.substr(a + 1, b - a - 1));
    count = std::stol(text.substr(b + 1));
  } catch (const std::exception&) {
    fail("config", "--xs must look like lo:hi:count");
  }
  if (count < 1) fail("config", "--xs count must be positive");
  ConfigValue::Array xs;
  for (long i = 0; i < count; ++i)
    xs.push_back({count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1)});
  return {xs};
}

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string xs;
  std::vector<std::string> overrides;
};

int execute(const std::string& command, const Flags& flags) {
  const auto start = std::chrono::steady_clock::now();
  Config cfg = flags.config.empty() ? Config{} : Config::load(flags.config);
  if (flags.seed) cfg.set("run", "seed", {static_cast<std::int64_t>(*flags.seed)});
  if (flags.threads) cfg.set("run", "threads", {static_cast<std::int64_t>(*flags.threads)});
  if (!flags.xs.empty()) cfg.set("gamma", "xs", parse_range(flags.xs));
  for (const auto& o : flags.overrides) cfg.set_assignment(o);
  const RunConfig rc = make_run_config(command, cfg);

  const fs::path dir = flags.out.empty() ? fs::path("out") / command : fs::path(flags.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail("config", "cannot create output directory " + dir.string());
  Outputs out(dir);

  if (command == "eqm") run_eqm(rc, out);
  else if (command == "gamma") run_gamma(rc, out);
  else if (command == "sample") run_sample(rc, out);
  else if (command == "crowd") run_crowd(rc, out);
  else if (command == "tube") run_tube(rc, out);
  else if (command == "construct") run_construct(rc, out);
  else if (command == "ldp") run_ldp(rc, out);
  else run_oracle(rc, out);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const json manifest = {{"command", command},
                         {"config", rc.effective.to_json()},
                         {"seed", rc.seed},
                         {"threads", rc.threads},
                         {"versions",
                          {{"crowdrate", kVersion},
                           {"bl_dictionary", BlDictionary::kVersion},
                           {"compiler", __VERSION__},
                           {"cxx_standard", __cplusplus}}},
                         {"wall_time_seconds", wall},
                         {"outputs", out.names()}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical companion for crowding large deviations of beta-ensembles"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"eqm", "Equilibrium measure with Euler-Lagrange and obstacle checks"},
      {"gamma", "Constrained rate profile gamma(x) over a list of x"},
      {"sample", "Metropolis or tridiagonal ensemble samples"},
      {"crowd", "Crowding histograms of X_n(U)"},
      {"tube", "Tube areas and Minkowski content of a planar region"},
      {"construct", "Equal-mass point construction on a square"},
      {"ldp", "Desk-scale large-deviation experiment"},
      {"oracle", "Brute-force reference values"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "TOML config, or a manifest.json to replay");
    sub->add_option("--out", flags.out, "Output directory (default out/<command>)");
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--threads", flags.threads, "Worker threads");
    if (name == "gamma" || name == "ldp") sub->add_option("--xs", flags.xs, "x grid as lo:hi:count");
    sub->add_option("--set", flags.overrides, "Override a config key: section.key=value");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("config", e.what());
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return execute(command, flags);
  } catch (const Error& e) {
    return report_error(e.category(), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
}
