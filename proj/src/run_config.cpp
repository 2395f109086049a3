#include "crowdrate/run_config.hpp"

#include <algorithm>
#include <cmath>

#include "crowdrate/error.hpp"

namespace crowdrate {

const Config::Schema& run_schema() {
  static const Config::Schema schema = {
      {"run", {"seed", "threads"}},
      {"potential", {"kind", "a", "coefficients", "table"}},
      {"ensemble", {"field", "beta"}},
      {"grid", {"lo", "hi", "nodes", "x_lo", "x_hi", "y_lo", "y_hi", "nx", "ny"}},
      {"region", {"kind", "lo", "hi", "intervals", "center", "radius", "vertices", "corner", "side"}},
      {"solver", {"el_tolerance", "max_iterations", "support_threshold", "boundary_weight_limit", "check_domain"}},
      {"eqm", {"check_tolerance", "obstacle_tolerance", "erosion"}},
      {"gamma", {"xs", "mode"}},
      {"sampler", {"method", "n", "sweeps", "burn_in", "thinning", "step_scale", "adapt", "chains"}},
      {"tube", {"radii", "resolution"}},
      {"construct", {"density", "n", "ns", "bl_bound", "grid_cells"}},
      {"ldp", {"ns", "target", "resolution", "estimator"}},
  };
  return schema;
}

namespace {

void require(const Config& c, const std::string& section, const std::string& command) {
  if (!c.has_section(section)) fail("config", "command '" + command + "' needs a [" + section + "] section");
}

Point as_point(const std::vector<double>& v, const std::string& what) {
  if (v.size() != 2) fail("config", what + " must have two coordinates");
  return {v[0], v[1]};
}

Potential make_potential(const Config& c) {
  const std::string kind = c.text("potential", "kind");
  if (kind == "quadratic") return Potential::quadratic(c.number("potential", "a", 0.5));
  if (kind == "quartic") return Potential::quartic(c.number("potential", "a", 1.0));
  if (kind == "radial") return Potential::radial_polynomial(c.numbers("potential", "coefficients"));
  if (kind == "tabulated") {
    std::vector<std::pair<double, double>> table;
    for (const auto& r : c.rows("potential", "table")) {
      if (r.size() != 2) fail("config", "potential.table rows must be [x, V]");
      table.emplace_back(r[0], r[1]);
    }
    return Potential::tabulated(std::move(table));
  }
  fail("config", "unknown potential kind '" + kind + "'");
}

Grid make_grid(const Config& c) {
  if (c.has("grid", "lo") || c.has("grid", "hi"))
    return Grid::line(c.number("grid", "lo"), c.number("grid", "hi"), c.count("grid", "nodes", 0));
  const Box box{c.number("grid", "x_lo"), c.number("grid", "x_hi"), c.number("grid", "y_lo"),
                c.number("grid", "y_hi")};
  if (c.has("grid", "nodes")) return Grid::plane(box, c.count("grid", "nodes", 0));
  return Grid::plane(box, c.count("grid", "nx", 0), c.count("grid", "ny", 0));
}

Region make_region(const Config& c) {
  const std::string kind = c.text("region", "kind");
  if (kind == "interval") return Region::interval(c.number("region", "lo"), c.number("region", "hi"));
  if (kind == "intervals") {
    std::vector<Interval> iv;
    for (const auto& r : c.rows("region", "intervals")) {
      if (r.size() != 2) fail("config", "region.intervals rows must be [lo, hi]");
      iv.push_back({r[0], r[1]});
    }
    return Region::intervals(std::move(iv));
  }
  if (kind == "disk")
    return Region::disk(as_point(c.numbers("region", "center"), "region.center"), c.number("region", "radius"));
  if (kind == "square")
    return Region::square(as_point(c.numbers("region", "corner"), "region.corner"), c.number("region", "side"));
  if (kind == "polygon") {
    std::vector<Point> v;
    for (const auto& r : c.rows("region", "vertices")) v.push_back(as_point(r, "region.vertices"));
    return Region::polygon(std::move(v));
  }
  fail("config", "unknown region kind '" + kind + "'");
}

std::vector<std::size_t> counts(const std::vector<double>& v, const std::string& what) {
  std::vector<std::size_t> out;
  for (double x : v) {
    if (!(x >= 1.0) || x != std::floor(x)) fail("config", what + " entries must be positive integers");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

}  // namespace

SquareDensity make_density(const std::string& name) {
  if (name == "uniform") return SquareDensity::uniform_unit();
  if (name == "tilted") return SquareDensity::tilted_unit();
  fail("config", "unknown density '" + name + "' (expected uniform or tilted)");
}

RunConfig make_run_config(const std::string& command, const Config& c) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    fail("config", "unknown command '" + command + "'");
  c.validate(run_schema());

  RunConfig r;
  r.command = command;
  r.effective = c;
  r.seed = c.seed("run", "seed", 0);
  const std::size_t threads = c.count("run", "threads", 1);
  if (threads < 1) fail("config", "run.threads must be at least 1");
  r.threads = static_cast<unsigned>(threads);

  const bool needs_model = command == "eqm" || command == "gamma" || command == "sample" || command == "crowd" ||
                           command == "ldp";
  const bool needs_grid = command == "eqm" || command == "gamma" || command == "ldp";
  const bool needs_region = command == "gamma" || command == "crowd" || command == "tube" || command == "ldp";
  const bool needs_sampler = command == "sample" || command == "crowd" || command == "ldp";

  if (needs_model) {
    require(c, "potential", command);
    require(c, "ensemble", command);
  }
  if (c.has_section("potential")) r.potential = make_potential(c);
  const std::string field = c.text("ensemble", "field", "real");
  if (field != "real" && field != "complex") fail("config", "ensemble.field must be real or complex");
  r.field = field == "real" ? Field::Real : Field::Complex;
  r.beta = c.number("ensemble", "beta", 2.0);
  if (!(r.beta > 0.0)) fail("parameter", "ensemble.beta must be positive");
  const int dim = r.field == Field::Real ? 1 : 2;

  if (needs_grid) require(c, "grid", command);
  if (c.has_section("grid")) {
    r.grid = make_grid(c);
    if (needs_model && r.grid->dimension() != dim) fail("dimension", "grid dimension does not match ensemble.field");
  }
  if (needs_region) require(c, "region", command);
  if (c.has_section("region")) {
    r.region = make_region(c);
    if (needs_model && r.region->dimension() != dim)
      fail("dimension", "region dimension does not match ensemble.field");
    if (command == "tube" && r.region->dimension() != 2) fail("dimension", "tube needs a planar region");
  }

  r.solver.el_tolerance = c.number("solver", "el_tolerance", r.solver.el_tolerance);
  r.solver.max_iterations = c.count("solver", "max_iterations", r.solver.max_iterations);
  r.solver.support_threshold = c.number("solver", "support_threshold", r.solver.support_threshold);
  r.solver.boundary_weight_limit = c.number("solver", "boundary_weight_limit", r.solver.boundary_weight_limit);
  r.solver.check_domain = c.flag("solver", "check_domain", r.solver.check_domain);
  if (!(r.solver.el_tolerance > 0.0)) fail("parameter", "solver.el_tolerance must be positive");

  r.el_check_tolerance = c.number("eqm", "check_tolerance", r.el_check_tolerance);
  r.obstacle_tolerance = c.number("eqm", "obstacle_tolerance", r.obstacle_tolerance);
  r.erosion = c.count("eqm", "erosion", r.erosion);

  if (command == "gamma" || command == "ldp") {
    if (!c.has("gamma", "xs")) fail("config", "command '" + command + "' needs gamma.xs");
    r.xs = c.numbers("gamma", "xs");
    for (double x : r.xs)
      if (x < 0.0 || x > 1.0) fail("parameter", "gamma.xs must lie in [0, 1]");
  }
  const std::string mode = c.text("gamma", "mode", "serial");
  if (mode != "serial" && mode != "parallel") fail("config", "gamma.mode must be serial or parallel");
  r.sweep_mode = mode == "serial" ? SweepMode::SerialWarmStart : SweepMode::ParallelColdStart;

  if (needs_sampler) require(c, "sampler", command);
  r.sampler_method = c.text("sampler", "method", "metropolis");
  if (r.sampler_method != "metropolis" && r.sampler_method != "tridiagonal")
    fail("config", "sampler.method must be metropolis or tridiagonal");
  r.sampler.field = r.field;
  r.sampler.beta = r.beta;
  if (r.potential) r.sampler.potential = *r.potential;
  r.sampler.n = c.count("sampler", "n", r.sampler.n);
  r.sampler.sweeps = c.count("sampler", "sweeps", r.sampler.sweeps);
  r.sampler.burn_in = c.count("sampler", "burn_in", r.sampler.burn_in);
  r.sampler.thinning = c.count("sampler", "thinning", r.sampler.thinning);
  r.sampler.step_scale = c.number("sampler", "step_scale", r.sampler.step_scale);
  r.sampler.adapt = c.flag("sampler", "adapt", r.sampler.adapt);
  r.sampler.chains = c.count("sampler", "chains", r.sampler.chains);
  r.sampler.seed = r.seed;
  r.sampler.threads = r.threads;
  if (needs_sampler) {
    if (r.sampler.n < 1) fail("parameter", "sampler.n must be at least 1");
    if (!(r.sampler.step_scale > 0.0)) fail("parameter", "sampler.step_scale must be positive");
    if (r.sampler.sweeps <= r.sampler.burn_in) fail("parameter", "sampler.sweeps must exceed sampler.burn_in");
    if (r.sampler.thinning < 1 || r.sampler.chains < 1) fail("parameter", "thinning and chains must be positive");
    if (r.sampler_method == "tridiagonal" && r.field != Field::Real)
      fail("config", "the tridiagonal sampler is real-only");
  }

  if (command == "tube") {
    r.radii = c.has("tube", "radii") ? c.numbers("tube", "radii") : std::vector<double>{0.1, 0.05, 0.025};
    r.tube_resolution = c.count("tube", "resolution", r.tube_resolution);
  }

  if (command == "construct") {
    require(c, "construct", command);
    r.density = c.text("construct", "density", r.density);
    r.construct_n = c.count("construct", "n", r.construct_n);
    if (r.construct_n < 1) fail("parameter", "construct.n must be at least 1");
    if (c.has("construct", "ns")) r.construct_ns = counts(c.numbers("construct", "ns"), "construct.ns");
    r.bl_bound = c.number("construct", "bl_bound", r.bl_bound);
    r.density_grid = c.count("construct", "grid_cells", r.density_grid);
    make_density(r.density);
  }

  if (command == "ldp") {
    require(c, "ldp", command);
    r.ldp_ns = counts(c.numbers("ldp", "ns"), "ldp.ns");
    for (const auto& row : c.rows("ldp", "target")) {
      if (row.size() != 2) fail("config", "ldp.target rows must be [lo, hi]");
      r.target.push_back({row[0], row[1]});
    }
    r.resolution = c.number("ldp", "resolution", r.resolution);
    r.estimator = parse_ldp_estimator(c.text("ldp", "estimator", "direct"));
    TargetSet check(r.target);
  }
  return r;
}

}  // namespace crowdrate
