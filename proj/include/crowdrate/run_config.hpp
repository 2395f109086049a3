#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdrate/config.hpp"
#include "crowdrate/construction.hpp"
#include "crowdrate/equilibrium.hpp"
#include "crowdrate/grid.hpp"
#include "crowdrate/harness.hpp"
#include "crowdrate/potential.hpp"
#include "crowdrate/region.hpp"
#include "crowdrate/sampler.hpp"

namespace crowdrate {

inline const std::vector<std::string> kCommands = {"eqm",       "gamma", "sample", "crowd", "tube",
                                                   "construct", "ldp",   "oracle"};

const Config::Schema& run_schema();

// Typed, validated view of a run. Sections a command does not use may be
// present but are still checked against the schema.
struct RunConfig {
  std::string command;
  Config effective;  // after overrides; echoed into the manifest
  std::uint64_t seed = 0;
  unsigned threads = 1;

  Field field = Field::Real;
  double beta = 2.0;
  std::optional<Potential> potential;
  std::optional<Grid> grid;
  std::optional<Region> region;
  SolverOptions solver;

  double el_check_tolerance = 0.02;
  double obstacle_tolerance = 0.05;
  std::size_t erosion = 3;

  std::vector<double> xs;
  SweepMode sweep_mode = SweepMode::SerialWarmStart;

  std::string sampler_method = "metropolis";
  SamplerConfig sampler;

  std::vector<double> radii;
  std::size_t tube_resolution = 1024;

  std::string density = "uniform";
  std::size_t construct_n = 16;
  std::vector<std::size_t> construct_ns;
  double bl_bound = 0.06;
  std::size_t density_grid = 64;

  std::vector<std::size_t> ldp_ns;
  std::vector<Interval> target;
  double resolution = 1e-4;
  LdpEstimator estimator = LdpEstimator::Direct;
};

// Throws Error("config") for unknown commands, sections, keys, missing
// required sections, or ill-typed values; other categories come from the
// constructors it calls.
RunConfig make_run_config(const std::string& command, const Config& cfg);

SquareDensity make_density(const std::string& name);

}  // namespace crowdrate
