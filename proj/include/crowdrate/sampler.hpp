#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "crowdrate/point.hpp"
#include "crowdrate/potential.hpp"
#include "crowdrate/region.hpp"

namespace crowdrate {

enum class Field { Real, Complex };

std::string to_string(Field f);

// Seed of the named sub-stream `index` derived from a master seed.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name, std::uint64_t index);

struct EnsembleSample {
  Field field = Field::Real;
  std::size_t n = 0;
  double beta = 0.0;
  std::string potential_id;
  std::vector<Point> points;
  std::size_t chain_id = 0;
  std::uint64_t seed = 0;
  std::size_t sweep_index = 0;
  double acceptance_rate = 0.0;  // over retained sweeps so far
  bool step_warning = false;     // burn-in acceptance outside [0.05, 0.95]
};

// beta sum_{i<j} log|p_i - p_j| - n sum_i V(p_i); -infinity when two points
// coincide.
double log_density(const std::vector<Point>& points, const Potential& V, double beta, std::size_t n);

// Log acceptance ratio for moving site i of `state` to `proposal`.
double log_acceptance(const std::vector<Point>& state, std::size_t i, const Point& proposal, const Potential& V,
                      double beta);

// One Metropolis update of site i given the proposal and a uniform draw u in
// [0, 1). Returns whether the move was accepted.
bool metropolis_step(std::vector<Point>& state, std::size_t i, const Point& proposal, double u,
                     const Potential& V, double beta);

struct SamplerConfig {
  Field field = Field::Real;
  std::size_t n = 1;
  double beta = 2.0;
  Potential potential = Potential::quadratic(0.5);
  std::size_t sweeps = 1000;  // total, including burn-in
  std::size_t burn_in = 100;
  std::size_t thinning = 1;
  double step_scale = 1.0;  // proposal sd = step_scale / sqrt(n)
  bool adapt = false;       // tune the step during burn-in only
  std::uint64_t seed = 0;
  std::size_t chains = 1;
  std::size_t threads = 1;
  std::vector<Point> initial;  // starting state for every chain; empty = default layout
};

struct ChainSummary {
  std::size_t chain_id = 0;
  double final_step = 0.0;
  double burn_in_acceptance = 0.0;
  double acceptance_rate = 0.0;
  std::size_t retained = 0;
  bool step_warning = false;
};

using SampleSink = std::function<void(const EnsembleSample&)>;

// Runs every chain, each feeding its own sink (created up front, in chain
// order, by make_sink). Chains may run on separate threads; a sink only ever
// sees its own chain, in sweep order.
std::vector<ChainSummary> mh_visit(const SamplerConfig& cfg, const std::function<SampleSink(std::size_t)>& make_sink);

// All retained samples ordered by (chain, sweep).
std::vector<EnsembleSample> mh_sample(const SamplerConfig& cfg);

// Dumitriu-Edelman beta-Hermite model rescaled to the weight exp(-n sum x^2/2).
EnsembleSample tridiagonal_sample(std::size_t n, double beta, std::mt19937_64& rng);
EnsembleSample tridiagonal_sample(std::size_t n, double beta, std::uint64_t seed);
void tridiagonal_visit(std::size_t n, double beta, std::uint64_t seed, std::size_t count, const SampleSink& sink);

// Eigenvalues of the symmetric tridiagonal matrix by Sturm-sequence
// bisection, ascending. Throws Error("eigensolver") if bisection stalls.
std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag, const std::vector<double>& off);

std::size_t crowding_count(const EnsembleSample& sample, const Region& U);

struct CrowdingStats {
  std::size_t n = 0;
  std::string region_id;
  std::vector<std::size_t> counts;  // index k = number of points in U
  std::size_t sweeps_used = 0;
  std::size_t thinning = 1;

  double frequency(std::size_t k) const;
  std::vector<double> frequencies() const;
};

// Histogram over every `thinning`-th sample of the stream.
CrowdingStats crowding_distribution(const std::vector<EnsembleSample>& stream, const Region& U,
                                    std::size_t thinning = 1);

// Streaming version over a Metropolis run: chains are merged in chain order.
CrowdingStats mh_crowding(const SamplerConfig& cfg, const Region& U);
CrowdingStats tridiagonal_crowding(std::size_t n, double beta, std::uint64_t seed, std::size_t count,
                                   const Region& U);

// Law of the count X = #(points in U) on a log scale, down to probabilities far
// below what a direct run can resolve. Each window {k, k+1} is sampled by a
// chain confined to those two counts, with a bias tuned during burn-in so both
// are visited; the ratios P(k+1)/P(k) are then chained together. Windows are
// walked outward from the count reached after an unrestricted burn-in.
struct CountLaw {
  std::size_t n = 0;
  std::vector<double> log_probabilities;  // k = 0..n, normalised
  std::vector<std::vector<double>> chain_log_probabilities;  // one law per chain
  std::size_t sweeps_per_window = 0;  // retained, per chain

  // log P(keep(X)) from the pooled law, and its standard error over chains
  // (0 for a single chain).
  double log_tail(const std::function<bool(std::size_t)>& keep) const;
  double log_tail_se(const std::function<bool(std::size_t)>& keep) const;
};

// Uses sweeps - burn_in retained sweeps per window and chain; burn_in also
// sets the length of each bias-tuning round. Throws Error("sampler") when a
// window never visits one of its counts.
CountLaw windowed_crowding(const SamplerConfig& cfg, const Region& U);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

void write_samples_csv(std::ostream& out, const std::vector<EnsembleSample>& samples);
void write_crowding_csv(std::ostream& out, const CrowdingStats& stats);

}  // namespace crowdrate
