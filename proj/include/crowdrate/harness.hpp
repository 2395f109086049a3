#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crowdrate/equilibrium.hpp"
#include "crowdrate/region.hpp"
#include "crowdrate/sampler.hpp"

namespace crowdrate {

// Finite union of closed intervals in [0, 1]; a degenerate interval is a point.
class TargetSet {
public:
  explicit TargetSet(std::vector<Interval> intervals);
  static TargetSet point(double x) { return TargetSet({{x, x}}); }

  bool contains(double x) const;
  // Whether k / n lies in the set.
  bool contains_fraction(std::size_t k, std::size_t n) const;
  const std::vector<Interval>& intervals() const { return intervals_; }
  std::string id() const;

private:
  std::vector<Interval> intervals_;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

WilsonInterval wilson_interval(std::size_t hits, std::size_t trials, double z = 1.96);

// P(X_n / n in A) from a crowding histogram.
double event_probability(const CrowdingStats& stats, const TargetSet& target);

// Smallest finite gamma over profile nodes inside A (0 when x* is in A);
// nullopt when no node of the profile lies in A.
std::optional<double> infimum_over(const RateProfile& profile, const TargetSet& target);

// Direct: plain Metropolis frequencies, limited to probabilities above about
// 1 / trials. Windowed: the chained window estimate of windowed_crowding,
// which reaches far-tail events.
enum class LdpEstimator { Direct, Windowed };

std::string to_string(LdpEstimator e);
LdpEstimator parse_ldp_estimator(const std::string& name);

struct LdpConfig {
  SamplerConfig sampler;  // n is set per row; seeds derive from sampler.seed
  Region region = Region::empty_line();
  TargetSet target = TargetSet::point(0.0);
  std::vector<std::size_t> ns;
  double resolution = 1e-4;  // smallest probability the run claims to see
  unsigned threads = 1;      // rows run concurrently
  LdpEstimator estimator = LdpEstimator::Direct;
};

struct LdpRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t hits = 0;
  double p_hat = 0.0;
  double se = 0.0;
  double log_p_hat = 0.0;        // -infinity when unobserved
  double log_se = 0.0;           // standard error of log_p_hat, 0 when unobserved
  WilsonInterval wilson;
  std::optional<double> slope;   // -log_p_hat / n^2 when observed
  double slope_lower_bound = 0;  // -log(wilson.hi) / n^2, always defined
  double predicted = 0.0;        // exp(-n^2 inf_A gamma)
  CrowdingStats stats;                  // direct estimator only
  std::vector<double> log_law;          // windowed estimator only: log P(X = k)
};

struct LdpReport {
  std::vector<LdpRow> rows;
  double gamma_inf = 0.0;
  double x_star = 0.0;
  bool typical = false;  // x* in A
  std::string verdict;   // "consistent", "unobserved, consistent", "inconsistent", "unobserved, inconclusive"
  bool consistent = false;
  std::vector<std::string> caveats;
};

LdpReport run_ldp_experiment(const LdpConfig& cfg, const RateProfile& profile);

void write_ldp_csv(std::ostream& out, const LdpReport& report);
void write_ldp_json(std::ostream& out, const LdpConfig& cfg, const LdpReport& report);

struct PartitionReport {
  double c_beta = 0.0;
  double normalized_infimum = 0.0;  // inf I_beta with the c_beta shift, 0 by construction
  double predicted_limit = 0.0;     // -c_beta for n^-2 log Z, unnormalised convention
  bool converged = false;
  std::string caveat;
};

PartitionReport partition_asymptote_report(const Potential& v, double beta, const Grid& grid,
                                           const SolverOptions& opts = {});
PartitionReport partition_asymptote_report(const EquilibriumSolution& solved);

}  // namespace crowdrate
