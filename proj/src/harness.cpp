#include "crowdrate/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "crowdrate/error.hpp"

namespace crowdrate {

namespace {
constexpr double kFractionSlack = 1e-12;
}

TargetSet::TargetSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (const auto& iv : intervals_) {
    if (!(iv.lo <= iv.hi)) fail("parameter", "target interval must have lo <= hi");
    if (iv.lo < 0.0 || iv.hi > 1.0) fail("parameter", "target set must lie in [0, 1]");
  }
  std::sort(intervals_.begin(), intervals_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
}

bool TargetSet::contains(double x) const {
  for (const auto& iv : intervals_)
    if (x >= iv.lo - kFractionSlack && x <= iv.hi + kFractionSlack) return true;
  return false;
}

bool TargetSet::contains_fraction(std::size_t k, std::size_t n) const {
  return contains(static_cast<double>(k) / static_cast<double>(n));
}

std::string TargetSet::id() const {
  std::ostringstream s;
  s.precision(17);
  for (std::size_t i = 0; i < intervals_.size(); ++i)
    s << (i ? "u" : "") << '[' << intervals_[i].lo << ',' << intervals_[i].hi << ']';
  return s.str();
}

WilsonInterval wilson_interval(std::size_t hits, std::size_t trials, double z) {
  if (trials == 0) return {};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double event_probability(const CrowdingStats& stats, const TargetSet& target) {
  if (stats.sweeps_used == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < stats.counts.size(); ++k)
    if (target.contains_fraction(k, stats.n)) hits += stats.counts[k];
  return static_cast<double>(hits) / static_cast<double>(stats.sweeps_used);
}

std::string to_string(LdpEstimator e) { return e == LdpEstimator::Direct ? "direct" : "windowed"; }

LdpEstimator parse_ldp_estimator(const std::string& name) {
  if (name == "direct") return LdpEstimator::Direct;
  if (name == "windowed") return LdpEstimator::Windowed;
  fail("config", "unknown ldp estimator '" + name + "'");
}

std::optional<double> infimum_over(const RateProfile& profile, const TargetSet& target) {
  if (target.contains(profile.x_star)) return 0.0;
  std::optional<double> best;
  for (std::size_t i = 0; i < profile.xs.size(); ++i) {
    if (!target.contains(profile.xs[i]) || !std::isfinite(profile.gammas[i])) continue;
    best = best ? std::min(*best, profile.gammas[i]) : profile.gammas[i];
  }
  return best;
}

LdpReport run_ldp_experiment(const LdpConfig& cfg, const RateProfile& profile) {
  if (cfg.ns.empty()) fail("parameter", "n list is empty");
  for (std::size_t i = 1; i < cfg.ns.size(); ++i)
    if (cfg.ns[i] <= cfg.ns[i - 1]) fail("parameter", "n list must be increasing");
  const auto gamma_inf = infimum_over(profile, cfg.target);
  if (!gamma_inf) fail("parameter", "gamma profile has no node inside the target set");

  LdpReport report;
  report.gamma_inf = *gamma_inf;
  report.x_star = profile.x_star;
  report.typical = cfg.target.contains(profile.x_star);
  report.rows.resize(cfg.ns.size());

  auto run_row = [&](std::size_t i) {
    SamplerConfig sc = cfg.sampler;
    sc.n = cfg.ns[i];
    sc.seed = substream_seed(cfg.sampler.seed, "ldp", cfg.ns[i]);
    LdpRow row;
    row.n = sc.n;
    const double n2 = static_cast<double>(row.n) * static_cast<double>(row.n);
    if (cfg.estimator == LdpEstimator::Direct) {
      row.stats = mh_crowding(sc, cfg.region);
      row.trials = row.stats.sweeps_used;
      for (std::size_t k = 0; k < row.stats.counts.size(); ++k)
        if (cfg.target.contains_fraction(k, row.n)) row.hits += row.stats.counts[k];
      const double t = static_cast<double>(row.trials);
      row.p_hat = static_cast<double>(row.hits) / t;
      row.se = std::sqrt(row.p_hat * (1.0 - row.p_hat) / t);
      row.log_p_hat = row.hits > 0 ? std::log(row.p_hat) : -std::numeric_limits<double>::infinity();
      row.log_se = row.hits > 0 ? row.se / row.p_hat : 0.0;
      row.wilson = wilson_interval(row.hits, row.trials);
    } else {
      const CountLaw law = windowed_crowding(sc, cfg.region);
      const auto keep = [&](std::size_t k) { return cfg.target.contains_fraction(k, row.n); };
      row.trials = law.sweeps_per_window * sc.chains;
      row.log_law = law.log_probabilities;
      row.log_p_hat = law.log_tail(keep);
      row.log_se = law.log_tail_se(keep);
      row.p_hat = std::exp(row.log_p_hat);
      row.se = row.p_hat * row.log_se;
      row.wilson = {std::exp(row.log_p_hat - 1.96 * row.log_se),
                    std::min(1.0, std::exp(row.log_p_hat + 1.96 * row.log_se))};
    }
    if (std::isfinite(row.log_p_hat)) row.slope = -row.log_p_hat / n2;
    row.slope_lower_bound = -std::log(row.wilson.hi) / n2;
    row.predicted = std::exp(-n2 * report.gamma_inf);
    report.rows[i] = std::move(row);
  };

  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, cfg.ns.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < cfg.ns.size(); ++i) run_row(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cfg.ns.size();) {
          try {
            run_row(i);
          } catch (...) {
            std::lock_guard lock(m);
            if (!error) error = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  // Observed slopes must be positive and non-decreasing (rare events) or
  // non-increasing (typical events).
  std::vector<double> slopes;
  for (const auto& r : report.rows)
    if (r.slope) slopes.push_back(*r.slope);
  bool ordered = true;
  for (std::size_t i = 1; i < slopes.size(); ++i)
    ordered = ordered && (report.typical ? slopes[i] <= slopes[i - 1] : slopes[i] >= slopes[i - 1]);
  if (!report.typical)
    for (double s : slopes) ordered = ordered && s > 0.0;

  const LdpRow& last = report.rows.back();
  if (last.slope) {
    report.consistent = ordered;
    report.verdict = ordered ? "consistent" : "inconsistent";
  } else if (!report.typical && last.predicted < cfg.resolution && ordered) {
    report.consistent = true;
    report.verdict = "unobserved, consistent";
  } else {
    report.consistent = false;
    report.verdict = ordered ? "unobserved, inconclusive" : "inconsistent";
  }
  report.caveats = {
      "bounds have speed n^2 but pre-exponential factors dominate at these n; only direction and ordering are checked",
      "the closed-set condition for the upper bound in the complex case is assumed, not tested",
  };
  return report;
}

void write_ldp_csv(std::ostream& out, const LdpReport& report) {
  const auto old = out.precision(17);
  out << "n,p_hat,log_p_hat,se,slope,gamma_inf\n";
  for (const auto& r : report.rows) {
    out << r.n << ',' << r.p_hat << ',';
    if (std::isfinite(r.log_p_hat)) out << r.log_p_hat;
    else out << "-inf";
    out << ',' << r.se << ',';
    if (r.slope) out << *r.slope;
    else out << "inf";
    out << ',' << report.gamma_inf << '\n';
  }
  out.precision(old);
}

void write_ldp_json(std::ostream& out, const LdpConfig& cfg, const LdpReport& report) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row = {{"n", r.n},
                {"trials", r.trials},
                {"hits", r.hits},
                {"p_hat", r.p_hat},
                {"se", r.se},
                {"log_se", r.log_se},
                {"wilson", {r.wilson.lo, r.wilson.hi}},
                {"slope_lower_bound", r.slope_lower_bound},
                {"predicted", r.predicted},
                {"counts", r.stats.counts}};
    row["slope"] = r.slope ? json(*r.slope) : json(nullptr);
    row["log_p_hat"] = std::isfinite(r.log_p_hat) ? json(r.log_p_hat) : json("-inf");
    if (!r.log_law.empty()) row["log_law"] = r.log_law;
    rows.push_back(std::move(row));
  }
  json target = json::array();
  for (const auto& iv : cfg.target.intervals()) target.push_back({iv.lo, iv.hi});
  const json doc = {
      {"config",
       {{"field", to_string(cfg.sampler.field)},
        {"beta", cfg.sampler.beta},
        {"potential", cfg.sampler.potential.id()},
        {"region", cfg.region.id()},
        {"target", target},
        {"ns", cfg.ns},
        {"sweeps", cfg.sampler.sweeps},
        {"burn_in", cfg.sampler.burn_in},
        {"thinning", cfg.sampler.thinning},
        {"step_scale", cfg.sampler.step_scale},
        {"chains", cfg.sampler.chains},
        {"seed", cfg.sampler.seed},
        {"estimator", to_string(cfg.estimator)},
        {"resolution", cfg.resolution}}},
      {"rows", rows},
      {"gamma_reference", {{"gamma_inf", report.gamma_inf}, {"x_star", report.x_star}, {"typical", report.typical}}},
      {"verdicts", {{"verdict", report.verdict}, {"consistent", report.consistent}}},
      {"caveats", report.caveats},
  };
  out << doc.dump(2) << '\n';
}

PartitionReport partition_asymptote_report(const EquilibriumSolution& solved) {
  PartitionReport r;
  r.c_beta = solved.c_beta();
  r.converged = solved.converged;
  r.normalized_infimum = 0.0;
  r.predicted_limit = -r.c_beta;
  r.caveat =
      "with the c_beta-shifted rate the infimum is 0; the limit of n^-2 log Z is reported for the unshifted "
      "functional, -c_beta, and the convention is left open";
  return r;
}

PartitionReport partition_asymptote_report(const Potential& v, double beta, const Grid& grid,
                                           const SolverOptions& opts) {
  try {
    return partition_asymptote_report(solve_equilibrium(v, beta, grid, opts));
  } catch (const SolverError& e) {
    return partition_asymptote_report(e.best());
  }
}

}  // namespace crowdrate
