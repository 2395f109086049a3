#include "crowdrate/sampler.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "crowdrate/error.hpp"

namespace crowdrate {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double squared_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::vector<Point> initial_state(Field field, std::size_t n) {
  std::vector<Point> s(n);
  const double nd = static_cast<double>(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / nd;
    if (field == Field::Real) {
      s[i] = {-2.0 + 4.0 * t, 0.0};
    } else {
      const double r = std::sqrt(t), th = golden * static_cast<double>(i);
      s[i] = {r * std::cos(th), r * std::sin(th)};
    }
  }
  return s;
}

void validate(const SamplerConfig& cfg) {
  if (cfg.n < 1) fail("parameter", "n must be at least 1");
  if (!(cfg.beta > 0.0)) fail("parameter", "beta must be positive");
  if (!(cfg.step_scale > 0.0)) fail("parameter", "step_scale must be positive");
  if (cfg.sweeps <= cfg.burn_in) fail("parameter", "sweeps must exceed burn_in");
  if (cfg.thinning < 1) fail("parameter", "thinning must be at least 1");
  if (cfg.chains < 1) fail("parameter", "chains must be at least 1");
  if (!cfg.initial.empty()) {
    if (cfg.initial.size() != cfg.n) fail("parameter", "initial state must have n points");
    for (std::size_t i = 0; i < cfg.n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (squared_distance(cfg.initial[i], cfg.initial[j]) == 0.0)
          fail("parameter", "initial points must be distinct");
  }
  if (cfg.field == Field::Complex && !cfg.potential.plane_admissible())
    fail("potential", "potential is not admissible on the plane");
}

// Runs body(c) for every chain, on up to cfg.threads threads. The first
// exception is rethrown after all workers finish.
void for_each_chain(const SamplerConfig& cfg, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, cfg.chains);
  if (workers == 1) {
    for (std::size_t c = 0; c < cfg.chains; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t c; (c = next.fetch_add(1)) < cfg.chains;) {
        try {
          body(c);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ChainSummary run_chain(const SamplerConfig& cfg, std::size_t chain, const SampleSink& sink) {
  std::mt19937_64 rng(substream_seed(cfg.seed, "metropolis", chain));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double nd = static_cast<double>(cfg.n);
  double step = cfg.step_scale / std::sqrt(nd);

  std::vector<Point> state = cfg.initial.empty() ? initial_state(cfg.field, cfg.n) : cfg.initial;
  ChainSummary summary;
  summary.chain_id = chain;

  std::size_t burn_accepted = 0, window_accepted = 0, kept_accepted = 0, kept_steps = 0;
  constexpr std::size_t kWindow = 50;
  EnsembleSample sample;
  sample.field = cfg.field;
  sample.n = cfg.n;
  sample.beta = cfg.beta;
  sample.potential_id = cfg.potential.id();
  sample.chain_id = chain;
  sample.seed = cfg.seed;

  for (std::size_t sweep = 0; sweep < cfg.sweeps; ++sweep) {
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      Point prop = state[i];
      prop.x += step * normal(rng);
      if (cfg.field == Field::Complex) prop.y += step * normal(rng);
      const double u = uniform(rng);
      if (metropolis_step(state, i, prop, u, cfg.potential, cfg.beta)) ++accepted;
    }
    if (sweep < cfg.burn_in) {
      burn_accepted += accepted;
      window_accepted += accepted;
      if (cfg.adapt && (sweep + 1) % kWindow == 0) {
        const double rate = static_cast<double>(window_accepted) / static_cast<double>(kWindow * cfg.n);
        if (rate < 0.3) step *= 0.8;
        else if (rate > 0.6) step *= 1.25;
        window_accepted = 0;
      }
      if (sweep + 1 == cfg.burn_in) {
        summary.burn_in_acceptance =
            static_cast<double>(burn_accepted) / static_cast<double>(cfg.burn_in * cfg.n);
        summary.step_warning = summary.burn_in_acceptance < 0.05 || summary.burn_in_acceptance > 0.95;
      }
      continue;
    }
    kept_accepted += accepted;
    kept_steps += cfg.n;
    if ((sweep - cfg.burn_in) % cfg.thinning != 0) continue;
    sample.points = state;
    sample.sweep_index = sweep;
    sample.acceptance_rate = static_cast<double>(kept_accepted) / static_cast<double>(kept_steps);
    sample.step_warning = summary.step_warning;
    ++summary.retained;
    if (sink) sink(sample);
  }
  summary.final_step = step;
  summary.acceptance_rate = kept_steps ? static_cast<double>(kept_accepted) / static_cast<double>(kept_steps) : 0.0;
  return summary;
}

}  // namespace

std::string to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

std::uint64_t substream_seed(std::uint64_t seed, std::string_view name, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  for (char c : name) h = splitmix64(h ^ static_cast<unsigned char>(c));
  return splitmix64(h ^ index);
}

double log_density(const std::vector<Point>& points, const Potential& V, double beta, std::size_t n) {
  const double nd = static_cast<double>(n);
  double pair = 0.0, field = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    field += V(points[i]);
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d2 = squared_distance(points[i], points[j]);
      if (d2 == 0.0) return kNegInf;
      pair += 0.5 * std::log(d2);
    }
  }
  return beta * pair - nd * field;
}

double log_acceptance(const std::vector<Point>& state, std::size_t i, const Point& proposal, const Potential& V,
                      double beta) {
  const double nd = static_cast<double>(state.size());
  double pair = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (j == i) continue;
    const double dn = squared_distance(proposal, state[j]);
    if (dn == 0.0) return kNegInf;
    pair += std::log(dn / squared_distance(state[i], state[j]));
  }
  const double dv = V(proposal) - V(state[i]);
  if (!std::isfinite(dv)) return kNegInf;
  return 0.5 * beta * pair - nd * dv;
}

bool metropolis_step(std::vector<Point>& state, std::size_t i, const Point& proposal, double u,
                     const Potential& V, double beta) {
  const double lr = log_acceptance(state, i, proposal, V, beta);
  if (lr >= 0.0 || std::log(u) < lr) {
    state[i] = proposal;
    return true;
  }
  return false;
}

std::vector<ChainSummary> mh_visit(const SamplerConfig& cfg, const std::function<SampleSink(std::size_t)>& make_sink) {
  validate(cfg);
  std::vector<SampleSink> sinks;
  for (std::size_t c = 0; c < cfg.chains; ++c) sinks.push_back(make_sink ? make_sink(c) : SampleSink{});
  std::vector<ChainSummary> out(cfg.chains);

  for_each_chain(cfg, [&](std::size_t c) { out[c] = run_chain(cfg, c, sinks[c]); });
  return out;
}

std::vector<EnsembleSample> mh_sample(const SamplerConfig& cfg) {
  std::vector<std::vector<EnsembleSample>> per_chain(cfg.chains);
  mh_visit(cfg, [&](std::size_t c) -> SampleSink {
    return [&per_chain, c](const EnsembleSample& s) { per_chain[c].push_back(s); };
  });
  std::vector<EnsembleSample> merged;
  for (auto& chain : per_chain)
    for (auto& s : chain) merged.push_back(std::move(s));
  return merged;
}

std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag, const std::vector<double>& off) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (off.size() + 1 != n) fail("eigensolver", "off-diagonal length must be n - 1");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) fail("eigensolver", "non-finite matrix entries");
  const double pivmin = std::numeric_limits<double>::min();

  // Number of eigenvalues strictly below x.
  auto count_below = [&](double x) {
    std::size_t count = 0;
    double q = diag[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::abs(q) < pivmin) q = -pivmin;
      q = diag[i] - x - off[i - 1] * off[i - 1] / q;
      if (q < 0.0) ++count;
    }
    return count;
  };

  std::vector<double> eig(n);
  const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
  for (std::size_t k = 0; k < n; ++k) {
    double a = lo - 1e-12 * scale, b = hi + 1e-12 * scale;
    int iter = 0;
    while (b - a > 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      if (++iter > 200) fail("eigensolver", "bisection did not converge");
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      if (count_below(mid) > k) b = mid;
      else a = mid;
    }
    eig[k] = 0.5 * (a + b);
  }
  return eig;
}

EnsembleSample tridiagonal_sample(std::size_t n, double beta, std::mt19937_64& rng) {
  if (n < 1) fail("parameter", "n must be at least 1");
  if (!(beta > 0.0)) fail("parameter", "beta must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> diag(n), off(n - 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // Entries N(0, 2) / sqrt 2 on the diagonal, chi_{beta (n - i)} / sqrt 2 off it.
  for (std::size_t i = 0; i < n; ++i) diag[i] = normal(rng);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::gamma_distribution<double> gamma(0.5 * beta * static_cast<double>(n - 1 - i), 2.0);
    off[i] = std::sqrt(gamma(rng)) * inv_sqrt2;
  }
  EnsembleSample s;
  s.field = Field::Real;
  s.n = n;
  s.beta = beta;
  s.potential_id = "gaussian-fast-path";
  s.acceptance_rate = 1.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double e : tridiagonal_eigenvalues(diag, off)) s.points.push_back({e * scale, 0.0});
  return s;
}

EnsembleSample tridiagonal_sample(std::size_t n, double beta, std::uint64_t seed) {
  std::mt19937_64 rng(substream_seed(seed, "tridiagonal", 0));
  EnsembleSample s = tridiagonal_sample(n, beta, rng);
  s.seed = seed;
  return s;
}

void tridiagonal_visit(std::size_t n, double beta, std::uint64_t seed, std::size_t count, const SampleSink& sink) {
  std::mt19937_64 rng(substream_seed(seed, "tridiagonal", 0));
  for (std::size_t i = 0; i < count; ++i) {
    EnsembleSample s = tridiagonal_sample(n, beta, rng);
    s.seed = seed;
    s.sweep_index = i;
    sink(s);
  }
}

std::size_t crowding_count(const EnsembleSample& sample, const Region& U) {
  const int dim = sample.field == Field::Real ? 1 : 2;
  if (dim != U.dimension()) fail("dimension", "sample and region dimensions differ");
  std::size_t k = 0;
  for (const auto& p : sample.points)
    if (U.contains(p)) ++k;
  return k;
}

double CrowdingStats::frequency(std::size_t k) const {
  if (sweeps_used == 0 || k >= counts.size()) return 0.0;
  return static_cast<double>(counts[k]) / static_cast<double>(sweeps_used);
}

std::vector<double> CrowdingStats::frequencies() const {
  std::vector<double> f(counts.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = frequency(k);
  return f;
}

CrowdingStats crowding_distribution(const std::vector<EnsembleSample>& stream, const Region& U,
                                    std::size_t thinning) {
  if (stream.empty()) fail("parameter", "empty sample stream");
  if (thinning < 1) fail("parameter", "thinning must be at least 1");
  CrowdingStats st;
  st.n = stream.front().n;
  st.region_id = U.id();
  st.thinning = thinning;
  st.counts.assign(st.n + 1, 0);
  for (std::size_t i = 0; i < stream.size(); i += thinning) {
    ++st.counts[crowding_count(stream[i], U)];
    ++st.sweeps_used;
  }
  return st;
}

CrowdingStats mh_crowding(const SamplerConfig& cfg, const Region& U) {
  const int dim = cfg.field == Field::Real ? 1 : 2;
  if (dim != U.dimension()) fail("dimension", "sampler field and region dimensions differ");
  std::vector<std::vector<std::size_t>> per_chain(cfg.chains, std::vector<std::size_t>(cfg.n + 1, 0));
  mh_visit(cfg, [&](std::size_t c) -> SampleSink {
    return [&per_chain, &U, c](const EnsembleSample& s) { ++per_chain[c][crowding_count(s, U)]; };
  });
  CrowdingStats st;
  st.n = cfg.n;
  st.region_id = U.id();
  st.thinning = cfg.thinning;
  st.counts.assign(cfg.n + 1, 0);
  for (const auto& h : per_chain)
    for (std::size_t k = 0; k <= cfg.n; ++k) {
      st.counts[k] += h[k];
      st.sweeps_used += h[k];
    }
  return st;
}

CrowdingStats tridiagonal_crowding(std::size_t n, double beta, std::uint64_t seed, std::size_t count,
                                   const Region& U) {
  CrowdingStats st;
  st.n = n;
  st.region_id = U.id();
  st.counts.assign(n + 1, 0);
  tridiagonal_visit(n, beta, seed, count, [&](const EnsembleSample& s) {
    ++st.counts[crowding_count(s, U)];
    ++st.sweeps_used;
  });
  return st;
}

namespace {

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Cumulative sums of the window ratios, normalised to a log law.
std::vector<double> law_from_ratios(const std::vector<double>& ratios) {
  std::vector<double> lp(ratios.size() + 1, 0.0);
  for (std::size_t k = 0; k < ratios.size(); ++k) lp[k + 1] = lp[k] + ratios[k];
  double z = kNegInf;
  for (double v : lp) z = log_sum_exp(z, v);
  for (double& v : lp) v -= z;
  return lp;
}

// log P(k+1) - log P(k) for k = 0..n-1 from one chain.
std::vector<double> window_log_ratios(const SamplerConfig& cfg, std::size_t chain, const Region& U) {
  constexpr std::size_t kMaxRounds = 64;
  constexpr double kBiasStep = 4.0;
  // A fraction of updates propose a uniform point in a fixed box, so a point
  // far outside U can re-enter in one move. The proposal is symmetric between
  // points of the box; moves from outside it are rejected.
  constexpr double kJumpRate = 0.2;
  constexpr double kJumpBox = 3.0;
  std::mt19937_64 rng(substream_seed(cfg.seed, "windowed", chain));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uniform_real_distribution<double> in_box(-kJumpBox, kJumpBox);
  const double base_step = cfg.step_scale / std::sqrt(static_cast<double>(cfg.n));
  const bool plane = cfg.field == Field::Complex;

  double step = base_step;
  auto propose = [&](const Point& p) {
    Point q = p;
    q.x += step * normal(rng);
    if (plane) q.y += step * normal(rng);
    return q;
  };
  auto count_in = [&](const std::vector<Point>& s) {
    return static_cast<std::size_t>(std::ranges::count_if(s, [&](const Point& p) { return U.contains(p); }));
  };

  std::vector<Point> start = cfg.initial.empty() ? initial_state(cfg.field, cfg.n) : cfg.initial;
  for (std::size_t sweep = 0; sweep < cfg.burn_in; ++sweep)
    for (std::size_t i = 0; i < cfg.n; ++i) {
      const Point q = propose(start[i]);
      metropolis_step(start, i, q, uniform(rng), cfg.potential, cfg.beta);
    }
  const std::size_t mode = count_in(start);

  struct Visits {
    std::array<std::size_t, 2> count{0, 0};
    double acceptance = 0.0;
  };
  // Runs `sweeps` sweeps confined to counts {k, k+1} under bias b on count
  // k+1, keeping the last state whose count is `want`.
  auto run_window = [&](std::vector<Point>& s, std::size_t k, double b, std::size_t sweeps, std::size_t want,
                        std::vector<Point>& kept) {
    Visits v;
    std::size_t c = count_in(s), accepted = 0;
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
      for (std::size_t i = 0; i < cfg.n; ++i) {
        const bool jump = uniform(rng) < kJumpRate;
        const Point q = jump ? Point{in_box(rng), plane ? in_box(rng) : 0.0} : propose(s[i]);
        const double u = uniform(rng);
        if (jump && (std::abs(s[i].x) > kJumpBox || std::abs(s[i].y) > kJumpBox)) continue;
        const std::size_t c1 = c - U.contains(s[i]) + U.contains(q);
        if (c1 < k || c1 > k + 1) continue;
        const double tilt = (c1 == k + 1 ? b : 0.0) - (c == k + 1 ? b : 0.0);
        const double lr = log_acceptance(s, i, q, cfg.potential, cfg.beta) + tilt;
        if (lr >= 0.0 || std::log(u) < lr) {
          s[i] = q;
          c = c1;
          ++accepted;
        }
      }
      ++v.count[c - k];
      if (c == want) kept = s;
    }
    v.acceptance = static_cast<double>(accepted) / static_cast<double>(sweeps * cfg.n);
    return v;
  };

  // Tuning rounds adapt the step and the bias; two consecutive balanced
  // rounds end tuning.
  std::vector<double> ratios(cfg.n, 0.0);
  auto solve_window = [&](std::vector<Point>& s, std::size_t k, std::size_t want) {
    const std::size_t round = std::max<std::size_t>(cfg.burn_in, 100);
    std::vector<Point> kept;
    double b = 0.0;
    std::size_t balanced = 0;
    step = base_step;
    for (std::size_t r = 0; r < kMaxRounds && balanced < 2; ++r) {
      const Visits v = run_window(s, k, b, round, want, kept);
      if (v.acceptance < 0.2) step *= 0.7;
      else if (v.acceptance > 0.5) step = std::min(step * 1.4, base_step);
      if (v.count[1] == 0) b += kBiasStep;
      else if (v.count[0] == 0) b -= kBiasStep;
      else {
        const double shift = std::log(static_cast<double>(v.count[0]) / static_cast<double>(v.count[1]));
        b += std::clamp(shift, -kBiasStep, kBiasStep);
        balanced = std::abs(shift) < 1.0 ? balanced + 1 : 0;
        continue;
      }
      balanced = 0;
    }
    kept.clear();
    const Visits v = run_window(s, k, b, cfg.sweeps - cfg.burn_in, want, kept);
    if (v.count[0] == 0 || v.count[1] == 0)
      fail("sampler", "window {" + std::to_string(k) + ", " + std::to_string(k + 1) + "} visited only one count");
    ratios[k] = std::log(static_cast<double>(v.count[1]) / static_cast<double>(v.count[0])) - b;
    s = std::move(kept);
  };

  std::vector<Point> up = start;
  for (std::size_t k = mode; k < cfg.n; ++k) solve_window(up, k, k + 1);
  std::vector<Point> down = std::move(start);
  for (std::size_t k = mode; k-- > 0;) solve_window(down, k, k);
  return ratios;
}

}  // namespace

double CountLaw::log_tail(const std::function<bool(std::size_t)>& keep) const {
  double t = kNegInf;
  for (std::size_t k = 0; k < log_probabilities.size(); ++k)
    if (keep(k)) t = log_sum_exp(t, log_probabilities[k]);
  return t;
}

double CountLaw::log_tail_se(const std::function<bool(std::size_t)>& keep) const {
  const std::size_t m = chain_log_probabilities.size();
  if (m < 2) return 0.0;
  std::vector<double> tails;
  for (const auto& law : chain_log_probabilities) {
    double t = kNegInf;
    for (std::size_t k = 0; k < law.size(); ++k)
      if (keep(k)) t = log_sum_exp(t, law[k]);
    tails.push_back(t);
  }
  double mean = 0.0, ss = 0.0;
  for (double t : tails) mean += t / static_cast<double>(m);
  for (double t : tails) ss += (t - mean) * (t - mean);
  return std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
}

CountLaw windowed_crowding(const SamplerConfig& cfg, const Region& U) {
  validate(cfg);
  const int dim = cfg.field == Field::Real ? 1 : 2;
  if (dim != U.dimension()) fail("dimension", "sampler field and region dimensions differ");
  std::vector<std::vector<double>> ratios(cfg.chains);
  for_each_chain(cfg, [&](std::size_t c) { ratios[c] = window_log_ratios(cfg, c, U); });

  CountLaw law;
  law.n = cfg.n;
  law.sweeps_per_window = cfg.sweeps - cfg.burn_in;
  std::vector<double> pooled(cfg.n, 0.0);
  for (const auto& r : ratios) {
    law.chain_log_probabilities.push_back(law_from_ratios(r));
    for (std::size_t k = 0; k < cfg.n; ++k) pooled[k] += r[k] / static_cast<double>(cfg.chains);
  }
  law.log_probabilities = law_from_ratios(pooled);
  return law;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < std::max(p.size(), q.size()); ++k)
    s += std::abs((k < p.size() ? p[k] : 0.0) - (k < q.size() ? q[k] : 0.0));
  return 0.5 * s;
}

void write_samples_csv(std::ostream& out, const std::vector<EnsembleSample>& samples) {
  const bool complex = !samples.empty() && samples.front().field == Field::Complex;
  const auto old = out.precision(17);
  out << (complex ? "chain,sweep,k,coord_x,coord_y\n" : "chain,sweep,k,coord_x\n");
  for (const auto& s : samples)
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      out << s.chain_id << ',' << s.sweep_index << ',' << k << ',' << s.points[k].x;
      if (complex) out << ',' << s.points[k].y;
      out << '\n';
    }
  out.precision(old);
}

void write_crowding_csv(std::ostream& out, const CrowdingStats& stats) {
  const auto old = out.precision(17);
  out << "count,frequency\n";
  for (std::size_t k = 0; k < stats.counts.size(); ++k) out << k << ',' << stats.frequency(k) << '\n';
  out.precision(old);
}

}  // namespace crowdrate
