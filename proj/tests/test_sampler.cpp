#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "crowdrate/measures.hpp"
#include "crowdrate/sampler.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace crowdrate;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const Potential kHalfSquare = Potential::quadratic(0.5);

std::vector<Point> line_points(std::initializer_list<double> xs) {
  std::vector<Point> out;
  for (double x : xs) out.push_back({x, 0.0});
  return out;
}

SamplerConfig real_config(std::size_t n, std::size_t sweeps, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.n = n;
  cfg.sweeps = sweeps;
  cfg.burn_in = 1000;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("log_density") {
  const Potential zero = Potential::radial_polynomial({0.0});
  CHECK(log_density(line_points({0, 1}), zero, 2.0, 2) == 0.0);
  CHECK(log_density(line_points({-1, 1}), kHalfSquare, 2.0, 2) ==
        doctest::Approx(2 * std::log(2.0) - 2.0).epsilon(1e-14));
  CHECK(log_density(line_points({0.3, 0.3}), kHalfSquare, 2.0, 2) == -kInf);

  const std::vector<Point> pts = line_points({-0.7, 0.1, 0.4, 1.9});
  const double base = log_density(pts, kHalfSquare, 1.5, 4);
  CHECK(log_density(pts, kHalfSquare.shifted(0.3), 1.5, 4) == doctest::Approx(base - 4 * 4 * 0.3));
  std::vector<Point> permuted = {pts[2], pts[0], pts[3], pts[1]};
  CHECK(log_density(permuted, kHalfSquare, 1.5, 4) == doctest::Approx(base).epsilon(1e-14));

  const Point proposal{0.9, 0.0};
  std::vector<Point> moved = pts;
  moved[1] = proposal;
  CHECK(log_acceptance(pts, 1, proposal, kHalfSquare, 1.5) ==
        doctest::Approx(log_density(moved, kHalfSquare, 1.5, 4) - base).epsilon(1e-12));
}

TEST_CASE("metropolis step") {
  std::vector<Point> s = line_points({-1, 1});
  CHECK(metropolis_step(s, 0, {-0.5, 0.0}, 0.0, kHalfSquare, 2.0));
  CHECK(s[0].x == -0.5);
  CHECK_FALSE(metropolis_step(s, 0, {1.0, 0.0}, 0.0, kHalfSquare, 2.0));
  CHECK(s[0].x == -0.5);
  // A strongly uphill move is refused for u close to 1.
  CHECK_FALSE(metropolis_step(s, 0, {-6.0, 0.0}, 0.999, kHalfSquare, 2.0));
}

TEST_CASE("detailed balance on a five-point lattice") {
  const std::vector<double> states = {-2, -1, 0, 1, 2};
  std::vector<double> pi(5);
  double z = 0.0;
  for (std::size_t a = 0; a < 5; ++a) z += pi[a] = std::exp(log_density(line_points({states[a]}), kHalfSquare, 2.0, 1));
  for (double& p : pi) p /= z;

  std::mt19937_64 rng(substream_seed(5, "detailed-balance", 0));
  std::discrete_distribution<std::size_t> draw(pi.begin(), pi.end());
  std::uniform_int_distribution<std::size_t> other(0, 3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t trials = 400000;
  std::vector<std::vector<double>> joint(5, std::vector<double>(5, 0.0));
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t a = draw(rng);
    std::size_t b = other(rng);
    if (b >= a) ++b;
    std::vector<Point> s = line_points({states[a]});
    const bool moved = metropolis_step(s, 0, {states[b], 0.0}, unif(rng), kHalfSquare, 2.0);
    joint[a][moved ? b : a] += 1.0 / static_cast<double>(trials);
  }
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = a + 1; b < 5; ++b) {
      const double fab = joint[a][b], fba = joint[b][a];
      const double se = std::sqrt((fab + fba - (fab - fba) * (fab - fba)) / static_cast<double>(trials));
      CHECK(std::abs(fab - fba) <= 3 * se);
      const double exact = std::min(pi[a], pi[b]) / 4.0;
      CHECK(std::abs(fab - exact) <= 4 * std::sqrt(exact / static_cast<double>(trials)));
    }
}

TEST_CASE("one point second moment") {
  SamplerConfig cfg = real_config(1, 101000, 1);
  double sum = 0.0;
  std::size_t count = 0;
  mh_visit(cfg, [&](std::size_t) {
    return [&](const EnsembleSample& s) {
      sum += s.points[0].x * s.points[0].x;
      ++count;
    };
  });
  CHECK(count == 100000);
  const double oracle_moment = oracle::one_point_second_moment(kHalfSquare);
  CHECK(oracle_moment == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(sum / static_cast<double>(count) - oracle_moment) <= 0.05 * oracle_moment);

  double tsum = 0.0;
  tridiagonal_visit(1, 2.0, 4, 100000, [&](const EnsembleSample& s) { tsum += s.points[0].x * s.points[0].x; });
  CHECK(std::abs(tsum / 100000 - oracle_moment) <= 0.03 * oracle_moment);
}

TEST_CASE("two point gap histogram") {
  std::vector<double> edges;
  for (int i = 0; i <= 16; ++i) edges.push_back(0.25 * i);
  edges.push_back(16.0);
  const std::vector<double> exact = oracle::two_point_gap_histogram(kHalfSquare, 2.0, edges);
  std::vector<double> hist(exact.size(), 0.0);
  std::size_t count = 0;
  mh_visit(real_config(2, 101000, 2), [&](std::size_t) {
    return [&](const EnsembleSample& s) {
      const double gap = std::abs(s.points[0].x - s.points[1].x);
      const auto it = std::upper_bound(edges.begin(), edges.end(), gap);
      hist[static_cast<std::size_t>(it - edges.begin()) - 1] += 1.0;
      ++count;
    };
  });
  for (double& h : hist) h /= static_cast<double>(count);
  CHECK(total_variation(hist, exact) <= 0.05);
}

TEST_CASE("two point crowding against the oracle") {
  const Region half = Region::interval(0.0, kInf);
  const std::array<double, 3> exact = oracle::two_point_crowding(kHalfSquare, 2.0, {{0.0, kInf}});
  CHECK(exact[1] == doctest::Approx(0.5 + 1.0 / std::numbers::pi).epsilon(1e-8));
  SamplerConfig cfg = real_config(2, 60000, 3);
  cfg.chains = 2;
  const CrowdingStats stats = mh_crowding(cfg, half);
  CHECK(stats.sweeps_used == 2 * 59000);
  CHECK(total_variation(stats.frequencies(), {exact.begin(), exact.end()}) <= 0.02);
}

TEST_CASE("reflection symmetry of crowding") {
  SamplerConfig cfg = real_config(3, 41000, 9);
  cfg.chains = 2;
  const CrowdingStats stats = mh_crowding(cfg, Region::interval(0.0, kInf));
  for (std::size_t k = 0; k <= 3; ++k) CHECK(std::abs(stats.frequency(k) - stats.frequency(3 - k)) <= 0.02);
}

TEST_CASE("exchangeability of the initial state") {
  auto mean_max = [](const std::vector<Point>& initial) {
    SamplerConfig cfg = real_config(3, 21000, 17);
    cfg.chains = 4;
    cfg.initial = initial;
    double sum = 0.0;
    std::size_t count = 0;
    for (const EnsembleSample& s : mh_sample(cfg)) {
      sum += std::max({s.points[0].x, s.points[1].x, s.points[2].x});
      ++count;
    }
    return sum / static_cast<double>(count);
  };
  const double forward = mean_max(line_points({-1.5, 0.1, 1.7}));
  const double backward = mean_max(line_points({1.7, 0.1, -1.5}));
  CHECK(std::abs(forward - backward) <= 0.03);

  SamplerConfig bad = real_config(3, 2000, 1);
  bad.initial = line_points({0.0, 0.0, 1.0});
  CHECK_ERROR_CATEGORY(mh_sample(bad), "parameter");
}

TEST_CASE("crowding counts") {
  EnsembleSample s;
  s.n = 3;
  s.points = line_points({-1, 0.2, 3});
  CHECK(crowding_count(s, Region::interval(0, 1)) == 1);
  CHECK(crowding_count(s, Region::interval(-kInf, kInf)) == 3);
  CHECK(crowding_count(s, Region::empty_line()) == 0);
  CHECK(crowding_count(s, Region::interval(-1, 0.2)) == 0);
  CHECK_ERROR_CATEGORY(crowding_count(s, Region::disk({0, 0}, 1)), "dimension");

  const std::vector<EnsembleSample> stream = mh_sample(real_config(2, 1500, 4));
  const CrowdingStats one = crowding_distribution(stream, Region::interval(0, kInf), stream.size());
  CHECK(one.sweeps_used == 1);
  std::size_t total = 0;
  for (std::size_t c : one.counts) total += c;
  CHECK(total == 1);
  const CrowdingStats all = crowding_distribution(stream, Region::interval(0, kInf), 1);
  total = 0;
  for (std::size_t c : all.counts) total += c;
  CHECK(total == stream.size());
  CHECK_ERROR_CATEGORY(crowding_distribution({}, Region::interval(0, 1)), "parameter");
}

TEST_CASE("tridiagonal sampler") {
  const std::vector<double> ev = tridiagonal_eigenvalues({2, 2, 2}, {-1, -1});
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK_ERROR_CATEGORY(tridiagonal_eigenvalues({1, 2}, {1, 1}), "eigensolver");

  const EnsembleSample s = tridiagonal_sample(5, 2.0, std::uint64_t{8});
  CHECK(s.potential_id == "gaussian-fast-path");
  CHECK(s.points.size() == 5);
  CHECK(std::is_sorted(s.points.begin(), s.points.end(), [](const Point& a, const Point& b) { return a.x < b.x; }));

  std::vector<Point> pooled;
  tridiagonal_visit(64, 2.0, 21, 200, [&](const EnsembleSample& t) {
    pooled.insert(pooled.end(), t.points.begin(), t.points.end());
  });
  const GridMeasure semicircle = GridMeasure::from_density(
      Grid::line(-2.5, 2.5, 500), [](const Point& p) { return oracle::semicircle_density(p.x); });
  CHECK(bl_distance(EmpiricalMeasure(1, pooled), semicircle) <= 0.04);

  const CrowdingStats tri = tridiagonal_crowding(8, 2.0, 5, 20000, Region::interval(0, kInf));
  SamplerConfig cfg = real_config(8, 21000, 5);
  const CrowdingStats mh = mh_crowding(cfg, Region::interval(0, kInf));
  CHECK(total_variation(tri.frequencies(), mh.frequencies()) <= 0.05);
}

TEST_CASE("complex field") {
  SamplerConfig cfg;
  cfg.field = Field::Complex;
  cfg.n = 4;
  cfg.potential = Potential::quadratic(1.0);
  cfg.sweeps = 3000;
  cfg.burn_in = 500;
  const auto samples = mh_sample(cfg);
  CHECK(samples.size() == 2500);
  CHECK(samples.back().acceptance_rate > 0.05);
  CHECK(samples.back().acceptance_rate < 0.95);
  CHECK(crowding_count(samples.back(), Region::disk({0, 0}, 100)) == 4);
  cfg.potential = Potential::radial_polynomial({0.0, 1.0});
  CHECK_ERROR_CATEGORY(mh_sample(cfg), "potential");
}

TEST_CASE("seeded determinism") {
  SamplerConfig cfg = real_config(5, 2000, 77);
  cfg.chains = 4;
  const auto a = mh_sample(cfg);
  cfg.threads = 4;
  const auto b = mh_sample(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].chain_id == b[i].chain_id);
    CHECK(a[i].sweep_index == b[i].sweep_index);
    for (std::size_t k = 0; k < 5; ++k) CHECK(a[i].points[k].x == b[i].points[k].x);
  }
  CHECK(a.front().chain_id == 0);
  CHECK(a.back().chain_id == 3);
  CHECK(substream_seed(1, "metropolis", 0) != substream_seed(1, "metropolis", 1));
  CHECK(substream_seed(1, "metropolis", 0) != substream_seed(1, "ldp", 0));
  CHECK(substream_seed(1, "metropolis", 0) == substream_seed(1, "metropolis", 0));

  cfg.step_scale = 0.0;
  CHECK_ERROR_CATEGORY(mh_sample(cfg), "parameter");
  cfg.step_scale = 1.0;
  cfg.burn_in = cfg.sweeps;
  CHECK_ERROR_CATEGORY(mh_sample(cfg), "parameter");
}

TEST_CASE("step warnings") {
  SamplerConfig cfg = real_config(4, 1500, 3);
  cfg.step_scale = 200.0;
  const auto samples = mh_sample(cfg);
  CHECK(samples.front().step_warning);
  cfg.step_scale = 1.0;
  CHECK_FALSE(mh_sample(cfg).front().step_warning);
}

TEST_CASE("total variation and csv") {
  CHECK(total_variation({0.5, 0.5}, {1.0, 0.0}) == doctest::Approx(0.5));
  CHECK(total_variation({0.2, 0.8}, {0.2, 0.8}) == 0.0);
  const auto samples = mh_sample(real_config(2, 1002, 4));
  std::ostringstream s;
  write_samples_csv(s, samples);
  CHECK(s.str().rfind("chain,sweep,k,coord_x\n", 0) == 0);
  std::ostringstream c;
  write_crowding_csv(c, crowding_distribution(samples, Region::interval(0, kInf)));
  CHECK(c.str().rfind("count,frequency\n", 0) == 0);
}

TEST_CASE("Hermite count law agrees with two-point quadrature") {
  for (const std::vector<Interval>& U : {std::vector<Interval>{{-0.5, 0.5}}, {{0.0, kInf}}, {{-2.0, -0.3}, {0.4, 1.0}}}) {
    const std::vector<double> law = oracle::hermite_count_law(2, U);
    const std::array<double, 3> exact = oracle::two_point_crowding(kHalfSquare, 2.0, U);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::exp(law[k]) == doctest::Approx(exact[k]).epsilon(1e-8));
  }
  double total = 0.0;
  for (double lp : oracle::hermite_count_law(12, {{-0.5, 0.5}})) total += std::exp(lp);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("windowed crowding") {
  const Region U = Region::interval(-0.5, 0.5);
  SamplerConfig cfg = real_config(2, 11000, 31);
  cfg.chains = 4;
  cfg.threads = 4;

  SUBCASE("n = 2 against quadrature") {
    const CountLaw law = windowed_crowding(cfg, U);
    const std::array<double, 3> exact = oracle::two_point_crowding(kHalfSquare, 2.0, {{-0.5, 0.5}});
    REQUIRE(law.log_probabilities.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(law.log_probabilities[k] - std::log(exact[k])) <= 0.1);
    CHECK(law.sweeps_per_window == 10000);
    CHECK(law.chain_log_probabilities.size() == 4);
  }

  SUBCASE("n = 8 far tail against the determinantal law") {
    cfg.n = 8;
    const CountLaw law = windowed_crowding(cfg, U);
    const std::vector<double> exact = oracle::hermite_count_law(8, {{-0.5, 0.5}});
    for (std::size_t k = 0; k <= 8; ++k) CHECK(std::abs(law.log_probabilities[k] - exact[k]) <= 0.3);
    const auto top = [](std::size_t k) { return k >= 7; };
    const double se = law.log_tail_se(top);
    const double exact_tail = std::log(std::exp(exact[7]) + std::exp(exact[8]));
    CHECK(se > 0.0);
    CHECK(std::abs(law.log_tail(top) - exact_tail) <= 4 * se + 0.02);
    CHECK(exact_tail < -29.0);  // far below anything a direct run observes
  }

  SUBCASE("deterministic across thread counts") {
    cfg.n = 4;
    const CountLaw a = windowed_crowding(cfg, U);
    cfg.threads = 1;
    const CountLaw b = windowed_crowding(cfg, U);
    CHECK(a.log_probabilities == b.log_probabilities);
  }

  SUBCASE("validation") {
    CHECK_ERROR_CATEGORY(windowed_crowding(cfg, Region::disk({0, 0}, 1)), "dimension");
    cfg.sweeps = cfg.burn_in;
    CHECK_ERROR_CATEGORY(windowed_crowding(cfg, U), "parameter");
  }
}
