#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "crowdrate/construction.hpp"
#include "crowdrate/energy.hpp"
#include "crowdrate/measures.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace crowdrate;

namespace {

double tilted(double x, double) { return (1.0 + x) / 1.5; }

// A smooth bump centred in the square, bounded away from 0.
constexpr double kBumpNorm = 0.7451235405004255;  // scipy dblquad
double bump(double x, double y) {
  const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
  return (0.5 + std::exp(-r2 / 0.08)) / kBumpNorm;
}

double polygon_area(const std::vector<Point>& v) { return std::abs(polygon_signed_area(v)); }

}  // namespace

TEST_CASE("square densities") {
  CHECK(SquareDensity::uniform_unit().c_bound() == doctest::Approx(1.0));
  CHECK(SquareDensity::tilted_unit().c_bound() == doctest::Approx(2.0));
  CHECK(SquareDensity::tilted_unit().mass(0, 0.5, 0, 1) == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
  CHECK_ERROR_CATEGORY(SquareDensity({0, 0}, 1, [](const Point&) { return 2.0; }), "density");
  CHECK_ERROR_CATEGORY(SquareDensity({0, 0}, 1, [](const Point& p) { return 2.0 * (p.x + p.y) - 1.0; }), "density");
  const SquareDensity b({0, 0}, 1, [](const Point& p) { return bump(p.x, p.y); });
  CHECK(b.mass(0, 1, 0, 1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("perfect-square case") {
  const ConstructedPoints pts = construct_points(SquareDensity::uniform_unit(), 4);
  CHECK(pts.case_tag == ConstructedPoints::Case::PerfectSquare);
  const std::vector<Point> expected = {{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.25}, {0.75, 0.75}};
  REQUIRE(pts.points.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(pts.points[i].x == doctest::Approx(expected[i].x).epsilon(1e-10));
    CHECK(pts.points[i].y == doctest::Approx(expected[i].y).epsilon(1e-10));
  }
  const SeparationReport sep = verify_separation(pts, 1.0, 4);
  CHECK(sep.passed);
  CHECK(sep.min_distance == doctest::Approx(0.5));
  CHECK(sep.bound == doctest::Approx(0.25));

  const SquareDensity nu = SquareDensity::tilted_unit();
  const ConstructedPoints t = construct_points(nu, 9);
  for (const ConstructedCell& c : t.cells) {
    CHECK(std::abs(cell_mass(nu, c) - 1.0 / 9.0) <= 1e-8);
    // Diagonal intersection of a rectangle is its centre.
    REQUIRE(c.pieces.size() == 1);
  }
  for (std::size_t i = 0; i < 9; ++i) {
    const Box& r = t.cells[i].pieces[0];
    CHECK(t.points[i].x == doctest::Approx(0.5 * (r.x_lo + r.x_hi)));
    CHECK(t.points[i].y == doctest::Approx(0.5 * (r.y_lo + r.y_hi)));
  }
  const std::vector<double> oracle_cuts = oracle::column_cuts(tilted, 3, 1.0 / 3.0);
  REQUIRE(t.column_cuts.size() == 4);
  for (std::size_t c = 1; c < 3; ++c) CHECK(std::abs(t.column_cuts[c] - oracle_cuts[c - 1]) <= 1e-6);
  CHECK(t.column_cuts[1] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-9));
}

TEST_CASE("general case") {
  const SquareDensity nu = SquareDensity::uniform_unit();
  const ConstructedPoints pts = construct_points(nu, 10);
  CHECK(pts.case_tag == ConstructedPoints::Case::General);
  CHECK(pts.m == 3);
  CHECK(pts.k == 1);
  const SeparationReport sep = verify_separation(pts, 1.0, 10);
  CHECK(sep.passed);
  CHECK(sep.min_distance >= 1.0 / (2.0 * std::sqrt(10.0)));

  ConstructedPoints dup = pts;
  dup.points.push_back(dup.points.front());
  const SeparationReport bad = verify_separation(dup, 1.0, 11);
  CHECK_FALSE(bad.passed);
  CHECK(bad.min_distance == 0.0);
}

TEST_CASE("cells partition the square with equal masses") {
  for (const SquareDensity& nu : {SquareDensity::uniform_unit(), SquareDensity::tilted_unit()}) {
    for (std::size_t n : {1, 2, 3, 5, 7, 8, 12, 17, 24, 30, 50, 63, 64, 65, 80}) {
      const ConstructedPoints pts = construct_points(nu, n);
      REQUIRE(pts.points.size() == n);
      REQUIRE(pts.cells.size() == n);
      CHECK(pts.m * pts.m + pts.k == n);
      CHECK(pts.k <= 2 * pts.m);
      double area = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(cell_mass(nu, pts.cells[i]) - 1.0 / static_cast<double>(n)) <= 1e-8);
        area += polygon_area(pts.cells[i].polygon);
        const Point& p = pts.points[i];
        CHECK((p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0));
      }
      CHECK(area == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("construction is deterministic") {
  const ConstructedPoints a = construct_points(SquareDensity::tilted_unit(), 47);
  const ConstructedPoints b = construct_points(SquareDensity::tilted_unit(), 47);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
  }
}

TEST_CASE("separation holds from n = 16 on") {
  for (const SquareDensity& nu : {SquareDensity::uniform_unit(), SquareDensity::tilted_unit()}) {
    const auto n0 = separation_threshold(nu, 100, 4);
    REQUIRE(n0.has_value());
    CHECK(*n0 <= 16);
  }
}

TEST_CASE("empirical energy") {
  CHECK(empirical_energy({{0, 0}, {1, 0}}) == 0.0);
  CHECK(empirical_energy({{0, 0}, {2, 0}}) == doctest::Approx(std::log(2.0) / 2.0));
  CHECK_ERROR_CATEGORY(empirical_energy({{0, 0}, {0, 0}, {1, 1}}), "degenerate");
  CHECK_ERROR_CATEGORY(empirical_energy({{0, 0}}), "parameter");

  const SquareDensity uniform = SquareDensity::uniform_unit();
  double previous_gap = INFINITY;
  for (std::size_t n : {16, 64, 256}) {
    const double e = empirical_energy(construct_points(uniform, n).points);
    const double gap = e - kSquareSelfCell;
    CHECK(gap > 0.0);
    CHECK(gap < previous_gap);
    previous_gap = gap;
  }
  CHECK(previous_gap <= 0.05);

  const SquareDensity b({0, 0}, 1, [](const Point& p) { return bump(p.x, p.y); });
  const oracle::MonteCarloEstimate cont = oracle::square_log_energy(bump, 1.5 / kBumpNorm, 200000, 11);
  const double e256 = empirical_energy(construct_points(b, 256).points);
  CHECK(e256 >= cont.mean - 0.05);
  CHECK(e256 - cont.mean <= 0.05);
}

TEST_CASE("weak convergence") {
  const SquareDensity nu = SquareDensity::uniform_unit();
  const GridMeasure grid = nu.discretize(64);
  const WeakConvergenceReport r = weak_convergence_check(nu, {16, 64, 256}, grid, 0.06);
  REQUIRE(r.decreasing.has_value());
  CHECK(*r.decreasing);
  REQUIRE(r.passed.has_value());
  CHECK(*r.passed);
  CHECK(r.distances.back() <= 0.06);

  CHECK(bl_distance(grid, grid) == 0.0);
  const WeakConvergenceReport single = weak_convergence_check(nu, {4}, grid, 0.06);
  CHECK(single.distances.size() == 1);
  CHECK_FALSE(single.decreasing.has_value());
  CHECK_FALSE(single.passed.has_value());
}

TEST_CASE("points csv") {
  std::ostringstream s;
  write_points_csv(s, {{0.25, 0.5}});
  CHECK(s.str().rfind("index,x,y\n0,", 0) == 0);
}
