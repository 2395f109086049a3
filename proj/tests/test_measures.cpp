#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "crowdrate/measures.hpp"
#include "crowdrate/potential.hpp"
#include "support.hpp"

using namespace crowdrate;

TEST_CASE("grid layout") {
  const Grid g = Grid::plane({0, 1, 0, 2}, 4, 8);
  CHECK(g.size() == 32);
  CHECK(g.hx() == doctest::Approx(0.25));
  CHECK(g.hy() == doctest::Approx(0.25));
  CHECK(g.cell_volume() == doctest::Approx(0.0625));
  const Point p = g.node(g.index(1, 2));
  CHECK(p.x == doctest::Approx(0.375));
  CHECK(p.y == doctest::Approx(0.625));
  CHECK(g.ix(9) == 1);
  CHECK(g.iy(9) == 2);
  CHECK_ERROR_CATEGORY(Grid::line(0, 1, 1), "grid");
  CHECK_ERROR_CATEGORY(Grid::plane({0, 1, 0, 1}, 1), "grid");
}

TEST_CASE("grid measure validation") {
  const Grid g = Grid::line(0, 1, 4);
  CHECK_ERROR_CATEGORY(GridMeasure(g, {0.5, 0.5, 0.5, -0.5}), "measure");
  CHECK_ERROR_CATEGORY(GridMeasure(g, {0.25, 0.25, 0.25, 0.2}), "measure");
  const GridMeasure u = GridMeasure::uniform(g);
  double s = 0;
  for (double w : u.weights()) s += w;
  CHECK(std::abs(s - 1.0) <= 1e-12);
  CHECK(u.density(0) == doctest::Approx(1.0));
}

TEST_CASE("measure_of_region examples") {
  const GridMeasure u = GridMeasure::uniform(Grid::line(-1, 1, 200));
  CHECK(std::abs(measure_of_region(u, Region::interval(0, 1)) - 0.5) <= 1.0 / 200);
  CHECK(measure_of_region(u, Region::empty_line()) == 0.0);

  const std::size_t n = 200;
  const GridMeasure sq = GridMeasure::uniform(Grid::plane({0, 1, 0, 1}, n));
  const Region disk = Region::disk({0.5, 0.5}, 0.25);
  const double got = measure_of_region(sq, disk);
  // Count-cells reference at 4x resolution.
  const std::size_t fine = 4 * n;
  std::size_t inside = 0;
  for (std::size_t j = 0; j < fine; ++j)
    for (std::size_t i = 0; i < fine; ++i) {
      const double x = (i + 0.5) / fine - 0.5, y = (j + 0.5) / fine - 0.5;
      if (x * x + y * y < 0.0625) ++inside;
    }
  const double oracle = static_cast<double>(inside) / static_cast<double>(fine * fine);
  CHECK(std::abs(got - std::numbers::pi / 16) <= 2e-3);
  CHECK(std::abs(got - oracle) <= 2e-3);

  CHECK_ERROR_CATEGORY(measure_of_region(u, disk), "dimension");
}

TEST_CASE("complement additivity") {
  const Grid g = Grid::line(-3, 3, 301);
  const GridMeasure mu = GridMeasure::from_density(g, [](const Point& p) { return std::exp(-p.x * p.x); });
  for (const Region& U : {Region::interval(-0.5, 0.5), Region::intervals({{-2.2, -1.1}, {0.3, 2.9}})}) {
    const double a = measure_of_region(mu, U);
    const double b = measure_of_region(mu, U.complement_within(-3, 3));
    CHECK(std::abs(a + b - 1.0) <= 1e-12);
  }
}

TEST_CASE("empirical measures") {
  const std::vector<double> one = {0.0};
  const EmpiricalMeasure d = empirical_from_sample(one);
  CHECK(d.size() == 1);
  CHECK(d.atom_weight() == 1.0);
  const std::vector<double> two = {0.0, 1.0};
  CHECK(empirical_from_sample(two).atom_weight() == 0.5);
  CHECK_ERROR_CATEGORY(empirical_from_sample(std::span<const double>{}), "parameter");
}

TEST_CASE("bl_distance examples") {
  const GridMeasure u = GridMeasure::uniform(Grid::line(0, 1, 100));
  CHECK(bl_distance(u, u) == 0.0);

  for (double t : {0.05, 0.3, 1.0}) {
    const EmpiricalMeasure a(1, {{0.0, 0.0}}), b(1, {{t, 0.0}});
    const double d = bl_distance(a, b);
    CHECK(d > 0.0);
    CHECK(d <= t + 1e-12);
  }

  // W1 between the two uniforms is exactly 0.1.
  const GridMeasure shifted = GridMeasure::uniform(Grid::line(0.1, 1.1, 100));
  const double d = bl_distance(u, shifted);
  CHECK(d > 0.0);
  CHECK(d <= 0.1 + 1e-12);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> draws(100);
  for (double& x : draws) x = unif(rng);
  CHECK(bl_distance(empirical_from_sample(draws), u) <= 0.15);
}

TEST_CASE("bl_distance is a pseudometric on random measures") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Grid g = Grid::plane({-1, 1, -1, 1}, 12);
  auto random_measure = [&] {
    std::vector<double> w(g.size());
    for (double& x : w) x = unif(rng) * unif(rng);
    return GridMeasure::normalized(g, w);
  };
  for (int trial = 0; trial < 10; ++trial) {
    const GridMeasure a = random_measure(), b = random_measure(), c = random_measure();
    const double ab = bl_distance(a, b), ba = bl_distance(b, a);
    CHECK(ab == ba);
    CHECK(ab <= bl_distance(a, c) + bl_distance(c, b) + 1e-15);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("empty dictionary is a config error") {
  CHECK_ERROR_CATEGORY(BlDictionary(1, {0, 1, 0, 0}, 0, {}), "config");
}

TEST_CASE("measure csv") {
  const GridMeasure u = GridMeasure::uniform(Grid::plane({0, 1, 0, 1}, 2));
  std::ostringstream s;
  write_measure_csv(s, u);
  CHECK(s.str().rfind("index,x,y,weight\n", 0) == 0);
  std::ostringstream t;
  write_measure_csv(t, GridMeasure::uniform(Grid::line(0, 1, 2)));
  CHECK(t.str().rfind("index,x,weight\n", 0) == 0);
}

TEST_CASE("potentials") {
  const Potential q = Potential::quadratic(0.5);
  CHECK(q(Point{2.0, 0.0}) == doctest::Approx(2.0));
  CHECK(q.laplacian(Point{0.3, 0.0}, 1) == doctest::Approx(1.0));
  CHECK(Potential::quadratic(1.0).laplacian(Point{0.3, 0.4}, 2) == doctest::Approx(4.0));
  const Potential quart = Potential::quartic(1.0);
  CHECK(quart(Point{0.0, 2.0}) == doctest::Approx(16.0));
  // Laplacian of |z|^4 in the plane is 16 |z|^2.
  CHECK(quart.laplacian(Point{0.5, 0.0}, 2) == doctest::Approx(4.0));
  CHECK(q.shifted(1.5)(Point{2.0, 0.0}) == doctest::Approx(3.5));
  CHECK(q.plane_admissible());
  CHECK_FALSE(Potential::radial_polynomial({0.0, 1.0}).plane_admissible());

  const Potential t = Potential::tabulated({{-1.0, 1.0}, {0.0, 0.0}, {1.0, 2.0}});
  CHECK(t(Point{0.5, 0.0}) == doctest::Approx(1.0));
  CHECK_ERROR_CATEGORY(t(Point{2.0, 0.0}), "potential");
  CHECK_ERROR_CATEGORY(t.laplacian(Point{0.0, 0.0}, 1), "potential");
}
