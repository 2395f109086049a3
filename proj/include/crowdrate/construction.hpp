#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "crowdrate/grid.hpp"
#include "crowdrate/point.hpp"

namespace crowdrate {

// Probability density on the square D = [corner, corner + side]^2 with
// 1/C <= g <= C. Rectangle masses use a 16-point Gauss-Legendre product rule.
class SquareDensity {
public:
  using Fn = std::function<double(const Point&)>;

  // Validates unit mass (1e-6) and computes C = max(sup g / inf g, sup g,
  // 1 / inf g) from a 201 x 201 sampling lattice. Throws Error("density").
  SquareDensity(Point corner, double side, Fn density);

  static SquareDensity uniform_unit();
  // g(x, y) = (1 + x) / 1.5 on the unit square.
  static SquareDensity tilted_unit();

  const Point& corner() const { return corner_; }
  double side() const { return side_; }
  double c_bound() const { return c_bound_; }
  double operator()(const Point& p) const { return density_(p); }

  double mass(double x0, double x1, double y0, double y1) const;

  // Cell masses of a grid over D.
  GridMeasure discretize(std::size_t cells_per_axis) const;

private:
  Point corner_;
  double side_;
  Fn density_;
  double c_bound_ = 1.0;
};

struct ConstructedCell {
  std::vector<Box> pieces;      // rectangles whose union is the cell
  std::vector<Point> polygon;   // outline, counter-clockwise
  bool strip = false;           // part of the residual region R'
};

struct ConstructedPoints {
  enum class Case { PerfectSquare, General };

  std::vector<Point> points;
  std::vector<ConstructedCell> cells;
  Case case_tag = Case::PerfectSquare;
  std::size_t m = 0;  // n = m^2 + k
  std::size_t k = 0;
  std::vector<double> column_cuts;  // x_0 .. x_m
};

ConstructedPoints construct_points(const SquareDensity& nu, std::size_t n);

double cell_mass(const SquareDensity& nu, const ConstructedCell& cell);

struct SeparationReport {
  bool passed = false;
  double min_distance = 0.0;
  double bound = 0.0;  // 1 / (2 sqrt(C n))
};

SeparationReport verify_separation(const ConstructedPoints& pts, double c, std::size_t n);

// Smallest n0 <= n_max such that the separation bound holds for every n in
// [n0, n_max]; nullopt when it fails at n_max.
std::optional<std::size_t> separation_threshold(const SquareDensity& nu, std::size_t n_max,
                                                std::size_t n_min = 1);

// (1/n^2) sum_{i != j} log|z_i - z_j|.
double empirical_energy(const std::vector<Point>& pts);

struct WeakConvergenceReport {
  std::vector<std::size_t> ns;
  std::vector<double> distances;
  std::optional<bool> decreasing;  // undefined for a single entry
  std::optional<bool> passed;
  double bound = 0.0;
};

WeakConvergenceReport weak_convergence_check(const SquareDensity& nu, const std::vector<std::size_t>& ns,
                                             const GridMeasure& nu_grid, double bound);

void write_points_csv(std::ostream& out, const std::vector<Point>& points);

}  // namespace crowdrate
