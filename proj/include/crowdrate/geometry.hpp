#pragma once

#include <iosfwd>
#include <vector>

#include "crowdrate/grid.hpp"
#include "crowdrate/region.hpp"

namespace crowdrate {

struct TubeArea {
  double area = 0.0;
  bool closed_form = true;
  bool fallback = false;  // closed form unavailable, grid counting used
};

// Lebesgue measure of {x : dist(x, dU) < r}. Disks and convex polygons use the
// Steiner outer band plus the inner parallel set; other polygons are counted
// on a `resolution`-per-axis grid with exact point-to-edge distances.
TubeArea tube_area_detailed(const Region& region, double r, std::size_t resolution = 1024);
double tube_area(const Region& region, double r, std::size_t resolution = 1024);

// Counting estimate on a `resolution`-per-axis lattice with exact distances to
// the boundary; cells cut by the level set are weighted by a linear ramp.
double tube_area_counted(const Region& region, double r, std::size_t resolution);

struct TubeReport {
  std::vector<double> radii;
  std::vector<double> areas;
  std::vector<double> ratios;  // area / (2 r)
  double h1_estimate = 0.0;    // Richardson extrapolation of the last two ratios
  double c_constant = 0.0;     // 2 H^1(dU)
};

TubeReport minkowski_content(const Region& region, const std::vector<double>& radii,
                             std::size_t resolution = 1024);

void write_tube_csv(std::ostream& out, const TubeReport& report);

// Area of box ∩ open disk, exact.
double box_disk_intersection(const Box& box, const Point& center, double radius);

struct M1StarReport {
  bool passed = false;
  double c = 0.0;
  double worst_ratio = 0.0;      // max_eps mu((dU)_eps) / eps; 1D: mu(dU)
  std::vector<double> eps;
  std::vector<double> tube_mass;
};

double default_delta0(const Region& region);

// mu((dU)_eps) <= c eps for every eps in eps_grid (with 1e-9 slack), c =
// 2 H^1(dU) unless overridden. The grid measure is read as a piecewise
// constant density: disk tubes are intersected with cells exactly, polygon
// tubes by 8x8 sub-cell sampling. In 1D the check is mu(dU) == 0.
M1StarReport m1_star_check(const GridMeasure& mu, const Region& region, double delta0,
                           const std::vector<double>& eps_grid, double c_override = 0.0);
M1StarReport m1_star_check(const EmpiricalMeasure& mu, const Region& region, double delta0,
                           const std::vector<double>& eps_grid, double c_override = 0.0);

}  // namespace crowdrate
