#pragma once

#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "crowdrate/grid.hpp"
#include "crowdrate/region.hpp"

namespace crowdrate {

// Mass of the nodes whose cell centre lies in U.
double measure_of_region(const GridMeasure& mu, const Region& region);

EmpiricalMeasure empirical_from_sample(std::span<const double> points);
EmpiricalMeasure empirical_from_sample(std::span<const Point> points);

// Fixed dictionary of bounded 1-Lipschitz test functions over a box:
//   ramps      f(p) = clamp(p_axis - t, -1, 1)   for lattice thresholds t
//   bumps      f(p) = max(0, r - |p - c|)        for lattice centres c, r <= 1
// The dictionary distance sup_f |int f d(a - b)| is a pseudometric that
// generates the weak topology on measures supported in the box.
class BlDictionary {
public:
  static constexpr int kVersion = 1;

  // Version-1 layout: 48 lattice cells per axis in 1D, 20 per axis in 2D;
  // bump radii {0.05, 0.1, 0.25, 0.5, 1}.
  BlDictionary(int dimension, Box box);
  // Explicit layout; an empty dictionary is rejected with Error("config").
  BlDictionary(int dimension, Box box, int cells_per_axis, std::vector<double> radii);

  // The box is the union of both supports, snapped outward to multiples of 0.5.
  static BlDictionary covering(int dimension, Box a, Box b);

  int dimension() const { return dimension_; }
  const Box& box() const { return box_; }
  std::size_t size() const { return ramps_.size() + bumps_.size(); }

  double evaluate(std::size_t f, const Point& p) const;

private:
  struct Ramp { int axis; double threshold; };
  struct Bump { Point center; double radius; };

  int dimension_;
  Box box_;
  std::vector<Ramp> ramps_;
  std::vector<Bump> bumps_;
};

using MeasureRef = std::variant<const GridMeasure*, const EmpiricalMeasure*>;

double bl_distance(const GridMeasure& a, const GridMeasure& b);
double bl_distance(const GridMeasure& a, const EmpiricalMeasure& b);
double bl_distance(const EmpiricalMeasure& a, const GridMeasure& b);
double bl_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
double bl_distance(MeasureRef a, MeasureRef b, const BlDictionary& dictionary);

Box support_box(const GridMeasure& mu);

// CSV with header `index,x[,y],weight`.
void write_measure_csv(std::ostream& out, const GridMeasure& mu);

}  // namespace crowdrate
