#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "crowdrate/grid.hpp"
#include "crowdrate/point.hpp"

namespace crowdrate {

struct Interval {
  double lo;
  double hi;
};

struct IntervalUnion {
  std::vector<Interval> intervals;  // sorted, disjoint
};

struct Disk {
  Point center;
  double radius;
};

struct Polygon {
  std::vector<Point> vertices;  // simple, closed implicitly
};

// The crowding set U. Membership is always the open set: boundary points are
// outside.
class Region {
public:
  static Region intervals(std::vector<Interval> intervals);
  static Region interval(double lo, double hi) { return intervals({{lo, hi}}); }
  static Region empty_line() { return intervals({}); }
  static Region disk(Point center, double radius);
  static Region polygon(std::vector<Point> vertices);
  static Region square(Point corner, double side);

  int dimension() const;
  bool contains(const Point& p) const;
  bool is_empty() const;
  // Hausdorff measure of the boundary: endpoint count in 1D (a finite, polar
  // set), circumference or perimeter in 2D.
  double h1_boundary() const;
  double area() const;  // 2D only
  double distance_to_boundary(const Point& p) const;
  bool is_convex() const;  // polygons; disks are convex, 1D throws
  double inradius() const;
  double diameter() const;
  std::string id() const;

  // Complement within [lo, hi]; 1D only.
  Region complement_within(double lo, double hi) const;

  const std::variant<IntervalUnion, Disk, Polygon>& shape() const { return shape_; }

private:
  explicit Region(std::variant<IntervalUnion, Disk, Polygon> s) : shape_(std::move(s)) {}
  std::variant<IntervalUnion, Disk, Polygon> shape_;
};

// Throws Error("grid") when some cell centre lies on the boundary of U (within
// 1e-12), which would make cell-centre membership ambiguous.
void require_boundary_free(const Grid& grid, const Region& region);

double polygon_signed_area(const std::vector<Point>& v);
double point_segment_distance(const Point& p, const Point& a, const Point& b);

}  // namespace crowdrate
