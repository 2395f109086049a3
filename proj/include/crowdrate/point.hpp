#pragma once

#include <cmath>

namespace crowdrate {

// A point of F = R or C. One-dimensional points keep y == 0.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double norm(const Point& a) { return std::hypot(a.x, a.y); }

}  // namespace crowdrate
