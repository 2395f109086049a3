#include "crowdrate/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "crowdrate/error.hpp"

namespace crowdrate {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](const Point& a, const Point& b, const Point& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
  };
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

double polygon_signed_area(const std::vector<Point>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % v.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

Region Region::intervals(std::vector<Interval> iv) {
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < iv.size(); ++i) {
    if (!(iv[i].hi > iv[i].lo)) fail("parameter", "intervals must have positive length");
    if (i > 0 && !(iv[i].lo > iv[i - 1].hi)) fail("parameter", "intervals must be disjoint");
  }
  return Region(IntervalUnion{std::move(iv)});
}

Region Region::disk(Point center, double radius) {
  if (!(radius > 0.0)) fail("parameter", "disk radius must be positive");
  return Region(Disk{center, radius});
}

Region Region::polygon(std::vector<Point> v) {
  if (v.size() < 3) fail("parameter", "polygon needs at least 3 vertices");
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        fail("parameter", "polygon must be simple");
    }
  }
  if (std::abs(polygon_signed_area(v)) <= 0.0) fail("parameter", "polygon has zero area");
  if (polygon_signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
  return Region(Polygon{std::move(v)});
}

Region Region::square(Point c, double side) {
  return polygon({c, {c.x + side, c.y}, {c.x + side, c.y + side}, {c.x, c.y + side}});
}

int Region::dimension() const { return std::holds_alternative<IntervalUnion>(shape_) ? 1 : 2; }

bool Region::contains(const Point& p) const {
  if (const auto* iu = std::get_if<IntervalUnion>(&shape_)) {
    for (const auto& i : iu->intervals)
      if (p.x > i.lo && p.x < i.hi) return true;
    return false;
  }
  if (const auto* d = std::get_if<Disk>(&shape_)) return distance(p, d->center) < d->radius;
  const auto& v = std::get<Polygon>(shape_).vertices;
  // Even-odd ray casting; points on an edge are reported outside.
  if (distance_to_boundary(p) == 0.0) return false;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double xc = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

bool Region::is_empty() const {
  if (const auto* iu = std::get_if<IntervalUnion>(&shape_)) return iu->intervals.empty();
  return false;
}

double Region::h1_boundary() const {
  if (const auto* iu = std::get_if<IntervalUnion>(&shape_)) {
    double count = 0.0;
    for (const auto& i : iu->intervals) count += std::isfinite(i.lo) + std::isfinite(i.hi);
    return count;
  }
  if (const auto* d = std::get_if<Disk>(&shape_)) return 2.0 * std::numbers::pi * d->radius;
  const auto& v = std::get<Polygon>(shape_).vertices;
  double p = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) p += distance(v[i], v[(i + 1) % v.size()]);
  return p;
}

double Region::area() const {
  if (dimension() == 1) fail("dimension", "area is defined for planar regions");
  if (const auto* d = std::get_if<Disk>(&shape_)) return std::numbers::pi * d->radius * d->radius;
  return polygon_signed_area(std::get<Polygon>(shape_).vertices);
}

double Region::distance_to_boundary(const Point& p) const {
  if (const auto* iu = std::get_if<IntervalUnion>(&shape_)) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& i : iu->intervals) {
      if (std::isfinite(i.lo)) best = std::min(best, std::abs(p.x - i.lo));
      if (std::isfinite(i.hi)) best = std::min(best, std::abs(p.x - i.hi));
    }
    return best;
  }
  if (const auto* d = std::get_if<Disk>(&shape_)) return std::abs(distance(p, d->center) - d->radius);
  const auto& v = std::get<Polygon>(shape_).vertices;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    best = std::min(best, point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return best;
}

bool Region::is_convex() const {
  if (dimension() == 1) fail("dimension", "convexity is checked for planar regions");
  if (std::holds_alternative<Disk>(shape_)) return true;
  const auto& v = std::get<Polygon>(shape_).vertices;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (cross(v[i], v[(i + 1) % v.size()], v[(i + 2) % v.size()]) < 0.0) return false;
  return true;
}

double Region::inradius() const {
  if (const auto* d = std::get_if<Disk>(&shape_)) return d->radius;
  if (dimension() == 1) fail("dimension", "inradius is defined for planar regions");
  // Largest inscribed disk, searched on a lattice; adequate for choosing delta0.
  const auto& v = std::get<Polygon>(shape_).vertices;
  Box b{v[0].x, v[0].x, v[0].y, v[0].y};
  for (const auto& p : v) {
    b.x_lo = std::min(b.x_lo, p.x);
    b.x_hi = std::max(b.x_hi, p.x);
    b.y_lo = std::min(b.y_lo, p.y);
    b.y_hi = std::max(b.y_hi, p.y);
  }
  constexpr int kSteps = 200;
  double best = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    for (int j = 0; j <= kSteps; ++j) {
      const Point p{b.x_lo + (b.x_hi - b.x_lo) * i / kSteps, b.y_lo + (b.y_hi - b.y_lo) * j / kSteps};
      if (contains(p)) best = std::max(best, distance_to_boundary(p));
    }
  }
  return best;
}

double Region::diameter() const {
  if (const auto* d = std::get_if<Disk>(&shape_)) return 2.0 * d->radius;
  if (const auto* iu = std::get_if<IntervalUnion>(&shape_)) {
    if (iu->intervals.empty()) return 0.0;
    return iu->intervals.back().hi - iu->intervals.front().lo;
  }
  const auto& v = std::get<Polygon>(shape_).vertices;
  double best = 0.0;
  for (const auto& a : v)
    for (const auto& b : v) best = std::max(best, distance(a, b));
  return best;
}

std::string Region::id() const {
  std::ostringstream os;
  os.precision(12);
  if (const auto* iu = std::get_if<IntervalUnion>(&shape_)) {
    os << "intervals";
    for (const auto& i : iu->intervals) os << "[" << i.lo << "," << i.hi << "]";
    if (iu->intervals.empty()) os << "[]";
  } else if (const auto* d = std::get_if<Disk>(&shape_)) {
    os << "disk(" << d->center.x << "," << d->center.y << ";" << d->radius << ")";
  } else {
    os << "polygon(" << std::get<Polygon>(shape_).vertices.size() << ")";
  }
  return os.str();
}

Region Region::complement_within(double lo, double hi) const {
  const auto* iu = std::get_if<IntervalUnion>(&shape_);
  if (!iu) fail("dimension", "complement is implemented for 1D regions");
  std::vector<Interval> out;
  double cursor = lo;
  for (const auto& i : iu->intervals) {
    if (i.hi <= lo || i.lo >= hi) continue;
    if (i.lo > cursor) out.push_back({cursor, i.lo});
    cursor = std::max(cursor, i.hi);
  }
  if (cursor < hi) out.push_back({cursor, hi});
  return intervals(std::move(out));
}

void require_boundary_free(const Grid& grid, const Region& region) {
  if (grid.dimension() != region.dimension()) fail("dimension", "grid and region dimensions differ");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (region.distance_to_boundary(grid.node(k)) <= 1e-12)
      fail("grid", "a cell centre lies on the region boundary; offset the grid by half a cell");
  }
}

}  // namespace crowdrate
