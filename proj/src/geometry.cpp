#include "crowdrate/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "crowdrate/error.hpp"

namespace crowdrate {

namespace {

// Keeps the part of `poly` with n . p <= offset.
std::vector<Point> clip_halfplane(const std::vector<Point>& poly, double nx, double ny, double offset) {
  std::vector<Point> out;
  if (poly.empty()) return out;
  auto side = [&](const Point& p) { return nx * p.x + ny * p.y - offset; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    const double sa = side(a), sb = side(b);
    if (sa <= 0.0) out.push_back(a);
    if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
      const double t = sa / (sa - sb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

// Area of the inner parallel set {x in K : dist(x, dK) >= r} of a convex,
// counter-clockwise polygon: intersect the inward-shifted edge half-planes.
double inner_parallel_area(const std::vector<Point>& v, double r) {
  std::vector<Point> poly = v;
  for (std::size_t i = 0; i < v.size() && !poly.empty(); ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % v.size()];
    const double len = distance(a, b);
    // Outward normal of a CCW edge.
    const double nx = (b.y - a.y) / len, ny = -(b.x - a.x) / len;
    poly = clip_halfplane(poly, nx, ny, nx * a.x + ny * a.y - r);
  }
  return poly.size() < 3 ? 0.0 : std::max(0.0, polygon_signed_area(poly));
}

}  // namespace

double tube_area_counted(const Region& region, double r, std::size_t resolution) {
  if (region.dimension() != 2) fail("dimension", "tube areas are computed for planar regions");
  if (!(r > 0.0)) fail("parameter", "tube radius must be positive");
  if (resolution < 2) fail("parameter", "counting resolution must be at least 2");
  Box b;
  if (const auto* d = std::get_if<Disk>(&region.shape())) {
    b = {d->center.x - d->radius, d->center.x + d->radius, d->center.y - d->radius, d->center.y + d->radius};
  } else {
    const auto& v = std::get<Polygon>(region.shape()).vertices;
    b = {v[0].x, v[0].x, v[0].y, v[0].y};
    for (const auto& p : v) {
      b.x_lo = std::min(b.x_lo, p.x);
      b.x_hi = std::max(b.x_hi, p.x);
      b.y_lo = std::min(b.y_lo, p.y);
      b.y_hi = std::max(b.y_hi, p.y);
    }
  }
  const double side = std::max(b.x_hi - b.x_lo, b.y_hi - b.y_lo) + 2.0 * r;
  const double h = side / static_cast<double>(resolution);
  // One spare cell past the tube so partially covered cells are counted.
  b.x_lo -= r + h;
  b.x_hi += r + h;
  b.y_lo -= r + h;
  b.y_hi += r + h;
  const auto nx = static_cast<std::size_t>(std::ceil((b.x_hi - b.x_lo) / h));
  const auto ny = static_cast<std::size_t>(std::ceil((b.y_hi - b.y_lo) / h));
  // Cells straddling the level set {d = r} get the coverage of a linear ramp
  // across one cell width instead of a 0/1 vote; this removes the O(h) bias
  // of edges that sit at a fixed sub-cell offset.
  double count = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    const double y = b.y_lo + (static_cast<double>(j) + 0.5) * h;
    for (std::size_t i = 0; i < nx; ++i) {
      const double d = region.distance_to_boundary({b.x_lo + (static_cast<double>(i) + 0.5) * h, y});
      count += std::clamp(0.5 + (r - d) / h, 0.0, 1.0);
    }
  }
  return count * h * h;
}

TubeArea tube_area_detailed(const Region& region, double r, std::size_t resolution) {
  if (region.dimension() != 2) fail("dimension", "tube areas are computed for planar regions");
  if (!(r > 0.0)) fail("parameter", "tube radius must be positive");
  if (const auto* d = std::get_if<Disk>(&region.shape())) {
    const double R = d->radius;
    const double outer = std::numbers::pi * ((R + r) * (R + r) - R * R);
    const double inner = r < R ? std::numbers::pi * (R * R - (R - r) * (R - r)) : std::numbers::pi * R * R;
    return {outer + inner, true, false};
  }
  if (region.is_convex()) {
    const auto& v = std::get<Polygon>(region.shape()).vertices;
    const double outer = region.h1_boundary() * r + std::numbers::pi * r * r;
    const double inner = region.area() - inner_parallel_area(v, r);
    return {outer + inner, true, false};
  }
  return {tube_area_counted(region, r, resolution), false, true};
}

double tube_area(const Region& region, double r, std::size_t resolution) {
  return tube_area_detailed(region, r, resolution).area;
}

TubeReport minkowski_content(const Region& region, const std::vector<double>& radii,
                             std::size_t resolution) {
  if (radii.size() < 2) fail("parameter", "Minkowski extrapolation needs at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) fail("parameter", "radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) fail("parameter", "radii must be strictly decreasing");
  }
  TubeReport rep;
  rep.radii = radii;
  for (double r : radii) {
    const double a = tube_area(region, r, resolution);
    rep.areas.push_back(a);
    rep.ratios.push_back(a / (2.0 * r));
  }
  // ratio(r) = H + a r + O(r^2): eliminate the linear term.
  const std::size_t n = radii.size();
  const double r1 = radii[n - 2], r2 = radii[n - 1];
  const double q1 = rep.ratios[n - 2], q2 = rep.ratios[n - 1];
  rep.h1_estimate = (r1 * q2 - r2 * q1) / (r1 - r2);
  rep.c_constant = 2.0 * region.h1_boundary();
  return rep;
}

void write_tube_csv(std::ostream& out, const TubeReport& report) {
  const auto old = out.precision(17);
  out << "r,area,ratio\n";
  for (std::size_t i = 0; i < report.radii.size(); ++i)
    out << report.radii[i] << ',' << report.areas[i] << ',' << report.ratios[i] << '\n';
  out.precision(old);
}

double box_disk_intersection(const Box& box, const Point& center, double R) {
  const double x0 = box.x_lo - center.x, x1 = box.x_hi - center.x;
  const double y0 = box.y_lo - center.y, y1 = box.y_hi - center.y;
  const double a = std::max(x0, -R), b = std::min(x1, R);
  if (!(b > a) || !(y1 > y0)) return 0.0;
  auto half = [R](double x) { return std::sqrt(std::max(0.0, R * R - x * x)); };
  // Antiderivative of half(x).
  auto S = [R, &half](double x) {
    const double t = std::clamp(x / R, -1.0, 1.0);
    return 0.5 * (x * half(x) + R * R * std::asin(t));
  };
  std::vector<double> cuts{a, b};
  for (double y : {y0, y1}) {
    if (std::abs(y) < R) {
      const double xc = std::sqrt(R * R - y * y);
      for (double c : {-xc, xc})
        if (c > a && c < b) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double m = 0.5 * (lo + hi), s = half(m);
    // On this piece the top is either y1 or +half and the bottom either y0
    // or -half; the choice is constant between breakpoints.
    const bool top_is_arc = s < y1;
    const bool bottom_is_arc = -s > y0;
    const double top = top_is_arc ? s : y1;
    const double bottom = bottom_is_arc ? -s : y0;
    if (!(top > bottom)) continue;
    const double arcs = (top_is_arc ? 1.0 : 0.0) + (bottom_is_arc ? 1.0 : 0.0);
    const double constant = (top_is_arc ? 0.0 : y1) - (bottom_is_arc ? 0.0 : y0);
    area += arcs * (S(hi) - S(lo)) + constant * (hi - lo);
  }
  return area;
}

double default_delta0(const Region& region) {
  return 0.5 * std::min(region.inradius(), 0.1 * region.diameter());
}

namespace {

void validate_eps(double delta0, const std::vector<double>& eps) {
  if (!(delta0 > 0.0)) fail("parameter", "delta0 must be positive");
  for (double e : eps)
    if (!(e > 0.0 && e <= delta0 * (1.0 + 1e-12))) fail("parameter", "eps values must lie in (0, delta0]");
}

double cell_tube_area(const Region& region, const Box& cell, double eps) {
  if (const auto* d = std::get_if<Disk>(&region.shape())) {
    const double outer = box_disk_intersection(cell, d->center, d->radius + eps);
    const double inner = d->radius > eps ? box_disk_intersection(cell, d->center, d->radius - eps) : 0.0;
    return std::max(0.0, outer - inner);
  }
  const double w = cell.x_hi - cell.x_lo, h = cell.y_hi - cell.y_lo;
  const Point c{0.5 * (cell.x_lo + cell.x_hi), 0.5 * (cell.y_lo + cell.y_hi)};
  const double half_diag = 0.5 * std::hypot(w, h);
  const double dc = region.distance_to_boundary(c);
  if (dc >= eps + half_diag) return 0.0;
  if (dc + half_diag < eps) return w * h;
  constexpr int kSub = 8;
  int hits = 0;
  for (int j = 0; j < kSub; ++j)
    for (int i = 0; i < kSub; ++i) {
      const Point p{cell.x_lo + (i + 0.5) * w / kSub, cell.y_lo + (j + 0.5) * h / kSub};
      hits += region.distance_to_boundary(p) < eps;
    }
  return w * h * hits / (kSub * kSub);
}

M1StarReport finish(M1StarReport r) {
  r.passed = true;
  for (std::size_t i = 0; i < r.eps.size(); ++i) {
    r.worst_ratio = std::max(r.worst_ratio, r.tube_mass[i] / r.eps[i]);
    if (r.tube_mass[i] > r.c * r.eps[i] + 1e-9) r.passed = false;
  }
  return r;
}

bool on_boundary_1d(const Region& region, double x) {
  return region.distance_to_boundary({x, 0.0}) <= 1e-12;
}

}  // namespace

M1StarReport m1_star_check(const GridMeasure& mu, const Region& region, double delta0,
                           const std::vector<double>& eps_grid, double c_override) {
  const Grid& g = mu.grid();
  if (g.dimension() != region.dimension()) fail("dimension", "measure and region dimensions differ");
  M1StarReport r;
  r.c = c_override > 0.0 ? c_override : 2.0 * region.h1_boundary();
  if (g.dimension() == 1) {
    double mass = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (on_boundary_1d(region, g.node(k).x)) mass += mu.weight(k);
    r.worst_ratio = mass;
    r.passed = mass == 0.0;
    return r;
  }
  validate_eps(delta0, eps_grid);
  const double area = g.cell_volume();
  for (double e : eps_grid) {
    double mass = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double w = mu.weight(k);
      if (w == 0.0) continue;
      mass += w * cell_tube_area(region, g.cell(k), e) / area;
    }
    r.eps.push_back(e);
    r.tube_mass.push_back(mass);
  }
  return finish(std::move(r));
}

M1StarReport m1_star_check(const EmpiricalMeasure& mu, const Region& region, double delta0,
                           const std::vector<double>& eps_grid, double c_override) {
  if (mu.dimension() != region.dimension()) fail("dimension", "measure and region dimensions differ");
  M1StarReport r;
  r.c = c_override > 0.0 ? c_override : 2.0 * region.h1_boundary();
  if (mu.dimension() == 1) {
    double mass = 0.0;
    for (const auto& p : mu.points())
      if (on_boundary_1d(region, p.x)) mass += mu.atom_weight();
    r.worst_ratio = mass;
    r.passed = mass == 0.0;
    return r;
  }
  validate_eps(delta0, eps_grid);
  for (double e : eps_grid) {
    double mass = 0.0;
    for (const auto& p : mu.points())
      if (region.distance_to_boundary(p) < e) mass += mu.atom_weight();
    r.eps.push_back(e);
    r.tube_mass.push_back(mass);
  }
  return finish(std::move(r));
}

}  // namespace crowdrate
