#include "crowdrate/construction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "crowdrate/error.hpp"
#include "crowdrate/measures.hpp"

namespace crowdrate {

namespace {

// 16-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

constexpr double kCutTolerance = 1e-10;

}  // namespace

SquareDensity::SquareDensity(Point corner, double side, Fn density)
    : corner_(corner), side_(side), density_(std::move(density)) {
  if (!(side > 0.0)) fail("density", "square side must be positive");
  constexpr int kLattice = 200;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int j = 0; j <= kLattice; ++j)
    for (int i = 0; i <= kLattice; ++i) {
      const double g = density_({corner.x + side * i / kLattice, corner.y + side * j / kLattice});
      if (!std::isfinite(g) || !(g > 0.0)) fail("density", "density must be positive and finite on D");
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
  c_bound_ = std::max({hi / lo, hi, 1.0 / lo});
  const double total = mass(corner.x, corner.x + side, corner.y, corner.y + side);
  if (std::abs(total - 1.0) > 1e-6) fail("density", "density must integrate to 1 over D");
}

SquareDensity SquareDensity::uniform_unit() {
  return SquareDensity({0.0, 0.0}, 1.0, [](const Point&) { return 1.0; });
}

SquareDensity SquareDensity::tilted_unit() {
  return SquareDensity({0.0, 0.0}, 1.0, [](const Point& p) { return (1.0 + p.x) / 1.5; });
}

double SquareDensity::mass(double x0, double x1, double y0, double y1) const {
  if (!(x1 > x0) || !(y1 > y0)) return 0.0;
  const double cx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0);
  const double cy = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
  double total = 0.0;
  for (std::size_t j = 0; j < 16; ++j) {
    const double ty = j < 8 ? -kGlNodes[7 - j] : kGlNodes[j - 8];
    const double wy = j < 8 ? kGlWeights[7 - j] : kGlWeights[j - 8];
    double row = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
      const double tx = i < 8 ? -kGlNodes[7 - i] : kGlNodes[i - 8];
      const double wx = i < 8 ? kGlWeights[7 - i] : kGlWeights[i - 8];
      row += wx * density_({cx + hx * tx, cy + hy * ty});
    }
    total += wy * row;
  }
  return total * hx * hy;
}

GridMeasure SquareDensity::discretize(std::size_t cells) const {
  const Grid g = Grid::plane({corner_.x, corner_.x + side_, corner_.y, corner_.y + side_}, cells);
  std::vector<double> w(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Box c = g.cell(k);
    w[k] = mass(c.x_lo, c.x_hi, c.y_lo, c.y_hi);
  }
  return GridMeasure::normalized(g, std::move(w));
}

namespace {

// Smallest t in [lo, hi] with f(t) >= target for a nondecreasing f, to
// kCutTolerance.
template <typename F>
double bisect(F&& f, double lo, double hi, double target) {
  if (!std::isfinite(f(hi))) fail("density", "density evaluation failed");
  if (f(hi) < target - 1e-9) fail("density", "cut level cannot be bracketed");
  while (hi - lo > kCutTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Point> outline(const std::vector<Box>& pieces) {
  // Pieces are either one rectangle or, along the residual path, an optional
  // right-strip rectangle followed by top caps ordered right to left that all
  // reach the top side.
  if (pieces.size() == 1) {
    const Box& b = pieces[0];
    return {{b.x_lo, b.y_lo}, {b.x_hi, b.y_lo}, {b.x_hi, b.y_hi}, {b.x_lo, b.y_hi}};
  }
  const double top = pieces.back().y_hi;
  std::vector<Point> v;
  const Box& leftmost = pieces.back();
  v.push_back({leftmost.x_lo, top});
  for (std::size_t i = pieces.size(); i-- > 0;) {
    const Box& p = pieces[i];
    v.push_back({p.x_lo, p.y_lo});
    v.push_back({p.x_hi, p.y_lo});
  }
  v.push_back({pieces.front().x_hi, top});
  // Drop repeats and collinear interior vertices.
  std::vector<Point> clean;
  for (const auto& p : v)
    if (clean.empty() || !(clean.back() == p)) clean.push_back(p);
  if (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
  bool changed = true;
  while (changed && clean.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const Point& a = clean[(i + clean.size() - 1) % clean.size()];
      const Point& b = clean[i];
      const Point& c = clean[(i + 1) % clean.size()];
      if ((a.x == b.x && b.x == c.x) || (a.y == b.y && b.y == c.y)) {
        clean.erase(clean.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  return clean;
}

}  // namespace

double cell_mass(const SquareDensity& nu, const ConstructedCell& cell) {
  double m = 0.0;
  for (const Box& b : cell.pieces) m += nu.mass(b.x_lo, b.x_hi, b.y_lo, b.y_hi);
  return m;
}

ConstructedPoints construct_points(const SquareDensity& nu, std::size_t n) {
  if (n < 1) fail("parameter", "need at least one point");
  ConstructedPoints out;
  const double x0 = nu.corner().x, y0 = nu.corner().y, L = nu.side();
  const double xL = x0 + L, yL = y0 + L;
  std::size_t m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  while (m * m > n) --m;
  while ((m + 1) * (m + 1) <= n) ++m;
  const std::size_t k = n - m * m;
  out.m = m;
  out.k = k;
  out.case_tag = k == 0 ? ConstructedPoints::Case::PerfectSquare : ConstructedPoints::Case::General;
  const double nd = static_cast<double>(n);
  const double column_mass = k == 0 ? 1.0 / static_cast<double>(m) : 1.0 / std::sqrt(nd);

  // Vertical cuts on the marginal CDF.
  out.column_cuts.push_back(x0);
  for (std::size_t i = 1; i <= m; ++i) {
    if (k == 0 && i == m) {
      out.column_cuts.push_back(xL);
      break;
    }
    const double target = static_cast<double>(i) * column_mass;
    out.column_cuts.push_back(
        bisect([&](double x) { return nu.mass(x0, x, y0, yL); }, out.column_cuts.back(), xL, target));
  }

  // Horizontal cuts per column; dictionary order, bottom to top.
  std::vector<double> column_tops(m + 1, yL);
  for (std::size_t i = 1; i <= m; ++i) {
    const double a = out.column_cuts[i - 1], b = out.column_cuts[i];
    double y_prev = y0;
    for (std::size_t j = 1; j <= m; ++j) {
      double y;
      if (k == 0 && j == m) {
        y = yL;
      } else {
        const double target = static_cast<double>(j) / nd;
        y = bisect([&](double t) { return nu.mass(a, b, y0, t); }, y_prev, yL, target);
      }
      ConstructedCell cell;
      cell.pieces.push_back({a, b, y_prev, y});
      cell.polygon = outline(cell.pieces);
      out.cells.push_back(std::move(cell));
      out.points.push_back({0.5 * (a + b), 0.5 * (y_prev + y)});
      y_prev = y;
    }
    column_tops[i] = y_prev;
  }
  if (k == 0) return out;

  // Residual region R': the right strip traversed bottom to top, then the
  // caps above each column traversed right to left.
  struct Segment {
    bool strip;
    std::size_t column;
    double mass;
  };
  const double xm = out.column_cuts[m];
  std::vector<Segment> path;
  path.push_back({true, 0, nu.mass(xm, xL, y0, yL)});
  for (std::size_t i = m; i >= 1; --i)
    path.push_back({false, i, nu.mass(out.column_cuts[i - 1], out.column_cuts[i], column_tops[i], yL)});

  // Position along the path where cumulative mass reaches `level`:
  // (segment index, coordinate) with the coordinate y for the strip and x
  // for a cap.
  auto locate = [&](double level) {
    double before = 0.0;
    for (std::size_t s = 0; s < path.size(); ++s) {
      const Segment& seg = path[s];
      if (level <= before + seg.mass || s + 1 == path.size()) {
        const double want = std::min(level - before, seg.mass);
        if (seg.strip)
          return std::pair{s, bisect([&](double y) { return nu.mass(xm, xL, y0, y); }, y0, yL, want)};
        const double a = out.column_cuts[seg.column - 1], b = out.column_cuts[seg.column];
        const double top = column_tops[seg.column];
        // Mass of [x, b] grows as x decreases; bisect on the reflected coordinate.
        const double u = bisect([&](double t) { return nu.mass(b - t, b, top, yL); }, 0.0, b - a, want);
        return std::pair{s, b - u};
      }
      before += seg.mass;
    }
    return std::pair{path.size() - 1, out.column_cuts[0]};
  };

  auto piece = [&](std::size_t s, double from, double to) -> Box {
    const Segment& seg = path[s];
    if (seg.strip) return {xm, xL, from, to};
    return {to, from, column_tops[seg.column], yL};  // caps run right to left
  };
  auto segment_start = [&](std::size_t s) {
    return path[s].strip ? y0 : out.column_cuts[path[s].column];
  };
  auto segment_end = [&](std::size_t s) {
    return path[s].strip ? yL : out.column_cuts[path[s].column - 1];
  };

  std::pair<std::size_t, double> from{0, y0};
  for (std::size_t q = 1; q <= k; ++q) {
    const auto to = q == k ? std::pair{path.size() - 1, segment_end(path.size() - 1)}
                           : locate(static_cast<double>(q) / nd);
    ConstructedCell cell;
    cell.strip = true;
    for (std::size_t s = from.first; s <= to.first; ++s) {
      const double a = s == from.first ? from.second : segment_start(s);
      const double b = s == to.first ? to.second : segment_end(s);
      const Box p = piece(s, a, b);
      if (p.x_hi > p.x_lo && p.y_hi > p.y_lo) cell.pieces.push_back(p);
    }
    cell.polygon = outline(cell.pieces);
    out.cells.push_back(std::move(cell));

    const auto mid = locate((static_cast<double>(q) - 0.5) / nd);
    out.points.push_back(path[mid.first].strip ? Point{xL, mid.second} : Point{mid.second, yL});
    from = to;
  }
  return out;
}

SeparationReport verify_separation(const ConstructedPoints& pts, double c, std::size_t n) {
  SeparationReport r;
  r.bound = 1.0 / (2.0 * std::sqrt(c * static_cast<double>(n)));
  r.min_distance = std::numeric_limits<double>::infinity();
  const auto& p = pts.points;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) r.min_distance = std::min(r.min_distance, distance(p[i], p[j]));
  r.passed = r.min_distance >= r.bound;
  return r;
}

std::optional<std::size_t> separation_threshold(const SquareDensity& nu, std::size_t n_max,
                                                std::size_t n_min) {
  std::optional<std::size_t> n0;
  for (std::size_t n = n_max; n >= std::max<std::size_t>(n_min, 2); --n) {
    if (!verify_separation(construct_points(nu, n), nu.c_bound(), n).passed) break;
    n0 = n;
  }
  return n0;
}

double empirical_energy(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  if (n < 2) fail("parameter", "empirical energy needs at least two points");
  std::vector<double> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = distance(pts[i], pts[j]);
      if (d == 0.0) fail("degenerate", "coincident points have energy -infinity");
      s += std::log(d);
    }
    rows[i] = s;
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total / (static_cast<double>(n) * static_cast<double>(n));
}

WeakConvergenceReport weak_convergence_check(const SquareDensity& nu, const std::vector<std::size_t>& ns,
                                             const GridMeasure& nu_grid, double bound) {
  WeakConvergenceReport r;
  r.bound = bound;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i > 0 && ns[i] <= ns[i - 1]) fail("parameter", "n list must be increasing");
    const auto pts = construct_points(nu, ns[i]);
    const EmpiricalMeasure emp(2, pts.points);
    r.ns.push_back(ns[i]);
    r.distances.push_back(bl_distance(emp, nu_grid));
  }
  if (r.distances.size() >= 2) {
    bool dec = true;
    for (std::size_t i = 1; i < r.distances.size(); ++i) dec = dec && r.distances[i] < r.distances[i - 1];
    r.decreasing = dec;
    r.passed = dec && r.distances.back() <= bound;
  }
  return r;
}

void write_points_csv(std::ostream& out, const std::vector<Point>& points) {
  const auto old = out.precision(17);
  out << "index,x,y\n";
  for (std::size_t i = 0; i < points.size(); ++i) out << i << ',' << points[i].x << ',' << points[i].y << '\n';
  out.precision(old);
}

}  // namespace crowdrate
