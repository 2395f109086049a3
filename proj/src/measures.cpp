#include "crowdrate/measures.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "crowdrate/error.hpp"

namespace crowdrate {

double measure_of_region(const GridMeasure& mu, const Region& region) {
  const Grid& g = mu.grid();
  if (g.dimension() != region.dimension()) fail("dimension", "measure and region dimensions differ");
  double mass = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (mu.weight(k) != 0.0 && region.contains(g.node(k))) mass += mu.weight(k);
  return std::clamp(mass, 0.0, 1.0);
}

EmpiricalMeasure empirical_from_sample(std::span<const double> points) {
  std::vector<Point> p;
  p.reserve(points.size());
  for (double x : points) p.push_back({x, 0.0});
  if (p.empty()) fail("parameter", "empty sample");
  return EmpiricalMeasure(1, std::move(p));
}

EmpiricalMeasure empirical_from_sample(std::span<const Point> points) {
  if (points.empty()) fail("parameter", "empty sample");
  return EmpiricalMeasure(2, {points.begin(), points.end()});
}

BlDictionary::BlDictionary(int dimension, Box box)
    : BlDictionary(dimension, box, dimension == 1 ? 48 : 20, {0.05, 0.1, 0.25, 0.5, 1.0}) {}

BlDictionary::BlDictionary(int dimension, Box box, int cells, std::vector<double> radii)
    : dimension_(dimension), box_(box) {
  if (dimension != 1 && dimension != 2) fail("dimension", "dimension must be 1 or 2");
  if (cells < 1) fail("config", "BL dictionary is empty");
  for (double r : radii)
    if (!(r > 0.0 && r <= 1.0)) fail("config", "bump radii must lie in (0, 1]");
  auto lattice = [cells](double lo, double hi) {
    std::vector<double> t(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / cells;
    return t;
  };
  const auto xs = lattice(box.x_lo, box.x_hi);
  const auto ys = dimension == 2 ? lattice(box.y_lo, box.y_hi) : std::vector<double>{0.0};
  for (double t : xs) ramps_.push_back({0, t});
  if (dimension == 2)
    for (double t : ys) ramps_.push_back({1, t});
  for (double y : ys)
    for (double x : xs)
      for (double r : radii) bumps_.push_back({{x, y}, r});
  if (size() == 0) fail("config", "BL dictionary is empty");
}

BlDictionary BlDictionary::covering(int dimension, Box a, Box b) {
  auto down = [](double v) { return std::floor(v * 2.0) / 2.0; };
  auto up = [](double v) { return std::ceil(v * 2.0) / 2.0; };
  Box box{down(std::min(a.x_lo, b.x_lo)), up(std::max(a.x_hi, b.x_hi)),
          down(std::min(a.y_lo, b.y_lo)), up(std::max(a.y_hi, b.y_hi))};
  if (box.x_hi <= box.x_lo) box.x_hi = box.x_lo + 0.5;
  if (dimension == 2 && box.y_hi <= box.y_lo) box.y_hi = box.y_lo + 0.5;
  return BlDictionary(dimension, box);
}

double BlDictionary::evaluate(std::size_t f, const Point& p) const {
  if (f < ramps_.size()) {
    const Ramp& r = ramps_[f];
    const double v = (r.axis == 0 ? p.x : p.y) - r.threshold;
    return std::clamp(v, -1.0, 1.0);
  }
  const Bump& b = bumps_[f - ramps_.size()];
  const double d = dimension_ == 1 ? std::abs(p.x - b.center.x) : distance(p, b.center);
  return std::max(0.0, b.radius - d);
}

namespace {

int dimension_of(MeasureRef m) {
  return std::visit(
      [](auto* p) {
        using T = std::decay_t<decltype(*p)>;
        if constexpr (std::is_same_v<T, GridMeasure>) return p->grid().dimension();
        else return p->dimension();
      },
      m);
}

Box box_of(MeasureRef m) {
  return std::visit(
      [](auto* p) {
        using T = std::decay_t<decltype(*p)>;
        if constexpr (std::is_same_v<T, GridMeasure>) return support_box(*p);
        else return p->bounding_box();
      },
      m);
}

std::vector<double> integrals(MeasureRef m, const BlDictionary& dict) {
  std::vector<double> out(dict.size(), 0.0);
  std::visit(
      [&](auto* p) {
        using T = std::decay_t<decltype(*p)>;
        if constexpr (std::is_same_v<T, GridMeasure>) {
          const Grid& g = p->grid();
          for (std::size_t k = 0; k < g.size(); ++k) {
            const double w = p->weight(k);
            if (w == 0.0) continue;
            const Point x = g.node(k);
            for (std::size_t f = 0; f < out.size(); ++f) out[f] += w * dict.evaluate(f, x);
          }
        } else {
          for (const Point& x : p->points())
            for (std::size_t f = 0; f < out.size(); ++f) out[f] += dict.evaluate(f, x);
          for (double& v : out) v *= p->atom_weight();
        }
      },
      m);
  return out;
}

}  // namespace

Box support_box(const GridMeasure& mu) { return mu.grid().domain(); }

double bl_distance(MeasureRef a, MeasureRef b, const BlDictionary& dictionary) {
  if (dimension_of(a) != dimension_of(b) || dimension_of(a) != dictionary.dimension())
    fail("dimension", "BL distance needs measures of the same dimension");
  if (dictionary.size() == 0) fail("config", "BL dictionary is empty");
  const auto ia = integrals(a, dictionary);
  const auto ib = integrals(b, dictionary);
  double best = 0.0;
  for (std::size_t f = 0; f < ia.size(); ++f) best = std::max(best, std::abs(ia[f] - ib[f]));
  return best;
}

namespace {
double bl_default(MeasureRef a, MeasureRef b) {
  if (dimension_of(a) != dimension_of(b)) fail("dimension", "BL distance needs measures of the same dimension");
  return bl_distance(a, b, BlDictionary::covering(dimension_of(a), box_of(a), box_of(b)));
}
}  // namespace

double bl_distance(const GridMeasure& a, const GridMeasure& b) { return bl_default(&a, &b); }
double bl_distance(const GridMeasure& a, const EmpiricalMeasure& b) { return bl_default(&a, &b); }
double bl_distance(const EmpiricalMeasure& a, const GridMeasure& b) { return bl_default(&a, &b); }
double bl_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) { return bl_default(&a, &b); }

void write_measure_csv(std::ostream& out, const GridMeasure& mu) {
  const Grid& g = mu.grid();
  const auto old = out.precision(17);
  out << (g.dimension() == 1 ? "index,x,weight\n" : "index,x,y,weight\n");
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point p = g.node(k);
    out << k << ',' << p.x << ',';
    if (g.dimension() == 2) out << p.y << ',';
    out << mu.weight(k) << '\n';
  }
  out.precision(old);
}

}  // namespace crowdrate
