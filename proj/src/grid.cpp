#include "crowdrate/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crowdrate/error.hpp"

namespace crowdrate {

namespace {

// Neumaier summation; naive sums drift past 1e-12 on large grids.
double accurate_sum(const std::vector<double>& xs) {
  double total = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = total + x;
    comp += std::abs(total) >= std::abs(x) ? (total - t) + x : (x - t) + total;
    total = t;
  }
  return total + comp;
}

}  // namespace

Grid Grid::line(double lo, double hi, std::size_t nodes) {
  if (nodes < 2) fail("grid", "grid needs at least 2 nodes per axis");
  if (!(hi > lo)) fail("grid", "grid domain must have positive length");
  Grid g;
  g.dimension_ = 1;
  g.domain_ = Box{lo, hi, 0.0, 0.0};
  g.nx_ = nodes;
  g.ny_ = 1;
  g.hx_ = (hi - lo) / static_cast<double>(nodes);
  g.hy_ = 1.0;
  return g;
}

Grid Grid::plane(Box domain, std::size_t nodes_per_axis) {
  return plane(domain, nodes_per_axis, nodes_per_axis);
}

Grid Grid::plane(Box domain, std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) fail("grid", "grid needs at least 2 nodes per axis");
  if (!(domain.x_hi > domain.x_lo) || !(domain.y_hi > domain.y_lo))
    fail("grid", "grid domain must have positive area");
  Grid g;
  g.dimension_ = 2;
  g.domain_ = domain;
  g.nx_ = nx;
  g.ny_ = ny;
  g.hx_ = (domain.x_hi - domain.x_lo) / static_cast<double>(nx);
  g.hy_ = (domain.y_hi - domain.y_lo) / static_cast<double>(ny);
  return g;
}

Point Grid::node(std::size_t k) const {
  const double x = domain_.x_lo + (static_cast<double>(ix(k)) + 0.5) * hx_;
  if (dimension_ == 1) return {x, 0.0};
  return {x, domain_.y_lo + (static_cast<double>(iy(k)) + 0.5) * hy_};
}

Box Grid::cell(std::size_t k) const {
  const double x0 = domain_.x_lo + static_cast<double>(ix(k)) * hx_;
  if (dimension_ == 1) return {x0, x0 + hx_, 0.0, 0.0};
  const double y0 = domain_.y_lo + static_cast<double>(iy(k)) * hy_;
  return {x0, x0 + hx_, y0, y0 + hy_};
}

bool operator==(const Grid& a, const Grid& b) {
  return a.dimension_ == b.dimension_ && a.nx_ == b.nx_ && a.ny_ == b.ny_ &&
         a.domain_.x_lo == b.domain_.x_lo && a.domain_.x_hi == b.domain_.x_hi &&
         a.domain_.y_lo == b.domain_.y_lo && a.domain_.y_hi == b.domain_.y_hi;
}

GridMeasure::GridMeasure(Grid grid, std::vector<double> weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
  if (weights_.size() != grid_.size()) fail("measure", "weight count does not match grid");
  for (double w : weights_)
    if (!(w >= 0.0) || !std::isfinite(w)) fail("measure", "weights must be finite and nonnegative");
  if (std::abs(accurate_sum(weights_) - 1.0) > 1e-12) fail("measure", "weights must sum to 1");
}

GridMeasure GridMeasure::normalized(Grid grid, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail("measure", "weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) fail("measure", "cannot normalise zero mass");
  for (double& w : weights) w /= total;
  // One more pass so the stored sum is within a few ulps of 1.
  const double again = accurate_sum(weights);
  for (double& w : weights) w /= again;
  return GridMeasure(std::move(grid), std::move(weights));
}

GridMeasure GridMeasure::uniform(const Grid& grid) {
  return normalized(grid, std::vector<double>(grid.size(), 1.0));
}

GridMeasure GridMeasure::delta(const Grid& grid, const Point& p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = distance(grid.node(k), p);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  std::vector<double> w(grid.size(), 0.0);
  w[best] = 1.0;
  return GridMeasure(grid, std::move(w));
}

EmpiricalMeasure::EmpiricalMeasure(int dimension, std::vector<Point> points)
    : dimension_(dimension), points_(std::move(points)) {
  if (dimension != 1 && dimension != 2) fail("dimension", "dimension must be 1 or 2");
  if (points_.empty()) fail("parameter", "empirical measure needs at least one point");
  for (const auto& p : points_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail("parameter", "non-finite point");
}

Box EmpiricalMeasure::bounding_box() const {
  Box b{points_[0].x, points_[0].x, points_[0].y, points_[0].y};
  for (const auto& p : points_) {
    b.x_lo = std::min(b.x_lo, p.x);
    b.x_hi = std::max(b.x_hi, p.x);
    b.y_lo = std::min(b.y_lo, p.y);
    b.y_hi = std::max(b.y_hi, p.y);
  }
  return b;
}

}  // namespace crowdrate
