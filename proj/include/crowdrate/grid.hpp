#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crowdrate/point.hpp"

namespace crowdrate {

// Axis-aligned box; for dimension 1 only the x range is meaningful.
struct Box {
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 0.0;
};

// Uniform cell-centred grid. Node k sits at the centre of its cell, so the
// cells tile the domain exactly. 2D nodes are stored row-major: k = iy * nx + ix.
class Grid {
public:
  static Grid line(double lo, double hi, std::size_t nodes);
  static Grid plane(Box domain, std::size_t nodes_per_axis);
  static Grid plane(Box domain, std::size_t nx, std::size_t ny);

  int dimension() const { return dimension_; }
  const Box& domain() const { return domain_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double cell_volume() const { return dimension_ == 1 ? hx_ : hx_ * hy_; }

  Point node(std::size_t k) const;
  std::size_t ix(std::size_t k) const { return k % nx_; }
  std::size_t iy(std::size_t k) const { return k / nx_; }
  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx_ + ix; }

  // Cell of node k as a box.
  Box cell(std::size_t k) const;

  friend bool operator==(const Grid& a, const Grid& b);

private:
  Grid() = default;

  int dimension_ = 1;
  Box domain_;
  std::size_t nx_ = 0, ny_ = 1;
  double hx_ = 0.0, hy_ = 1.0;
};

// Probability weights on the nodes of a grid.
class GridMeasure {
public:
  // Validates nonnegativity and unit mass (|sum - 1| <= 1e-12 after the
  // caller's normalisation); throws Error("measure") otherwise.
  GridMeasure(Grid grid, std::vector<double> weights);

  // Rescales arbitrary nonnegative weights to unit mass.
  static GridMeasure normalized(Grid grid, std::vector<double> weights);
  static GridMeasure uniform(const Grid& grid);
  // Density sampled at nodes, then normalised.
  template <typename F>
  static GridMeasure from_density(const Grid& grid, F&& density) {
    std::vector<double> w(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) w[k] = density(grid.node(k));
    return normalized(grid, std::move(w));
  }
  // Unit mass on the single node nearest to p.
  static GridMeasure delta(const Grid& grid, const Point& p);

  const Grid& grid() const { return grid_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t k) const { return weights_[k]; }
  std::size_t size() const { return weights_.size(); }
  double density(std::size_t k) const { return weights_[k] / grid_.cell_volume(); }

private:
  Grid grid_;
  std::vector<double> weights_;
};

// Uniform atoms 1/n on a list of points (or arbitrary nonnegative weights when
// pooling samples).
class EmpiricalMeasure {
public:
  EmpiricalMeasure(int dimension, std::vector<Point> points);

  int dimension() const { return dimension_; }
  std::span<const Point> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double atom_weight() const { return 1.0 / static_cast<double>(points_.size()); }
  Box bounding_box() const;

private:
  int dimension_;
  std::vector<Point> points_;
};

}  // namespace crowdrate
