#pragma once

#include <span>
#include <vector>

#include "crowdrate/grid.hpp"
#include "crowdrate/potential.hpp"

namespace crowdrate {

// Mean of log|z - w| over pairs of points of the unit square,
// (1/h^4) int_{cell^2} log|z - w| at h = 1.
inline constexpr double kSquareSelfCell = -0.8050867219500872;
// Mean of log|x - y| over pairs of points of the unit interval.
inline constexpr double kIntervalSelfCell = -1.5;

// Discrete logarithmic kernel on a uniform grid: K_ij = log|x_i - x_j| off
// the diagonal and the cell-averaged kernel on it. Translation invariance
// means one table indexed by |di| (and |dj|) describes the whole matrix.
class LogKernel {
public:
  explicit LogKernel(const Grid& grid);

  const Grid& grid() const { return grid_; }
  double self_cell() const { return self_cell_; }
  double entry(std::size_t i, std::size_t j) const;

  // out = K w. Nodes with zero weight are skipped; the summation order is
  // fixed so results are bit-stable.
  void apply(std::span<const double> w, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> w) const;

  // w^T K w.
  double quadratic_form(std::span<const double> w) const;

private:
  Grid grid_;
  double self_cell_;
  std::vector<double> table_;
};

struct EnergyReport {
  double sigma = 0.0;               // Sigma(mu)
  double potential_term = 0.0;      // int V dmu
  double i_beta = 0.0;              // potential_term - beta/2 sigma - c_beta
  double c_beta_used = 0.0;
  double diagonal_correction = 0.0; // sum_i w_i^2 * self-cell, included in sigma
};

double log_energy(const GridMeasure& mu);
double log_energy(const GridMeasure& mu, const LogKernel& kernel);

// p_mu(z) = int log(1/|z - t|) dmu(t).
double log_potential(const GridMeasure& mu, const Point& z);

EnergyReport rate_i_beta(const GridMeasure& mu, const Potential& v, double beta, double c_beta);
EnergyReport rate_i_beta(const GridMeasure& mu, const LogKernel& kernel, const Potential& v,
                         double beta, double c_beta);

// mu * N(0, eps I) on a planar grid; the kernel is integrated over cells and
// renormalised per source node where the domain clips its tails.
GridMeasure gaussian_smooth(const GridMeasure& mu, double eps);

// Deterministic pairwise summation.
double pairwise_sum(std::span<const double> values);

}  // namespace crowdrate
