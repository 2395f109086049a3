#pragma once

// Brute-force reference computations used by the tests and the `oracle`
// command. Nothing here calls the solver, kernel, or sampler code.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "crowdrate/grid.hpp"
#include "crowdrate/potential.hpp"
#include "crowdrate/region.hpp"

namespace crowdrate::oracle {

double semicircle_density(double x);

struct SemicircleMoments {
  double potential_term = 0.0;  // int x^2/2 d sigma
  double sigma = 0.0;           // int int log|x - y| d sigma d sigma
  double c_beta = 0.0;          // beta = 2
};

// Offset midpoint rules in the angle variable x = 2 cos t.
SemicircleMoments semicircle_moments(std::size_t nodes = 3000);

// Mean of log|z - w| over independent uniform points of the unit square.
double unit_square_self_energy();

// Mean of log|x - y| over independent uniform points of [0, 1].
double unit_interval_self_energy();

// P(X_2(U) = k), k = 0, 1, 2, for the real two-point ensemble with U a
// union of intervals, by composite Gauss-Legendre over [-L, L]^2 split at the
// endpoints of U.
std::array<double, 3> two_point_crowding(const Potential& v, double beta, const std::vector<Interval>& U,
                                         double L = 8.0);

// Probability of |x1 - x2| in each [edges[i], edges[i+1]) for the same model.
std::vector<double> two_point_gap_histogram(const Potential& v, double beta, const std::vector<double>& edges,
                                            double L = 8.0);

// log P(X_n(U) = k), k = 0..n, for beta = 2 and V = x^2/2, where the ensemble
// is determinantal. X is then a sum of independent Bernoulli(g_i), g_i the
// eigenvalues of the Gram matrix of the first n orthonormal Hermite functions
// restricted to U. Long double Gram quadrature and cyclic Jacobi.
std::vector<double> hermite_count_law(std::size_t n, const std::vector<Interval>& U);

// E x^2 under the one-point density exp(-V).
double one_point_second_moment(const Potential& v, double L = 12.0);

struct MonteCarloEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// int int log|z - w| g(z) g(w) over the unit square from `pairs` independent
// pairs drawn by rejection from g <= g_max.
MonteCarloEstimate square_log_energy(const std::function<double(double, double)>& g, double g_max,
                                     std::size_t pairs, std::uint64_t seed);

// Column cuts x_1 < ... < x_m of the unit square with x-marginal mass
// `column_mass` each, by inverting the cumulative marginal tabulated on
// `samples` midpoints.
std::vector<double> column_cuts(const std::function<double(double, double)>& g, std::size_t m, double column_mass,
                                std::size_t samples = 1000000);

// Rate function by a quadratic penalty on mu(U) - t with the target t shifted
// until the achieved mass matches x. Uses a dense kernel and its own simplex
// projection.
class PenaltyOracle {
public:
  PenaltyOracle(const Potential& v, double beta, const Grid& grid, const Region& U);

  struct Result {
    double gamma = 0.0;
    double achieved = 0.0;  // mu(U) of the penalised minimiser
    double objective = 0.0;
    std::size_t iterations = 0;
  };

  double c_beta() const { return c_beta_; }
  Result gamma(double x);

private:
  std::vector<double> minimize(std::vector<double> w, double rho, double target, std::size_t& iterations) const;
  double objective(const std::vector<double>& w) const;

  std::size_t size_ = 0;
  double beta_ = 0.0;
  std::vector<double> potential_;
  std::vector<double> kernel_;  // dense, row-major
  std::vector<char> inside_;
  double lipschitz_ = 0.0;
  double c_beta_ = 0.0;
  std::vector<double> equilibrium_;
};

}  // namespace crowdrate::oracle
