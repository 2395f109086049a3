#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdrate/energy.hpp"
#include "crowdrate/error.hpp"
#include "crowdrate/grid.hpp"
#include "crowdrate/potential.hpp"
#include "crowdrate/region.hpp"

namespace crowdrate {

struct SolverOptions {
  double el_tolerance = 1e-3;         // in units of V/beta + p_mu
  std::size_t max_iterations = 50000;
  double support_threshold = 1e-8;    // relative to the largest weight
  double boundary_weight_limit = 1e-6;
  bool check_domain = true;
};

// Minimiser of F(w) = sum_i w_i V(x_i) - beta/2 w^T K w over a product of
// scaled simplices. One block for the unconstrained problem; two blocks
// (inside U with mass x, outside with mass 1 - x) for the crowding problem.
struct EquilibriumSolution {
  GridMeasure measure;
  double objective = 0.0;  // F at the returned weights; c_beta when unconstrained
  double el_constant = 0.0;  // Euler-Lagrange constant of block 0
  std::vector<double> block_constants;
  std::vector<std::uint8_t> block;  // block index per node
  std::vector<double> block_mass;
  std::vector<bool> support_mask;
  std::size_t iterations = 0;
  double el_residual = 0.0;
  bool converged = false;
  bool monotone = true;  // F never increased between accepted iterates

  double c_beta() const { return objective; }
};

// Thrown when the iteration budget runs out; carries the best iterate.
class SolverError : public Error {
public:
  SolverError(const std::string& message, EquilibriumSolution best)
      : Error("maxiter", message), best_(std::move(best)) {}
  const EquilibriumSolution& best() const { return best_; }

private:
  EquilibriumSolution best_;
};

EquilibriumSolution solve_equilibrium(const Potential& v, double beta, const Grid& grid,
                                      const SolverOptions& opts = {});

struct ElReport {
  double on_support_deviation = 0.0;   // max |phi - C| over the support
  double off_support_violation = 0.0;  // min (phi - C) off the support
  std::vector<double> constants;       // C per block
  std::size_t support_size = 0;
  bool passed = false;
};

// Recomputes phi = V/beta + p_mu from the measure alone and checks the
// Euler-Lagrange conditions blockwise.
ElReport verify_euler_lagrange(const EquilibriumSolution& sol, const Potential& v, double beta,
                               double tol);

struct ObstacleReport {
  double max_relative_error = 0.0;  // |rho - DeltaQ/2pi| / sup target, eroded support
  std::size_t eroded_nodes = 0;
  double max_density = 0.0;         // all nodes, including the jagged edge layer
  double max_eroded_density = 0.0;  // checked against density_bound
  double density_bound = 0.0;        // C2 = sup_S DeltaQ/(2pi) * (1 + tol)
  double off_support_max_density = 0.0;
  bool passed = false;
};

ObstacleReport obstacle_identity_check(const EquilibriumSolution& sol, const Potential& v, double beta,
                                       double tol, std::size_t erosion_cells = 3);

// Minimiser subject to mu(U) = x. `start` overrides the cold start built from
// `reference` (the unconstrained solution), rescaled blockwise to the masses.
EquilibriumSolution solve_constrained(const Potential& v, double beta, const Grid& grid,
                                      const Region& region, double x, const SolverOptions& opts = {},
                                      const GridMeasure* reference = nullptr,
                                      const GridMeasure* start = nullptr);

struct ProfileDiagnostics {
  std::size_t iterations = 0;
  double el_residual = 0.0;
  bool converged = false;
  std::string message;
};

struct RateProfile {
  std::vector<double> xs;
  std::vector<double> gammas;
  std::vector<std::optional<GridMeasure>> minimizers;  // empty where the solve failed
  std::vector<ProfileDiagnostics> diagnostics;
  double x_star = 0.0;
  double c_beta = 0.0;
};

enum class SweepMode { SerialWarmStart, ParallelColdStart };

RateProfile gamma_profile(const Potential& v, double beta, const Grid& grid, const Region& region,
                          const std::vector<double>& xs, const SolverOptions& opts = {},
                          SweepMode mode = SweepMode::SerialWarmStart, unsigned threads = 1,
                          const EquilibriumSolution* equilibrium = nullptr);

// Euclidean projection of v onto {w >= 0, sum w = mass}.
void project_to_simplex(std::span<double> v, double mass);

}  // namespace crowdrate
