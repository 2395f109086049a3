#include "crowdrate/equilibrium.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "crowdrate/measures.hpp"

namespace crowdrate {

void project_to_simplex(std::span<double> v, double mass) {
  if (v.empty()) return;
  if (mass <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumulative = 0.0, tau = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cumulative += s[i];
    const double t = (cumulative - mass) / static_cast<double>(i + 1);
    if (i + 1 == s.size() || s[i + 1] <= t) {
      tau = t;
      break;
    }
  }
  for (double& x : v) x = std::max(0.0, x - tau);
  // Remove the rounding drift so each block carries its mass to ~1 ulp.
  double total = 0.0;
  for (double x : v) total += x;
  if (total > 0.0)
    for (double& x : v) x *= mass / total;
}

namespace {

struct Problem {
  const LogKernel& kernel;
  std::vector<double> v;
  double beta;
  std::vector<std::uint8_t> block;
  std::vector<double> mass;
  std::vector<std::vector<std::size_t>> members;

  Problem(const LogKernel& k, const Potential& pot, double b, std::vector<std::uint8_t> blk,
          std::vector<double> masses)
      : kernel(k), beta(b), block(std::move(blk)), mass(std::move(masses)) {
    const Grid& g = k.grid();
    v.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      v[i] = pot(g.node(i));
      if (!std::isfinite(v[i])) fail("potential", "potential is not finite on the grid");
    }
    members.resize(mass.size());
    for (std::size_t i = 0; i < block.size(); ++i) members[block[i]].push_back(i);
  }

  double objective(std::span<const double> w, std::span<const double> kw) const {
    std::vector<double> terms(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) terms[i] = w[i] * (v[i] - 0.5 * beta * kw[i]);
    return pairwise_sum(terms);
  }

  void project(std::vector<double>& w) const {
    std::vector<double> buf;
    for (std::size_t b = 0; b < members.size(); ++b) {
      buf.resize(members[b].size());
      for (std::size_t a = 0; a < buf.size(); ++a) buf[a] = w[members[b][a]];
      project_to_simplex(buf, mass[b]);
      for (std::size_t a = 0; a < buf.size(); ++a) w[members[b][a]] = buf[a];
    }
  }
};

struct Kkt {
  double residual = 0.0;
  std::vector<double> constants;
  std::vector<bool> support;
};

// phi = grad/beta = V/beta - K w. Blockwise C = weighted mean of phi over the
// support; residual = max(|phi - C| on support, C - phi off support).
Kkt kkt(const Problem& p, std::span<const double> w, std::span<const double> kw, double rel_threshold) {
  const double wmax = *std::max_element(w.begin(), w.end());
  const double thr = rel_threshold * wmax;
  Kkt out;
  out.support.assign(w.size(), false);
  out.constants.assign(p.members.size(), 0.0);
  std::vector<double> phi(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    phi[i] = p.v[i] / p.beta - kw[i];
    out.support[i] = w[i] > thr;
  }
  for (std::size_t b = 0; b < p.members.size(); ++b) {
    if (p.mass[b] <= 0.0) continue;
    double num = 0.0, den = 0.0;
    for (std::size_t i : p.members[b])
      if (out.support[i]) {
        num += w[i] * phi[i];
        den += w[i];
      }
    if (den <= 0.0) {
      out.residual = std::numeric_limits<double>::infinity();
      continue;
    }
    const double c = num / den;
    out.constants[b] = c;
    for (std::size_t i : p.members[b]) {
      const double r = out.support[i] ? std::abs(phi[i] - c) : c - phi[i];
      out.residual = std::max(out.residual, r);
    }
  }
  return out;
}

EquilibriumSolution package(const Problem& p, std::vector<double> w, double f, const Kkt& k,
                            std::size_t iterations, bool converged, bool monotone) {
  const Grid& g = p.kernel.grid();
  EquilibriumSolution s{GridMeasure::normalized(g, std::move(w)), 0.0, 0.0, {}, {}, {}, {}, 0, 0.0, false, true};
  s.objective = f;
  s.block_constants = k.constants;
  s.el_constant = k.constants.empty() ? 0.0 : k.constants[0];
  s.block = p.block;
  s.block_mass = p.mass;
  s.support_mask = k.support;
  s.iterations = iterations;
  s.el_residual = k.residual;
  s.converged = converged;
  s.monotone = monotone;
  return s;
}

void check_domain(const EquilibriumSolution& s, const SolverOptions& opts) {
  if (!opts.check_domain) return;
  const Grid& g = s.measure.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const bool edge = g.ix(k) == 0 || g.ix(k) + 1 == g.nx() ||
                      (g.dimension() == 2 && (g.iy(k) == 0 || g.iy(k) + 1 == g.ny()));
    if (edge && s.measure.weight(k) >= opts.boundary_weight_limit)
      fail("domain-too-small", "equilibrium mass reaches the grid boundary; enlarge the domain");
  }
}

// Accelerated projected gradient with backtracking line search and a monotone
// safeguard: a trial point that raises F is rejected and the momentum is
// restarted, so accepted iterates never increase F.
EquilibriumSolution minimize(const Problem& p, std::vector<double> x, const SolverOptions& opts) {
  const std::size_t n = x.size();
  p.project(x);
  std::vector<double> kx = p.kernel.apply(x);
  double fx = p.objective(x, kx);

  std::vector<double> x_old = x, kx_old = kx;
  std::vector<double> y = x, ky = kx, z(n), kz(n), g(n), d(n);
  double theta = 1.0;
  double step = 1.0;
  bool monotone = true;

  Kkt k = kkt(p, x, kx, opts.support_threshold);
  if (k.residual <= opts.el_tolerance) return package(p, x, fx, k, 0, true, true);

  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) g[i] = p.v[i] - p.beta * ky[i];
    const double fy = p.objective(y, ky);

    double fz = 0.0;
    for (int tries = 0;; ++tries) {
      for (std::size_t i = 0; i < n; ++i) z[i] = y[i] - step * g[i];
      p.project(z);
      p.kernel.apply(z, kz);
      fz = p.objective(z, kz);
      double lin = 0.0, quad = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = z[i] - y[i];
        lin += g[i] * d[i];
        quad += d[i] * d[i];
      }
      if (fz <= fy + lin + quad / (2.0 * step) + 1e-14 * std::abs(fy) || tries > 60) break;
      step *= 0.5;
    }

    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    double restart_dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) restart_dot += g[i] * (z[i] - x[i]);

    x_old.swap(x);
    kx_old.swap(kx);
    if (fz <= fx) {
      x = z;
      kx = kz;
      fx = fz;
    } else {
      x = x_old;
      kx = kx_old;
    }
    if (fx > p.objective(x_old, kx_old)) monotone = false;

    if (restart_dot > 0.0 || fz > fx) {
      theta = 1.0;
      y = x;
      ky = kx;
    } else {
      const double a = theta / theta_next;
      const double b = (theta - 1.0) / theta_next;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] + a * (z[i] - x[i]) + b * (x[i] - x_old[i]);
        ky[i] = kx[i] + a * (kz[i] - kx[i]) + b * (kx[i] - kx_old[i]);
      }
      theta = theta_next;
    }

    k = kkt(p, x, kx, opts.support_threshold);
    if (k.residual <= opts.el_tolerance) return package(p, x, fx, k, it, true, monotone);
    step *= 1.05;
  }
  auto best = package(p, x, fx, k, opts.max_iterations, false, monotone);
  throw SolverError("projected gradient did not reach the Euler-Lagrange tolerance", std::move(best));
}

std::vector<double> initial_uniform(const Problem& p) {
  std::vector<double> w(p.block.size(), 0.0);
  for (std::size_t b = 0; b < p.members.size(); ++b)
    for (std::size_t i : p.members[b]) w[i] = p.mass[b] / static_cast<double>(p.members[b].size());
  return w;
}

// Restricts `source` to each block and rescales it to the block mass; blocks
// where the source has no mass fall back to uniform.
std::vector<double> rescale_blocks(const Problem& p, const GridMeasure& source) {
  std::vector<double> w(p.block.size(), 0.0);
  for (std::size_t b = 0; b < p.members.size(); ++b) {
    double have = 0.0;
    for (std::size_t i : p.members[b]) have += source.weight(i);
    for (std::size_t i : p.members[b])
      w[i] = have > 0.0 ? source.weight(i) * p.mass[b] / have
                        : p.mass[b] / static_cast<double>(p.members[b].size());
  }
  return w;
}

}  // namespace

EquilibriumSolution solve_equilibrium(const Potential& v, double beta, const Grid& grid,
                                      const SolverOptions& opts) {
  if (!(beta > 0.0)) fail("parameter", "beta must be positive");
  const LogKernel kernel(grid);
  Problem p(kernel, v, beta, std::vector<std::uint8_t>(grid.size(), 0), {1.0});
  auto sol = minimize(p, initial_uniform(p), opts);
  check_domain(sol, opts);
  return sol;
}

ElReport verify_euler_lagrange(const EquilibriumSolution& sol, const Potential& v, double beta,
                               double tol) {
  if (!(beta > 0.0)) fail("parameter", "beta must be positive");
  const GridMeasure& mu = sol.measure;
  const Grid& g = mu.grid();
  const std::size_t blocks = sol.block_mass.empty() ? 1 : sol.block_mass.size();
  std::vector<double> num(blocks, 0.0), den(blocks, 0.0);
  std::vector<double> phi(g.size());
  ElReport r;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.node(i);
    phi[i] = v(x) / beta + log_potential(mu, x);
    const std::size_t b = sol.block.empty() ? 0 : sol.block[i];
    if (sol.support_mask[i]) {
      num[b] += mu.weight(i) * phi[i];
      den[b] += mu.weight(i);
      ++r.support_size;
    }
  }
  if (r.support_size == 0) fail("degenerate", "empty support");
  r.constants.assign(blocks, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    const double m = sol.block_mass.empty() ? 1.0 : sol.block_mass[b];
    if (m <= 0.0) continue;
    if (den[b] <= 0.0) fail("degenerate", "a block with positive mass has empty support");
    r.constants[b] = num[b] / den[b];
  }
  r.off_support_violation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t b = sol.block.empty() ? 0 : sol.block[i];
    const double m = sol.block_mass.empty() ? 1.0 : sol.block_mass[b];
    if (m <= 0.0) continue;
    const double gap = phi[i] - r.constants[b];
    if (sol.support_mask[i]) r.on_support_deviation = std::max(r.on_support_deviation, std::abs(gap));
    else r.off_support_violation = std::min(r.off_support_violation, gap);
  }
  if (!std::isfinite(r.off_support_violation)) r.off_support_violation = 0.0;
  r.passed = r.on_support_deviation <= tol && r.off_support_violation >= -tol;
  return r;
}

ObstacleReport obstacle_identity_check(const EquilibriumSolution& sol, const Potential& v, double beta,
                                       double tol, std::size_t erosion_cells) {
  const GridMeasure& mu = sol.measure;
  const Grid& g = mu.grid();
  if (g.dimension() != 2) fail("dimension", "the obstacle identity is checked on planar grids");
  if (!v.plane_admissible()) fail("potential", "potential must be C^{1,1} on the plane");
  const double area = g.cell_volume();
  const auto e = static_cast<long>(erosion_cells);
  const long nx = static_cast<long>(g.nx()), ny = static_cast<long>(g.ny());

  ObstacleReport r;
  std::vector<std::size_t> eroded;
  double sup_target = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double rho = mu.weight(k) / area;
    r.max_density = std::max(r.max_density, rho);
    if (!sol.support_mask[k]) {
      r.off_support_max_density = std::max(r.off_support_max_density, rho);
      continue;
    }
    sup_target = std::max(sup_target, v.laplacian(g.node(k), 2) / beta / (2.0 * std::numbers::pi));
    const long ix = static_cast<long>(g.ix(k)), iy = static_cast<long>(g.iy(k));
    bool interior = true;
    for (long dy = -e; dy <= e && interior; ++dy)
      for (long dx = -e; dx <= e && interior; ++dx) {
        const long jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jy < 0 || jx >= nx || jy >= ny ||
            !sol.support_mask[g.index(static_cast<std::size_t>(jx), static_cast<std::size_t>(jy))])
          interior = false;
      }
    if (interior) eroded.push_back(k);
  }
  r.eroded_nodes = eroded.size();
  r.density_bound = sup_target * (1.0 + tol);
  if (sup_target > 0.0) {
    for (std::size_t k : eroded) {
      const double target = v.laplacian(g.node(k), 2) / beta / (2.0 * std::numbers::pi);
      r.max_relative_error = std::max(r.max_relative_error, std::abs(mu.weight(k) / area - target) / sup_target);
      r.max_eroded_density = std::max(r.max_eroded_density, mu.weight(k) / area);
    }
  }
  r.passed = !eroded.empty() && r.max_relative_error <= tol && r.max_eroded_density <= r.density_bound &&
             r.off_support_max_density <= 1e-4;
  return r;
}

EquilibriumSolution solve_constrained(const Potential& v, double beta, const Grid& grid,
                                      const Region& region, double x, const SolverOptions& opts,
                                      const GridMeasure* reference, const GridMeasure* start) {
  if (!(beta > 0.0)) fail("parameter", "beta must be positive");
  if (!(x >= 0.0 && x <= 1.0)) fail("parameter", "crowding level must lie in [0, 1]");
  require_boundary_free(grid, region);
  std::vector<std::uint8_t> block(grid.size());
  std::size_t inside = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    block[k] = region.contains(grid.node(k)) ? 0 : 1;
    inside += block[k] == 0;
  }
  if ((inside == 0 && x > 0.0) || (inside == grid.size() && x < 1.0))
    fail("parameter", "crowding level is infeasible on this grid");
  const LogKernel kernel(grid);
  Problem p(kernel, v, beta, std::move(block), {x, 1.0 - x});
  std::vector<double> w0;
  if (start) w0 = rescale_blocks(p, *start);
  else if (reference) w0 = rescale_blocks(p, *reference);
  else w0 = initial_uniform(p);
  auto sol = minimize(p, std::move(w0), opts);
  check_domain(sol, opts);
  return sol;
}

RateProfile gamma_profile(const Potential& v, double beta, const Grid& grid, const Region& region,
                          const std::vector<double>& xs, const SolverOptions& opts, SweepMode mode,
                          unsigned threads, const EquilibriumSolution* equilibrium) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= 0.0 && xs[i] <= 1.0)) fail("parameter", "crowding levels must lie in [0, 1]");
    if (i > 0 && xs[i] < xs[i - 1]) fail("parameter", "crowding levels must be sorted");
  }
  std::optional<EquilibriumSolution> own;
  if (!equilibrium) {
    own = solve_equilibrium(v, beta, grid, opts);
    equilibrium = &*own;
  }
  RateProfile prof;
  prof.xs = xs;
  prof.c_beta = equilibrium->objective;
  prof.x_star = measure_of_region(equilibrium->measure, region);
  prof.gammas.assign(xs.size(), std::numeric_limits<double>::quiet_NaN());
  prof.diagnostics.assign(xs.size(), {});
  std::vector<std::optional<GridMeasure>> minimizers(xs.size());

  auto solve_one = [&](std::size_t i, const GridMeasure* start) {
    try {
      auto s = solve_constrained(v, beta, grid, region, xs[i], opts, &equilibrium->measure, start);
      prof.gammas[i] = s.objective - prof.c_beta;
      prof.diagnostics[i] = {s.iterations, s.el_residual, true, ""};
      minimizers[i] = std::move(s.measure);
    } catch (const SolverError& e) {
      prof.gammas[i] = e.best().objective - prof.c_beta;
      prof.diagnostics[i] = {e.best().iterations, e.best().el_residual, false, e.what()};
      minimizers[i] = e.best().measure;
    } catch (const Error& e) {
      prof.diagnostics[i] = {0, std::numeric_limits<double>::quiet_NaN(), false,
                             e.category() + ": " + e.what()};
    }
  };

  if (mode == SweepMode::SerialWarmStart) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      solve_one(i, i > 0 && minimizers[i - 1] ? &*minimizers[i - 1] : nullptr);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < xs.size(); i = next++) solve_one(i, nullptr);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  }
  prof.minimizers = std::move(minimizers);
  return prof;
}

}  // namespace crowdrate
