#include "crowdrate/energy.hpp"

#include <cmath>
#include <cstdlib>

#include "crowdrate/error.hpp"

namespace crowdrate {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

LogKernel::LogKernel(const Grid& grid) : grid_(grid) {
  if (grid.dimension() == 1) {
    const double h = grid.hx();
    if (!(h > 0.0)) fail("grid", "degenerate grid spacing");
    self_cell_ = std::log(h) + kIntervalSelfCell;
    table_.resize(grid.nx());
    table_[0] = self_cell_;
    for (std::size_t d = 1; d < grid.nx(); ++d) table_[d] = std::log(static_cast<double>(d) * h);
    return;
  }
  const double hx = grid.hx(), hy = grid.hy();
  if (!(hx > 0.0) || !(hy > 0.0)) fail("grid", "degenerate grid spacing");
  if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
    fail("grid", "the planar log kernel needs square cells");
  self_cell_ = std::log(hx) + kSquareSelfCell;
  const std::size_t nx = grid.nx(), ny = grid.ny();
  table_.resize(nx * ny);
  for (std::size_t dy = 0; dy < ny; ++dy)
    for (std::size_t dx = 0; dx < nx; ++dx)
      table_[dy * nx + dx] = (dx == 0 && dy == 0)
                                 ? self_cell_
                                 : std::log(std::hypot(static_cast<double>(dx) * hx,
                                                       static_cast<double>(dy) * hy));
}

double LogKernel::entry(std::size_t i, std::size_t j) const {
  if (grid_.dimension() == 1) return table_[i > j ? i - j : j - i];
  const std::size_t ix = grid_.ix(i), iy = grid_.iy(i), jx = grid_.ix(j), jy = grid_.iy(j);
  const std::size_t dx = ix > jx ? ix - jx : jx - ix;
  const std::size_t dy = iy > jy ? iy - jy : jy - iy;
  return table_[dy * grid_.nx() + dx];
}

void LogKernel::apply(std::span<const double> w, std::span<double> out) const {
  const std::size_t n = grid_.size();
  if (w.size() != n || out.size() != n) fail("grid", "vector size does not match kernel");
  std::vector<std::size_t> active;
  active.reserve(n);
  for (std::size_t j = 0; j < n; ++j)
    if (w[j] != 0.0) active.push_back(j);

  if (grid_.dimension() == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j : active) s += table_[i > j ? i - j : j - i] * w[j];
      out[i] = s;
    }
    return;
  }
  const std::size_t nx = grid_.nx();
  std::vector<int> ax(active.size()), ay(active.size());
  std::vector<double> aw(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    ax[a] = static_cast<int>(active[a] % nx);
    ay[a] = static_cast<int>(active[a] / nx);
    aw[a] = w[active[a]];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int ix = static_cast<int>(i % nx), iy = static_cast<int>(i / nx);
    double s = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t dx = static_cast<std::size_t>(std::abs(ix - ax[a]));
      const std::size_t dy = static_cast<std::size_t>(std::abs(iy - ay[a]));
      s += table_[dy * nx + dx] * aw[a];
    }
    out[i] = s;
  }
}

std::vector<double> LogKernel::apply(std::span<const double> w) const {
  std::vector<double> out(w.size());
  apply(w, out);
  return out;
}

double LogKernel::quadratic_form(std::span<const double> w) const {
  const auto kw = apply(w);
  std::vector<double> terms(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) terms[i] = w[i] * kw[i];
  return pairwise_sum(terms);
}

double log_energy(const GridMeasure& mu, const LogKernel& kernel) {
  if (!(mu.grid() == kernel.grid())) fail("grid", "kernel built on a different grid");
  return kernel.quadratic_form(mu.weights());
}

double log_energy(const GridMeasure& mu) { return log_energy(mu, LogKernel(mu.grid())); }

double log_potential(const GridMeasure& mu, const Point& z) {
  const Grid& g = mu.grid();
  const double self = g.dimension() == 1 ? std::log(g.hx()) + kIntervalSelfCell
                                         : std::log(g.hx()) + kSquareSelfCell;
  const double coincide = 1e-12 * g.hx();
  std::vector<double> terms;
  terms.reserve(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = mu.weight(k);
    if (w == 0.0) continue;
    const double d = distance(z, g.node(k));
    terms.push_back(-w * (d <= coincide ? self : std::log(d)));
  }
  return pairwise_sum(terms);
}

EnergyReport rate_i_beta(const GridMeasure& mu, const LogKernel& kernel, const Potential& v,
                         double beta, double c_beta) {
  if (!(beta > 0.0)) fail("parameter", "beta must be positive");
  const Grid& g = mu.grid();
  std::vector<double> vt(g.size());
  double diag = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = mu.weight(k);
    vt[k] = w == 0.0 ? 0.0 : w * v(g.node(k));
    if (!std::isfinite(vt[k])) fail("potential", "potential is not finite on the grid");
    diag += w * w * kernel.self_cell();
  }
  EnergyReport r;
  r.sigma = log_energy(mu, kernel);
  r.potential_term = pairwise_sum(vt);
  r.c_beta_used = c_beta;
  r.diagonal_correction = diag;
  r.i_beta = r.potential_term - 0.5 * beta * r.sigma - c_beta;
  return r;
}

EnergyReport rate_i_beta(const GridMeasure& mu, const Potential& v, double beta, double c_beta) {
  return rate_i_beta(mu, LogKernel(mu.grid()), v, beta, c_beta);
}

namespace {

// Cell-integrated 1D Gaussian weights for offsets -radius..radius.
std::vector<double> gaussian_cells(double h, double sd, std::size_t radius) {
  std::vector<double> k(2 * radius + 1);
  const double s = sd * std::sqrt(2.0);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(radius);
    k[i] = 0.5 * (std::erf((d + 0.5) * h / s) - std::erf((d - 0.5) * h / s));
  }
  return k;
}

// Smooths along one axis; each source spreads its mass over the in-range
// targets only, renormalised, so mass is preserved exactly per source.
std::vector<double> smooth_axis(const std::vector<double>& w, std::size_t nx, std::size_t ny,
                                bool along_x, const std::vector<double>& kern, std::size_t radius) {
  std::vector<double> out(w.size(), 0.0);
  const std::size_t len = along_x ? nx : ny;
  const std::size_t lines = along_x ? ny : nx;
  for (std::size_t line = 0; line < lines; ++line) {
    for (std::size_t s = 0; s < len; ++s) {
      const std::size_t src = along_x ? line * nx + s : s * nx + line;
      const double mass = w[src];
      if (mass == 0.0) continue;
      const std::size_t lo = s >= radius ? s - radius : 0;
      const std::size_t hi = std::min(len - 1, s + radius);
      double total = 0.0;
      for (std::size_t t = lo; t <= hi; ++t) total += kern[t + radius - s];
      for (std::size_t t = lo; t <= hi; ++t) {
        const std::size_t dst = along_x ? line * nx + t : t * nx + line;
        out[dst] += mass * kern[t + radius - s] / total;
      }
    }
  }
  return out;
}

}  // namespace

GridMeasure gaussian_smooth(const GridMeasure& mu, double eps) {
  if (!(eps >= 0.0)) fail("parameter", "smoothing variance must be nonnegative");
  const Grid& g = mu.grid();
  if (g.dimension() != 2) fail("dimension", "Gaussian smoothing is defined on planar grids");
  if (eps == 0.0) return mu;
  const double sd = std::sqrt(eps);
  const std::size_t rx = std::min(g.nx() - 1, static_cast<std::size_t>(std::ceil(8.0 * sd / g.hx())));
  const std::size_t ry = std::min(g.ny() - 1, static_cast<std::size_t>(std::ceil(8.0 * sd / g.hy())));
  std::vector<double> w(mu.weights().begin(), mu.weights().end());
  w = smooth_axis(w, g.nx(), g.ny(), true, gaussian_cells(g.hx(), sd, rx), rx);
  w = smooth_axis(w, g.nx(), g.ny(), false, gaussian_cells(g.hy(), sd, ry), ry);
  return GridMeasure::normalized(g, std::move(w));
}

}  // namespace crowdrate
