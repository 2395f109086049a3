#include "oracles/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace crowdrate::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kX = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                      -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                      0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kW = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                      0.2223810344533745, 0.1012285362903763};

struct Rule {
  std::vector<double> x, w;
};

// Composite rule on [a, b] with panels no wider than `width`, split at the
// given breakpoints.
Rule composite(double a, double b, std::vector<double> breaks, double width) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  Rule r;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double lo = std::max(a, breaks[s]), hi = std::min(b, breaks[s + 1]);
    if (!(hi > lo)) continue;
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    const double pw = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double c = lo + (static_cast<double>(p) + 0.5) * pw;
      for (std::size_t i = 0; i < 8; ++i) {
        r.x.push_back(c + 0.5 * pw * kX[i]);
        r.w.push_back(0.5 * pw * kW[i]);
      }
    }
  }
  return r;
}

// Geometrically graded rule on [0, 1] for integrands with an endpoint log
// singularity at 0.
Rule graded_unit() {
  Rule r;
  double hi = 1.0;
  for (int level = 0; level < 60; ++level) {
    const double lo = level == 59 ? 0.0 : 0.5 * hi;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < 8; ++i) {
      r.x.push_back(c + h * kX[i]);
      r.w.push_back(h * kW[i]);
    }
    hi = lo;
  }
  return r;
}

bool inside(const std::vector<Interval>& U, double x) {
  for (const auto& iv : U)
    if (x > iv.lo && x < iv.hi) return true;
  return false;
}

std::vector<double> breakpoints(const std::vector<Interval>& U) {
  std::vector<double> b;
  for (const auto& iv : U) {
    if (std::isfinite(iv.lo)) b.push_back(iv.lo);
    if (std::isfinite(iv.hi)) b.push_back(iv.hi);
  }
  return b;
}

}  // namespace

double semicircle_density(double x) { return std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * kPi) : 0.0; }

SemicircleMoments semicircle_moments(std::size_t nodes) {
  // x = 2 cos t, d sigma = (2/pi) sin^2 t dt on [0, pi]. Outer integral by
  // midpoints in t (the integrand is smooth and periodic); inner integral
  // split at the log singularity t = s with rules graded toward it.
  const Rule g = graded_unit();
  const double ds = kPi / static_cast<double>(nodes);
  auto weight = [](double t) { return 2.0 / kPi * std::sin(t) * std::sin(t); };
  // |2 cos s - 2 cos t| = 4 |sin((s + t)/2) sin((s - t)/2)|, free of cancellation.
  auto log_gap = [](double s, double d) {
    return std::log(4.0 * std::abs(std::sin(s + 0.5 * d) * std::sin(0.5 * d)));
  };
  SemicircleMoments m;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double s = (static_cast<double>(i) + 0.5) * ds, xs = 2.0 * std::cos(s);
    double inner = 0.0;
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const double dl = -s * g.x[q], dr = (kPi - s) * g.x[q];
      inner += s * g.w[q] * log_gap(s, dl) * weight(s + dl);
      inner += (kPi - s) * g.w[q] * log_gap(s, dr) * weight(s + dr);
    }
    m.sigma += inner * weight(s) * ds;
    m.potential_term += 0.5 * xs * xs * weight(s) * ds;
  }
  m.c_beta = m.potential_term - m.sigma;
  return m;
}

double unit_interval_self_energy() {
  // Difference u = |x - y| has density 2 (1 - u) on [0, 1].
  const Rule r = graded_unit();
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * 2.0 * (1.0 - r.x[i]) * std::log(r.x[i]);
  return s;
}

double unit_square_self_energy() {
  // Componentwise differences have density 4 (1 - u)(1 - v) on [0, 1]^2.
  const Rule r = graded_unit();
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    for (std::size_t j = 0; j < r.x.size(); ++j) {
      const double u = r.x[i], v = r.x[j];
      s += r.w[i] * r.w[j] * 4.0 * (1.0 - u) * (1.0 - v) * 0.5 * std::log(u * u + v * v);
    }
  return s;
}

std::array<double, 3> two_point_crowding(const Potential& v, double beta, const std::vector<Interval>& U, double L) {
  const Rule r = composite(-L, L, breakpoints(U), 0.05);
  const std::size_t n = r.x.size();
  std::vector<double> lw(n);
  std::vector<int> in(n);
  for (std::size_t i = 0; i < n; ++i) {
    lw[i] = std::log(r.w[i]) - 2.0 * v(Point{r.x[i], 0.0});
    in[i] = inside(U, r.x[i]) ? 1 : 0;
  }
  std::array<double, 3> mass{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::abs(r.x[i] - r.x[j]);
      if (d == 0.0) continue;
      mass[static_cast<std::size_t>(in[i] + in[j])] += std::exp(beta * std::log(d) + lw[i] + lw[j]);
    }
  const double total = mass[0] + mass[1] + mass[2];
  for (double& m : mass) m /= total;
  return mass;
}

std::vector<double> two_point_gap_histogram(const Potential& v, double beta, const std::vector<double>& edges,
                                            double L) {
  // s = x + y, d = x - y; the Jacobian is constant and cancels.
  std::vector<double> breaks = edges;
  const Rule rd = composite(0.0, 2.0 * L, breaks, 0.02);
  const Rule rs = composite(-2.0 * L, 2.0 * L, {}, 0.05);
  std::vector<double> bins(edges.size() - 1, 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < rd.x.size(); ++a) {
    const double d = rd.x[a];
    double inner = 0.0;
    for (std::size_t b = 0; b < rs.x.size(); ++b) {
      const double x = 0.5 * (rs.x[b] + d), y = 0.5 * (rs.x[b] - d);
      inner += rs.w[b] * std::exp(-2.0 * (v(Point{x, 0.0}) + v(Point{y, 0.0})));
    }
    const double m = rd.w[a] * std::pow(d, beta) * inner;
    total += m;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
      if (d >= edges[k] && d < edges[k + 1]) bins[k] += m;
  }
  for (double& b : bins) b /= total;
  return bins;
}

std::vector<double> hermite_count_law(std::size_t n, const std::vector<Interval>& U) {
  using real = long double;
  const real root_n = std::sqrt(static_cast<real>(n));
  const double reach = 2.0 * std::sqrt(static_cast<double>(n)) + 12.0;  // psi_j negligible beyond, j < n

  std::vector<real> gram(n * n, 0.0L), psi(n);
  for (const auto& iv : U) {
    const double a = std::max(-reach, static_cast<double>(iv.lo * root_n));
    const double b = std::min(reach, static_cast<double>(iv.hi * root_n));
    if (!(b > a)) continue;
    const Rule r = composite(a, b, {0.0}, 0.05);
    for (std::size_t q = 0; q < r.x.size(); ++q) {
      const real y = r.x[q];
      psi[0] = std::exp(-y * y / 4.0L) / std::pow(2.0L * std::numbers::pi_v<real>, 0.25L);
      if (n > 1) psi[1] = y * psi[0];
      for (std::size_t j = 1; j + 1 < n; ++j)
        psi[j + 1] = (y * psi[j] - std::sqrt(static_cast<real>(j)) * psi[j - 1]) / std::sqrt(static_cast<real>(j + 1));
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) gram[j * n + k] += r.w[q] * psi[j] * psi[k];
    }
  }

  // Cyclic Jacobi on the symmetric Gram matrix.
  for (int sweep = 0; sweep < 100; ++sweep) {
    real off = 0.0L;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += gram[p * n + q] * gram[p * n + q];
    if (off < 1e-60L) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const real apq = gram[p * n + q];
        if (apq == 0.0L) continue;
        const real theta = (gram[q * n + q] - gram[p * n + p]) / (2.0L * apq);
        const real t = (theta >= 0 ? 1.0L : -1.0L) / (std::abs(theta) + std::sqrt(theta * theta + 1.0L));
        const real c = 1.0L / std::sqrt(t * t + 1.0L), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const real akp = gram[k * n + p], akq = gram[k * n + q];
          gram[k * n + p] = c * akp - s * akq;
          gram[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const real apk = gram[p * n + k], aqk = gram[q * n + k];
          gram[p * n + k] = c * apk - s * aqk;
          gram[q * n + k] = s * apk + c * aqk;
        }
      }
  }

  std::vector<real> law = {1.0L};
  for (std::size_t i = 0; i < n; ++i) {
    const real g = std::clamp(gram[i * n + i], 0.0L, 1.0L);
    std::vector<real> next(law.size() + 1, 0.0L);
    for (std::size_t k = 0; k < law.size(); ++k) {
      next[k] += law[k] * (1.0L - g);
      next[k + 1] += law[k] * g;
    }
    law = std::move(next);
  }
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = static_cast<double>(std::log(law[k]));
  return out;
}

double one_point_second_moment(const Potential& v, double L) {
  const Rule r = composite(-L, L, {}, 0.05);
  double z = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double w = r.w[i] * std::exp(-v(Point{r.x[i], 0.0}));
    z += w;
    m2 += w * r.x[i] * r.x[i];
  }
  return m2 / z;
}

MonteCarloEstimate square_log_energy(const std::function<double(double, double)>& g, double g_max,
                                     std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    for (;;) {
      const double x = u(rng), y = u(rng);
      if (u(rng) * g_max <= g(x, y)) return std::array<double, 2>{x, y};
    }
  };
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto a = draw(), b = draw();
    const double l = 0.5 * std::log((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]));
    s += l;
    s2 += l * l;
  }
  const double n = static_cast<double>(pairs);
  const double mean = s / n;
  return {mean, std::sqrt(std::max(0.0, s2 / n - mean * mean) / n)};
}

std::vector<double> column_cuts(const std::function<double(double, double)>& g, std::size_t m, double column_mass,
                                std::size_t samples) {
  const double h = 1.0 / static_cast<double>(samples);
  std::vector<double> cum(samples + 1, 0.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * h;
    double marginal = 0.0;
    for (std::size_t q = 0; q < 8; ++q) marginal += 0.5 * kW[q] * g(x, 0.5 + 0.5 * kX[q]);
    cum[i + 1] = cum[i] + marginal * h;
  }
  std::vector<double> cuts;
  for (std::size_t c = 1; c <= m; ++c) {
    const double target = static_cast<double>(c) * column_mass;
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    if (it == cum.end()) {
      cuts.push_back(1.0);
      continue;
    }
    const auto i = static_cast<std::size_t>(it - cum.begin());
    if (i == 0) {
      cuts.push_back(0.0);
      continue;
    }
    const double frac = (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
    cuts.push_back((static_cast<double>(i - 1) + frac) * h);
  }
  return cuts;
}

namespace {

// Projection onto {w >= 0, sum w = mass} by bisection on the threshold.
void project(std::vector<double>& v, double mass) {
  double lo = *std::min_element(v.begin(), v.end()) - mass - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  for (int it = 0; it < 200; ++it) {
    const double tau = 0.5 * (lo + hi);
    double s = 0.0;
    for (double x : v) s += std::max(0.0, x - tau);
    if (s > mass) lo = tau;
    else hi = tau;
  }
  const double tau = 0.5 * (lo + hi);
  double s = 0.0;
  for (double& x : v) {
    x = std::max(0.0, x - tau);
    s += x;
  }
  if (s > 0.0)
    for (double& x : v) x *= mass / s;
}

}  // namespace

PenaltyOracle::PenaltyOracle(const Potential& v, double beta, const Grid& grid, const Region& U)
    : size_(grid.size()), beta_(beta), potential_(grid.size()), kernel_(grid.size() * grid.size()),
      inside_(grid.size()) {
  const double self = grid.dimension() == 1 ? std::log(grid.hx()) + unit_interval_self_energy()
                                            : std::log(grid.hx()) + unit_square_self_energy();
  for (std::size_t i = 0; i < size_; ++i) {
    const Point p = grid.node(i);
    potential_[i] = v(p);
    inside_[i] = U.contains(p) ? 1 : 0;
    for (std::size_t j = 0; j < size_; ++j) {
      const Point q = grid.node(j);
      kernel_[i * size_ + j] = i == j ? self : 0.5 * std::log((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
    }
  }
  // Largest eigenvalue of the kernel compressed to zero-sum vectors.
  std::vector<double> x(size_), y(size_);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (double& e : x) e = nd(rng);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(size_);
    for (double& e : x) e -= mean;
    double nx = 0.0;
    for (double e : x) nx += e * e;
    nx = std::sqrt(nx);
    for (double& e : x) e /= nx;
    for (std::size_t i = 0; i < size_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < size_; ++j) s += kernel_[i * size_ + j] * x[j];
      y[i] = s;
    }
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(size_);
    double ny = 0.0;
    for (double& e : y) {
      e -= my;
      ny += e * e;
    }
    lambda = std::sqrt(ny);
    x = y;
  }
  lipschitz_ = 1.05 * beta_ * lambda;

  std::size_t iterations = 0;
  equilibrium_ = minimize(std::vector<double>(size_, 1.0 / static_cast<double>(size_)), 0.0, 0.0, iterations);
  c_beta_ = objective(equilibrium_);
}

double PenaltyOracle::objective(const std::vector<double>& w) const {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < size_; ++i) {
    lin += w[i] * potential_[i];
    if (w[i] == 0.0) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < size_; ++j) s += kernel_[i * size_ + j] * w[j];
    quad += w[i] * s;
  }
  return lin - 0.5 * beta_ * quad;
}

std::vector<double> PenaltyOracle::minimize(std::vector<double> w, double rho, double target,
                                            std::size_t& iterations) const {
  // FISTA with gradient restart; stops on a Frank-Wolfe gap below 1e-10.
  std::size_t in_count = 0;
  for (char c : inside_) in_count += static_cast<std::size_t>(c);
  const double L = lipschitz_ + rho * static_cast<double>(in_count);
  const double step = 1.0 / L;
  std::vector<double> y = w, prev = w, grad(size_), trial(size_);
  double t = 1.0;
  auto gradient = [&](const std::vector<double>& at) {
    double mass_in = 0.0;
    for (std::size_t i = 0; i < size_; ++i)
      if (inside_[i]) mass_in += at[i];
    const double pen = rho * (mass_in - target);
    for (std::size_t i = 0; i < size_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < size_; ++j)
        if (at[j] != 0.0) s += kernel_[i * size_ + j] * at[j];
      grad[i] = potential_[i] - beta_ * s + (inside_[i] ? pen : 0.0);
    }
  };
  for (iterations = 0; iterations < 400000; ++iterations) {
    if (iterations % 25 == 0) {
      gradient(w);
      double gw = 0.0, gmin = grad[0];
      for (std::size_t i = 0; i < size_; ++i) {
        gw += grad[i] * w[i];
        gmin = std::min(gmin, grad[i]);
      }
      if (gw - gmin < 1e-10) break;
    }
    gradient(y);
    for (std::size_t i = 0; i < size_; ++i) trial[i] = y[i] - step * grad[i];
    project(trial, 1.0);
    double restart = 0.0;
    for (std::size_t i = 0; i < size_; ++i) restart += (y[i] - trial[i]) * (trial[i] - w[i]);
    prev = w;
    w = trial;
    if (restart > 0.0) {
      t = 1.0;
      y = w;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < size_; ++i) y[i] = w[i] + (t - 1.0) / t_next * (w[i] - prev[i]);
    t = t_next;
  }
  return w;
}

PenaltyOracle::Result PenaltyOracle::gamma(double x) {
  std::size_t in_count = 0;
  for (char c : inside_) in_count += static_cast<std::size_t>(c);
  if (in_count == 0) throw std::invalid_argument("region contains no grid node");
  const double rho = lipschitz_ / static_cast<double>(in_count);

  Result res;
  std::vector<double> w = equilibrium_;
  auto achieved = [&](double target) {
    std::size_t it = 0;
    w = minimize(w, rho, target, it);
    res.iterations += it;
    double m = 0.0;
    for (std::size_t i = 0; i < size_; ++i)
      if (inside_[i]) m += w[i];
    return m;
  };
  // Achieved mass is nondecreasing in the target: bracket, then secant with
  // bisection safeguard.
  double t0 = x, m0 = achieved(t0);
  double t1 = t0, m1 = m0;
  double span = 0.1;
  while ((m1 - x) * (m0 - x) > 0.0 && std::abs(m1 - x) > 1e-9) {
    t1 = m0 < x ? t1 + span : t1 - span;
    span *= 2.0;
    m1 = achieved(t1);
    if (span > 1e6) break;
  }
  double lo = std::min(t0, t1), hi = std::max(t0, t1);
  double mlo = t0 < t1 ? m0 : m1, mhi = t0 < t1 ? m1 : m0;
  double m = m1;
  for (int it = 0; it < 60 && std::abs(m - x) > 1e-9; ++it) {
    double t = mhi > mlo ? lo + (x - mlo) * (hi - lo) / (mhi - mlo) : 0.5 * (lo + hi);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    m = achieved(t);
    if (m < x) {
      lo = t;
      mlo = m;
    } else {
      hi = t;
      mhi = m;
    }
  }
  res.achieved = m;
  res.objective = objective(w);
  res.gamma = res.objective - c_beta_;
  return res;
}

}  // namespace crowdrate::oracle
