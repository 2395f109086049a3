#include "crowdrate/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crowdrate/error.hpp"

namespace crowdrate {

Potential Potential::quadratic(double a) {
  Potential p;
  p.kind_ = Kind::Quadratic;
  p.coefficients_ = {0.0, 0.0, a};
  return p;
}

Potential Potential::quartic(double a) {
  Potential p;
  p.kind_ = Kind::Quartic;
  p.coefficients_ = {0.0, 0.0, 0.0, 0.0, a};
  return p;
}

Potential Potential::radial_polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) fail("potential", "radial polynomial needs coefficients");
  Potential p;
  p.kind_ = Kind::RadialPolynomial;
  p.coefficients_ = std::move(coefficients);
  return p;
}

Potential Potential::tabulated(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) fail("potential", "tabulated potential needs at least two rows");
  std::sort(table.begin(), table.end());
  for (std::size_t i = 1; i < table.size(); ++i)
    if (!(table[i].first > table[i - 1].first)) fail("potential", "tabulated abscissae must be distinct");
  Potential p;
  p.kind_ = Kind::Tabulated;
  p.table_ = std::move(table);
  return p;
}

std::string Potential::id() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Quadratic: os << "quadratic(" << coefficients_[2] << ")"; break;
    case Kind::Quartic: os << "quartic(" << coefficients_[4] << ")"; break;
    case Kind::RadialPolynomial: {
      os << "radial(";
      for (std::size_t k = 0; k < coefficients_.size(); ++k) os << (k ? "," : "") << coefficients_[k];
      os << ")";
      break;
    }
    case Kind::Tabulated: os << "tabulated(" << table_.size() << ")"; break;
  }
  return os.str();
}

double Potential::operator()(const Point& z) const {
  if (kind_ == Kind::Tabulated) {
    if (z.y != 0.0) fail("potential", "tabulated potentials are one-dimensional");
    const double x = z.x;
    if (x < table_.front().first || x > table_.back().first)
      fail("potential", "point outside the tabulated range");
    auto it = std::upper_bound(table_.begin(), table_.end(), x,
                               [](double v, const auto& row) { return v < row.first; });
    if (it == table_.end()) return table_.back().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (x - lo.first) / (hi.first - lo.first);
    return lo.second + t * (hi.second - lo.second);
  }
  const double r = norm(z);
  double v = 0.0;
  for (std::size_t k = coefficients_.size(); k-- > 0;) v = v * r + coefficients_[k];
  return v;
}

double Potential::laplacian(const Point& z, int dimension) const {
  if (kind_ == Kind::Tabulated) fail("potential", "tabulated potentials have no Laplacian");
  // For f = r^k: f'' = k(k-1) r^{k-2} on the line, Delta f = k^2 r^{k-2} in the plane.
  const double r = norm(z);
  double lap = 0.0;
  for (std::size_t k = 1; k < coefficients_.size(); ++k) {
    const double c = coefficients_[k];
    if (c == 0.0) continue;
    const double kk = static_cast<double>(k);
    const double factor = dimension == 1 ? kk * (kk - 1.0) : kk * kk;
    if (factor == 0.0) continue;
    if (k == 2) {
      lap += c * factor;
    } else {
      if (r == 0.0) {
        if (k == 1) fail("potential", "|z| term is not twice differentiable at the origin");
        continue;
      }
      lap += c * factor * std::pow(r, kk - 2.0);
    }
  }
  return lap;
}

bool Potential::plane_admissible() const {
  if (kind_ == Kind::Tabulated) return false;
  return coefficients_.size() < 2 || coefficients_[1] == 0.0;
}

double Potential::growth_ratio(double radius) const {
  if (!(radius > 1.0)) fail("parameter", "growth ratio needs radius > 1");
  return (*this)(Point{radius, 0.0}) / std::log(radius);
}

Potential Potential::shifted(double c) const {
  Potential p = *this;
  if (kind_ == Kind::Tabulated) {
    for (auto& row : p.table_) row.second += c;
  } else {
    p.kind_ = Kind::RadialPolynomial;
    p.coefficients_[0] += c;
  }
  return p;
}

}  // namespace crowdrate
