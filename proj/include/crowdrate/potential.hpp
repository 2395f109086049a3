#pragma once

#include <string>
#include <utility>
#include <vector>

#include "crowdrate/point.hpp"

namespace crowdrate {

// External potential V. Radial kinds evaluate V(z) = sum_k c_k |z|^k, which
// covers x^2/2 on the line and |z|^2, |z|^4 on the plane. A tabulated
// potential is a piecewise-linear 1D table and has no Laplacian.
class Potential {
public:
  enum class Kind { Quadratic, Quartic, RadialPolynomial, Tabulated };

  static Potential quadratic(double a);  // a |z|^2
  static Potential quartic(double a);    // a |z|^4
  static Potential radial_polynomial(std::vector<double> coefficients);
  static Potential tabulated(std::vector<std::pair<double, double>> table);

  Kind kind() const { return kind_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  std::string id() const;

  double operator()(const Point& z) const;

  // Laplacian in the given dimension (second derivative for dimension 1).
  // Throws Error("potential") for tabulated kinds.
  double laplacian(const Point& z, int dimension) const;

  // True when V is C^{1,1} on the plane, i.e. no |z|^1 term.
  bool plane_admissible() const;

  // V(R) / log R, a finite-radius proxy for the logarithmic growth margin.
  double growth_ratio(double radius) const;

  // V + c, used by the shift-invariance checks.
  Potential shifted(double c) const;

private:
  Potential() = default;

  Kind kind_ = Kind::RadialPolynomial;
  std::vector<double> coefficients_;
  std::vector<std::pair<double, double>> table_;
};

}  // namespace crowdrate
