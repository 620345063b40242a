#pragma once

#include <span>
#include <vector>

namespace pir {

/// log(sum(exp(v))) without overflow; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

/// log(sinh(x)) for x > 0, stable for large x.
double log_sinh(double x);

/// coth(x) for x != 0.
double coth(double x);

/// Nodes and weights of a quadrature rule on [0, length].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sums to length
  double length = 0.0;
};

/// Composite Gauss-Legendre rule with `panels` panels of `points_per_panel`
/// nodes each. Nodes/weights are generated by Newton iteration on Legendre
/// polynomials, so no tabulated constants are involved.
QuadratureRule gauss_legendre_composite(double length, int panels, int points_per_panel = 8);

/// Left-endpoint Riemann rule with D uniform cells: nodes j*length/D, weights length/D.
QuadratureRule riemann_left(double length, int cells);

/// Ordinary least squares y = slope*x + intercept; r2 is the coefficient of
/// determination (1 for a perfect fit, defined as 0 when y is constant).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// p-th percentile (p in [0,1]) by linear interpolation; sorts a copy.
double percentile(std::vector<double> values, double p);

}  // namespace pir
