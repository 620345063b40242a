#include "pir/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pir {

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_sinh(double x) {
  if (x <= 0.0) throw std::invalid_argument("log_sinh: x must be positive");
  // sinh(x) = e^x (1 - e^{-2x}) / 2
  return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0);
}

double coth(double x) {
  if (x == 0.0) throw std::invalid_argument("coth: x must be nonzero");
  // 1 + 2/(e^{2x} - 1) avoids cosh/sinh overflow for large |x|.
  if (x > 0.0) return 1.0 + 2.0 / std::expm1(2.0 * x);
  return -coth(-x);
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess for the i-th positive root.
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

QuadratureRule gauss_legendre_composite(double length, int panels, int points_per_panel) {
  if (length <= 0.0 || panels < 1 || points_per_panel < 1)
    throw std::invalid_argument("gauss_legendre_composite: bad arguments");
  std::vector<double> xu, wu;
  gauss_legendre_unit(points_per_panel, xu, wu);
  QuadratureRule rule;
  rule.length = length;
  const double h = length / panels;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * points_per_panel);
  rule.weights.reserve(rule.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (int i = 0; i < points_per_panel; ++i) {
      rule.nodes.push_back(a + 0.5 * h * (xu[i] + 1.0));
      rule.weights.push_back(0.5 * h * wu[i]);
    }
  }
  return rule;
}

QuadratureRule riemann_left(double length, int cells) {
  if (length <= 0.0 || cells < 1) throw std::invalid_argument("riemann_left: bad arguments");
  QuadratureRule rule;
  rule.length = length;
  const double h = length / cells;
  rule.nodes.resize(cells);
  rule.weights.assign(cells, h);
  for (int j = 0; j < cells; ++j) rule.nodes[j] = j * h;
  return rule;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need at least two (x, y) pairs");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy == 0.0) ? 0.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  p = std::clamp(p, 0.0, 1.0);
  std::sort(values.begin(), values.end());
  const double pos = p * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - lo;
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

}  // namespace pir
