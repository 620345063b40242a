#include "pir/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pir/numerics.hpp"
#include "pir/spectral.hpp"

namespace pir {

double BoundConstants::combined(double n_modes, double grid_points) const {
  const double front = 2.0 * std::exp(6.0 * beta * M1 + 2.0 * C0 * M1) * M2 *
                       std::sqrt(2.0 * dim * (2.0 * beta + 3.0 * C0));
  return front * (1.0 / std::sqrt(n_modes) +
                  2.0 * std::sqrt(2.0 * beta + 1.0) / std::sqrt(grid_points));
}

BoundConstants compute_constants(double M1, double M2, double beta, int dim, double a) {
  if (M1 <= 0.0 || M2 <= 0.0 || beta <= 0.0 || dim < 1 || a <= 0.0)
    throw std::invalid_argument("compute_constants: all inputs must be positive");
  BoundConstants c;
  c.M1 = M1;
  c.M2 = M2;
  c.beta = beta;
  c.a = a;
  c.dim = dim;
  c.C0 = c0_constant(dim, beta, a);
  const double d = static_cast<double>(dim);
  c.K1 = beta * std::exp(beta * M1) * M1 * std::sqrt(d * (beta + 2.0 * c.C0) / 2.0);
  c.K2 = 0.5 * M2 * std::sqrt(d * beta);
  c.K = std::exp(6.0 * beta * M1 + 2.0 * c.C0 * M1) * M2 *
        std::sqrt(2.0 * d * (2.0 * beta + 3.0 * c.C0));
  c.L1 = beta * std::exp(beta * M1) * M1 *
         std::sqrt(2.0 * d * (beta + 2.0 * c.C0) * (2.0 * beta + 1.0));
  c.L2 = M2 * std::sqrt(d * beta * (2.0 * beta + 1.0));
  c.L = 2.0 * std::exp(6.0 * beta * M1 + 2.0 * c.C0 * M1) * M2 *
        std::sqrt(2.0 * d * (2.0 * beta + 1.0) * (2.0 * beta + 3.0 * c.C0));
  return c;
}

BoundVerdict check_bound(double measured_error, double mc_sigma, double constant,
                         double denominator, std::string bound_name) {
  if (mc_sigma < 0.0) throw std::invalid_argument("check_bound: mc_sigma must be >= 0");
  if (denominator <= 0.0) throw std::invalid_argument("check_bound: denominator must be > 0");
  BoundVerdict v;
  v.measured_error = measured_error;
  v.mc_sigma = mc_sigma;
  v.bound_value = constant / denominator;
  v.margin = v.bound_value + 3.0 * mc_sigma - measured_error;
  v.pass = v.margin >= 0.0;
  v.bound_name = std::move(bound_name);
  return v;
}

RateFit fit_rate(std::span<const double> n_values, std::span<const double> errors) {
  if (n_values.size() != errors.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (n_values.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 points");
  std::vector<double> lx, ly;
  lx.reserve(n_values.size());
  ly.reserve(errors.size());
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] <= 0.0 || errors[i] <= 0.0)
      throw std::invalid_argument("fit_rate: n and error must be strictly positive");
    lx.push_back(std::log(n_values[i]));
    ly.push_back(std::log(errors[i]));
  }
  const LineFit f = fit_line(lx, ly);
  return RateFit{f.slope, f.intercept, f.r2};
}

}  // namespace pir
