#pragma once

#include <span>
#include <string>

namespace pir {

/// Every explicit constant appearing in the convergence bounds of the three
/// representations, evaluated exactly as printed:
///   C0 = (d beta / 2a) coth(a beta / 2)
///   K1 = beta e^{beta M1} M1 sqrt(d (beta + 2 C0) / 2)
///   K2 = (M2 / 2) sqrt(d beta)
///   K  = e^{6 beta M1 + 2 C0 M1} M2 sqrt(2 d (2 beta + 3 C0))
///   L1 = beta e^{beta M1} M1 sqrt(2 d (beta + 2 C0) (2 beta + 1))
///   L2 = M2 sqrt(d beta (2 beta + 1))
///   L  = 2 e^{6 beta M1 + 2 C0 M1} M2 sqrt(2 d (2 beta + 1) (2 beta + 3 C0))
/// The truncation error of cl(N) is bounded by K / sqrt(N), the
/// discretization error of cl(N, D) by L / sqrt(D), and L = 2 sqrt(2 beta + 1) K.
struct BoundConstants {
  double M1 = 0.0, M2 = 0.0, beta = 0.0, a = 0.0;
  int dim = 0;
  double C0 = 0.0;
  double K1 = 0.0, K2 = 0.0, K = 0.0;
  double L1 = 0.0, L2 = 0.0, L = 0.0;

  /// Combined bound on |<O>_beta - cl(N, D)|:
  ///   2 e^{6 beta M1 + 2 C0 M1} M2 sqrt(2 d (2 beta + 3 C0))
  ///     (1/sqrt(N) + 2 sqrt(2 beta + 1)/sqrt(D)).
  double combined(double n_modes, double grid_points) const;
};

BoundConstants compute_constants(double M1, double M2, double beta, int dim, double a);

/// Pass/fail of a measured Monte Carlo error against constant/denominator,
/// with a 3 sigma allowance for the Monte Carlo noise.
struct BoundVerdict {
  bool pass = false;
  double measured_error = 0.0;
  double mc_sigma = 0.0;
  double bound_value = 0.0;  // constant / denominator
  double margin = 0.0;       // bound + 3 sigma - measured
  std::string bound_name;
};

BoundVerdict check_bound(double measured_error, double mc_sigma, double constant,
                         double denominator, std::string bound_name = "");

/// Least-squares fit of log(error) against log(n); slope is the empirical
/// convergence rate. Requires >= 4 points with strictly positive errors.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
RateFit fit_rate(std::span<const double> n_values, std::span<const double> errors);

}  // namespace pir
