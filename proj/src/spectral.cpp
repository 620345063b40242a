#include "pir/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "pir/numerics.hpp"

namespace pir {

SpectralBasis::SpectralBasis(double beta, int n_modes) : beta_(beta), n_modes_(n_modes) {
  if (beta <= 0.0) throw std::invalid_argument("SpectralBasis: beta must be positive");
  if (n_modes < 1) throw std::invalid_argument("SpectralBasis: need at least one mode");
}

int mode_pair_index(int k) { return (k + 1) / 2; }

double SpectralBasis::omega(int k) const {
  if (k < 0 || k >= n_modes_) throw std::invalid_argument("SpectralBasis::omega: k out of range");
  return 2.0 * mode_pair_index(k) * M_PI / beta_;
}

double SpectralBasis::eval_mode(int k, double tau) const {
  if (k < 0 || k >= n_modes_)
    throw std::invalid_argument("SpectralBasis::eval_mode: k out of range");
  if (tau < 0.0 || tau > beta_)
    throw std::invalid_argument("SpectralBasis::eval_mode: tau outside [0, beta]");
  if (k == 0) return std::sqrt(1.0 / beta_);
  const double arg = 2.0 * mode_pair_index(k) * M_PI * tau / beta_;
  const double amp = std::sqrt(2.0 / beta_);
  return (k % 2 == 1) ? amp * std::sin(arg) : amp * std::cos(arg);
}

Mat SpectralBasis::eval_matrix(const std::vector<double>& taus) const {
  Mat c(n_modes_, static_cast<Eigen::Index>(taus.size()));
  for (std::size_t j = 0; j < taus.size(); ++j)
    for (int k = 0; k < n_modes_; ++k) c(k, static_cast<Eigen::Index>(j)) = eval_mode(k, taus[j]);
  return c;
}

double omega_grid(int k, int grid_points, double beta) {
  if (k < 0 || k >= grid_points) throw std::invalid_argument("omega_grid: k out of range");
  const double beta_D = beta / grid_points;
  return 2.0 / beta_D * std::sin(mode_pair_index(k) * M_PI / grid_points);
}

double mode_on_grid(int k, int j, int grid_points, double beta) {
  if (k < 0 || k >= grid_points) throw std::invalid_argument("mode_on_grid: k out of range");
  const int D = grid_points;
  j = ((j % D) + D) % D;
  if (k == 0) return std::sqrt(1.0 / beta);
  if (D % 2 == 0 && k == D - 1) {
    // Nyquist slot: the sine mode vanishes on the grid; use the alternating
    // vector, normalized for the discrete inner product.
    return std::sqrt(1.0 / beta) * (j % 2 == 0 ? 1.0 : -1.0);
  }
  const int K = mode_pair_index(k);
  const double arg = 2.0 * M_PI * K * j / D;
  const double amp = std::sqrt(2.0 / beta);
  return (k % 2 == 1) ? amp * std::sin(arg) : amp * std::cos(arg);
}

Eigen::VectorXd NormalModeLoop::value(double tau) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(xi.cols());
  for (int k = 0; k < basis.size(); ++k) v += basis.eval_mode(k, tau) * xi.row(k).transpose();
  return v;
}

NormalModeLoop grid_to_modes(const RingPolymer& rp, int n_modes) {
  const int D = rp.grid_points;
  if (n_modes > D) throw std::invalid_argument("grid_to_modes: n_modes > D would alias");
  if (n_modes < 1) throw std::invalid_argument("grid_to_modes: need at least one mode");
  NormalModeLoop loop{SpectralBasis(rp.beta, n_modes), Mat::Zero(n_modes, rp.dim())};
  const double beta_D = rp.beta_D();
  for (int k = 0; k < n_modes; ++k)
    for (int j = 0; j < D; ++j)
      loop.xi.row(k) += beta_D * mode_on_grid(k, j, D, rp.beta) * rp.x.row(j);
  return loop;
}

RingPolymer modes_to_grid(const NormalModeLoop& loop, int grid_points) {
  const int N = loop.basis.size();
  if (grid_points < N) throw std::invalid_argument("modes_to_grid: D < N would alias");
  RingPolymer rp{loop.basis.beta(), grid_points, Mat::Zero(grid_points, loop.dim())};
  for (int j = 0; j < grid_points; ++j)
    for (int k = 0; k < N; ++k)
      rp.x.row(j) += mode_on_grid(k, j, grid_points, loop.basis.beta()) * loop.xi.row(k);
  return rp;
}

NormalModeLoop sample_nu(const SpectralBasis& basis, int dim, double a,
                         const CounterStream& stream, std::uint64_t sample_index) {
  if (a <= 0.0)
    throw std::invalid_argument("sample_nu: a must be positive (omega_0 = 0 makes nu ill-posed)");
  if (dim < 1) throw std::invalid_argument("sample_nu: dim must be positive");
  const int N = basis.size();
  NormalModeLoop loop{basis, Mat(N, dim)};
  std::vector<double> g(static_cast<std::size_t>(N) * dim);
  stream.fill_gaussians(sample_index, g);
  for (int k = 0; k < N; ++k) {
    const double w = basis.omega(k);
    const double scale = 1.0 / std::sqrt(w * w + a * a);
    for (int t = 0; t < dim; ++t)
      loop.xi(k, t) = scale * g[static_cast<std::size_t>(k) * dim + t];
  }
  return loop;
}

double covariance(double beta, double a, double tau, CovarianceMethod method, long k_max) {
  if (beta <= 0.0 || a <= 0.0) throw std::invalid_argument("covariance: beta, a must be positive");
  switch (method) {
    case CovarianceMethod::kClosed: {
      if (tau < 0.0 || tau > beta)
        throw std::invalid_argument("covariance: tau outside [0, beta]");
      // Periodic Green's function of -d^2/dtau^2 + a^2 on [0, beta].
      return std::cosh(a * (0.5 * beta - tau)) / (2.0 * a * std::sinh(0.5 * a * beta));
    }
    case CovarianceMethod::kSpectral: {
      if (tau < 0.0 || tau > beta)
        throw std::invalid_argument("covariance: tau outside [0, beta]");
      double sum = 1.0 / (a * a);
      for (long k = 1; k <= k_max; ++k) {
        const double w = 2.0 * k * M_PI / beta;
        sum += 2.0 * std::cos(w * tau) / (w * w + a * a);
      }
      return sum / beta;
    }
    case CovarianceMethod::kMehler: {
      if (tau <= 0.0 || tau >= beta)
        throw std::invalid_argument("covariance: mehler method needs tau in (0, beta)");
      const double A = a / std::tanh(a * tau) + a / std::tanh(a * (beta - tau));
      const double B = a / std::sinh(a * tau) + a / std::sinh(a * (beta - tau));
      // Off-diagonal entry of the inverse of the precision [[A, -B], [-B, A]].
      return B / (A * A - B * B);
    }
  }
  throw std::logic_error("covariance: unreachable");
}

double covariance_tail_bound(double beta, long k_max) {
  // sum_{K > k_max} (2/beta) / (2 K pi / beta)^2 <= beta / (2 pi^2 k_max).
  return beta / (2.0 * M_PI * M_PI * static_cast<double>(k_max));
}

double c0_constant(int dim, double beta, double a) {
  if (dim < 1 || beta <= 0.0 || a <= 0.0)
    throw std::invalid_argument("c0_constant: inputs must be positive");
  return dim * beta / (2.0 * a) * coth(0.5 * a * beta);
}

double increment_msd(double beta, double a, int dim, double tau1, double tau2,
                     std::optional<int> n_modes) {
  if (tau1 < 0.0 || tau1 > beta || tau2 < 0.0 || tau2 > beta)
    throw std::invalid_argument("increment_msd: tau outside [0, beta]");
  if (!n_modes) {
    const double g0 = covariance(beta, a, 0.0, CovarianceMethod::kClosed);
    const double gd = covariance(beta, a, std::abs(tau1 - tau2), CovarianceMethod::kClosed);
    return 2.0 * dim * (g0 - gd);
  }
  SpectralBasis basis(beta, *n_modes);
  double sum = 0.0;
  for (int k = 0; k < *n_modes; ++k) {
    const double dc = basis.eval_mode(k, tau1) - basis.eval_mode(k, tau2);
    const double w = basis.omega(k);
    sum += dim * dc * dc / (w * w + a * a);
  }
  return sum;
}

}  // namespace pir
