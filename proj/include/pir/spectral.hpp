#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "pir/potentials.hpp"
#include "pir/rng.hpp"

namespace pir {

/// Orthonormal eigenbasis of -d^2/dtau^2 on the torus [0, beta]:
///   omega_0 = 0,                 c_0 = sqrt(1/beta)
///   omega_{2K-1} = omega_{2K} = 2 K pi / beta,
///   c_{2K-1} = sqrt(2/beta) sin(2 K pi tau / beta),
///   c_{2K}   = sqrt(2/beta) cos(2 K pi tau / beta).
class SpectralBasis {
 public:
  SpectralBasis(double beta, int n_modes);

  double beta() const { return beta_; }
  int size() const { return n_modes_; }

  /// Frequency of mode k.
  double omega(int k) const;

  /// c_k(tau) for tau in [0, beta].
  double eval_mode(int k, double tau) const;

  /// Matrix C with C(k, j) = c_k(taus[j]); the workhorse for batched loop
  /// evaluation (loop values = xi^T C columnwise).
  Mat eval_matrix(const std::vector<double>& taus) const;

 private:
  double beta_;
  int n_modes_;
};

/// Pair index of mode k: 0 for k = 0, K for the sin/cos pair at frequency
/// 2 K pi / beta.
int mode_pair_index(int k);

/// Frequency of mode k on a D-point grid: (2/beta_D) sin(K pi / D) with
/// K = mode_pair_index(k). Converges to SpectralBasis::omega(k) as D grows
/// and makes the ring-polymer spring energy diagonal in the grid modes.
double omega_grid(int k, int grid_points, double beta);

/// Value of grid-mode k at grid node j (D-point uniform grid on [0, beta)).
/// Identical to c_k(j beta_D) except for even D at k = D-1, where the
/// vanishing sine samples are replaced by the alternating Nyquist vector
/// sqrt(1/beta) (-1)^j so that the D grid modes stay orthonormal under
/// beta_D sum_j and the N = D transform is a bijection.
double mode_on_grid(int k, int j, int grid_points, double beta);

/// Loop in normal-mode coordinates: x_N(tau) = sum_k xi_k c_k(tau),
/// xi stored as an N x d matrix (row k = xi_k).
struct NormalModeLoop {
  SpectralBasis basis;
  Mat xi;

  int dim() const { return static_cast<int>(xi.cols()); }

  /// x_N(tau), tau in [0, beta].
  Eigen::VectorXd value(double tau) const;
};

/// Ring polymer: D grid values on the torus, x stored D x d (row j = x_j);
/// indices are cyclic (x_D == x_0).
struct RingPolymer {
  double beta = 1.0;
  int grid_points = 1;
  Mat x;

  double beta_D() const { return beta / grid_points; }
  int dim() const { return static_cast<int>(x.cols()); }
};

/// xi_k = beta_D sum_j x_j c_k(j beta_D) for k < n_modes. Requires
/// n_modes <= D (larger would alias).
NormalModeLoop grid_to_modes(const RingPolymer& rp, int n_modes);

/// x_j = x_N(j beta_D) for D >= N; exact inverse of grid_to_modes at D = N.
RingPolymer modes_to_grid(const NormalModeLoop& loop, int grid_points);

/// Independent draw from the Gaussian loop measure: xi_k ~ N(0, I_d / (omega_k^2 + a^2)).
/// Pure in (stream, sample_index); requires a > 0 (omega_0 = 0).
NormalModeLoop sample_nu(const SpectralBasis& basis, int dim, double a,
                         const CounterStream& stream, std::uint64_t sample_index);

/// Stationary per-dimension covariance E[x(0) . x(tau)] / d of the loop
/// measure, computed three ways.
enum class CovarianceMethod {
  kSpectral,  // truncated mode sum, tau in [0, beta]
  kClosed,    // periodic Green's function of -d^2/dtau^2 + a^2, tau in [0, beta]
  kMehler,    // two-point Gaussian from the harmonic propagator, tau in (0, beta)
};
double covariance(double beta, double a, double tau, CovarianceMethod method,
                  long k_max = 100000);

/// Upper bound on the spectral truncation error of `covariance(kSpectral)`.
double covariance_tail_bound(double beta, long k_max);

/// C_0 = (d beta / 2a) coth(a beta / 2), the expected squared loop L2 norm.
double c0_constant(int dim, double beta, double a);

/// E |x(tau1) - x(tau2)|^2 under the loop measure; exact mode sum for finite
/// n_modes, closed form for the untruncated loop (n_modes = nullopt).
double increment_msd(double beta, double a, int dim, double tau1, double tau2,
                     std::optional<int> n_modes = std::nullopt);

}  // namespace pir
