#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pir/potentials.hpp"
#include "pir/spectral.hpp"

namespace pir {

/// Divergent chain or otherwise unusable sampler state.
class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimator could not produce a finite value (e.g. every weight underflowed).
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Representation { kStd, kClTruncated, kClDiscretized };
std::string to_string(Representation r);

/// Point estimate with its Monte Carlo error bar and provenance.
struct EstimatorResult {
  Representation representation = Representation::kStd;
  double estimate = 0.0;
  double std_error = 0.0;  // 0 only for degenerate (constant) statistics
  long n_samples = 0;
  double ess = 0.0;  // effective sample size, <= n_samples
  bool ess_warning = false;
  std::uint64_t seed = 0;
  int n_modes = 0;     // N (0 for std)
  int grid_points = 0; // D (0 for truncated CL)
  double wall_time_s = 0.0;
};

/// Per-sample statistics of the importance weight A = exp(-integral of V^a)
/// and the loop-averaged observable B, including violations of the a priori
/// bounds A <= exp(beta M1), |B| <= M2.
struct ABStatistics {
  double mean_A = 0.0;
  double mean_B = 0.0;
  double mean_AB = 0.0;
  double max_A = 0.0;
  double max_abs_B = 0.0;
  double log_weight_min = 0.0;
  double log_weight_max = 0.0;
  long violations_A = 0;
  long violations_B = 0;
};

/// Ring-polymer energy
///   E_D(x) = 1/(2 beta_D) sum_j |x_j - x_{j+1}|^2 + beta_D sum_j V(x_j)
/// with cyclic indices, and its gradient.
double std_energy(const RingPolymer& rp, const PotentialSpec& p);
void std_energy_grad(const RingPolymer& rp, const PotentialSpec& p, Mat& grad);

/// Same energy through the grid normal modes:
///   1/2 sum_k (omega_{k,D}^2 + a^2) |xi_k|^2 + beta_D sum_j V^a(x_j).
/// Agrees with std_energy to rounding; exercised by tests.
double std_energy_normal_mode(const RingPolymer& rp, const PotentialSpec& p);

struct StdSamplerOptions {
  long n_steps = 200000;
  double step_h = 0.0;  // 0 -> beta_D / 10
  double burn_in_fraction = 0.1;
  bool metropolis = true;  // Metropolis-adjusted (exact) vs plain Euler-Maruyama
  int n_chains = 1;
  int threads = 1;
  std::uint64_t seed = 1;
  std::uint64_t chain_id0 = 0;
  double energy_threshold = 1e10;
};

/// Overdamped Langevin sampling of the ring-polymer Boltzmann distribution;
/// returns the time average of (1/D) sum_j O(x_j) with a batch-means error
/// bar. Throws SamplerError on energy divergence.
EstimatorResult sample_std(const PotentialSpec& p, const ObservableSpec& o, double beta,
                           int grid_points, const StdSamplerOptions& opts);

/// Composite Gauss-Legendre approximation of integral_0^beta V^a(x_N(tau)) dtau.
/// Requires n_quad >= 4 N so the highest mode is resolved; the actual node
/// count is n_quad rounded up to a whole number of 10-point panels.
double quadrature_va(const NormalModeLoop& loop, const PotentialSpec& p, int n_quad);

/// Left Riemann sum beta_D sum_j V^a(x_N(j beta_D)). Any D >= 1; this is the
/// quantity whose D -> infinity limit quadrature_va approximates.
double riemann_va(const NormalModeLoop& loop, const PotentialSpec& p, int grid_points);

struct CLOptions {
  long n_samples = 100000;
  int n_quad = 0;  // 0 -> 4 N (truncated representation only)
  double ess_floor_fraction = 0.0;
  std::uint64_t seed = 1;
  std::uint64_t stream_id = 0;
  int threads = 1;
  bool keep_log_weights = false;  // retain the per-sample log-weights in the result
};

struct CLEstimate {
  EstimatorResult result;
  ABStatistics ab;
  std::vector<double> log_weights;  // populated when opts.keep_log_weights
};

/// Self-normalized importance sampling under the Gaussian loop measure:
/// weights A_N = exp(-quadrature of V^a), payload B_N = loop average of O on
/// the same rule and nodes. Throws EstimatorError if all weights underflow;
/// sets ess_warning if ESS falls below the configured floor.
CLEstimate estimate_cl_truncated(const PotentialSpec& p, const ObservableSpec& o, double beta,
                                 int n_modes, const CLOptions& opts);

/// Same estimator with the Riemann sum on D grid points replacing the
/// quadrature (the fully discretized representation).
CLEstimate estimate_cl_discretized(const PotentialSpec& p, const ObservableSpec& o, double beta,
                                   int n_modes, int grid_points, const CLOptions& opts);

/// Two estimators evaluated on common random numbers, with the paired
/// statistics the convergence lemmas bound: E|A - A'|, E|B - B'|, E|AB - A'B'|
/// and the difference of the two self-normalized estimates.
struct PairedComparison {
  double estimate_a = 0.0;
  double estimate_b = 0.0;
  double diff = 0.0;        // estimate_a - estimate_b
  double diff_sigma = 0.0;  // delta-method std error of diff
  double mean_abs_dA = 0.0, sigma_dA = 0.0;
  double mean_abs_dB = 0.0, sigma_dB = 0.0;
  double mean_abs_dAB = 0.0, sigma_dAB = 0.0;
  ABStatistics ab_a, ab_b;
  long n_samples = 0;
};

/// cl(N) vs cl(N, D) on shared loop draws.
PairedComparison compare_cl_truncated_vs_discretized(const PotentialSpec& p,
                                                     const ObservableSpec& o, double beta,
                                                     int n_modes, int grid_points,
                                                     const CLOptions& opts);

/// cl(N) vs cl(N_ref), N < N_ref, on shared loop draws (the high-N proxy for
/// the untruncated loop); both integrals use the fine rule.
PairedComparison compare_truncation_levels(const PotentialSpec& p, const ObservableSpec& o,
                                           double beta, int n_modes, int n_modes_ref,
                                           const CLOptions& opts);

}  // namespace pir
