#pragma once

#include <stdexcept>
#include <string>

#include "pir/potentials.hpp"

namespace pir {

/// Raised when an exact reference cannot be certified (non-converged
/// resolution, boundary leakage).
class OracleError : public std::runtime_error {
 public:
  OracleError(const std::string& what, double drift) : std::runtime_error(what), drift_(drift) {}
  double drift() const { return drift_; }

 private:
  double drift_;
};

/// Dense one-dimensional Schrodinger Hamiltonian on a uniform grid over
/// [-Q, Q]: H = -(1/2) (central second difference) + diag(V), Dirichlet
/// boundaries. The matrix is tridiagonal; `dense()` materializes it for
/// inspection.
struct GridHamiltonian {
  Eigen::VectorXd q;         // grid points
  double h = 0.0;            // spacing
  Eigen::VectorXd diagonal;  // 1/h^2 + V(q_i)
  double off_diagonal = 0.0; // -1/(2 h^2)

  static GridHamiltonian build(const PotentialSpec& p, int n_grid, double extent);
  Mat dense() const;
};

/// Certified reference value of the thermal average, with the resolution
/// metadata that certifies it.
struct ExactReference {
  std::string potential;
  std::string observable;
  double beta = 0.0;
  double value = 0.0;             // Richardson-extrapolated thermal average
  double log_partition = 0.0;     // log Tr e^{-beta H} on the finest grid
  int n_grid = 0;
  double extent = 0.0;            // Q
  double richardson_drift = 0.0;  // change of the extrapolated value under the last doubling
  double boundary_mass = 0.0;     // thermal probability mass at the edge nodes
  bool trusted = false;
};

/// Default spatial extent for a potential confined by a^2 q^2 / 2 at least.
double default_extent(double a);

/// Thermal average <O>_beta from dense diagonalization of the grid
/// Hamiltonian at n_grid/4, n_grid/2 and n_grid points, Richardson-
/// extrapolated assuming O(h^2) convergence. The two successive extrapolants
/// certify stability: their difference must stay below `tol`, and boundary
/// mass below 1e-8, else OracleError. d = 1 only.
ExactReference exact_thermal_average(const PotentialSpec& p, const ObservableSpec& o, double beta,
                                     int n_grid = 2048, double extent = 0.0, double tol = 1e-6);

/// Trace ratio Tr[(G e^{-beta_D V})^D O] / Tr[(G e^{-beta_D V})^D] on the
/// grid, with G the heat-kernel transfer matrix. This is the
/// finite-dimensional shadow of the D-bead ring-polymer thermal average;
/// converges to the exact value as D grows. d = 1 only.
double trotter_trace(const PotentialSpec& p, const ObservableSpec& o, double beta, int trotter_D,
                     int n_grid = 512, double extent = 0.0);

/// JSON sidecar cache of ExactReference records keyed by
/// (potential, observable, beta, n_grid, Q).
class OracleCache {
 public:
  explicit OracleCache(std::string path) : path_(std::move(path)) {}

  /// Returns the cached record or computes, stores, and returns it.
  ExactReference get_or_compute(const PotentialSpec& p, const ObservableSpec& o, double beta,
                                int n_grid = 2048, double extent = 0.0, double tol = 1e-6);

 private:
  std::string path_;
};

}  // namespace pir
