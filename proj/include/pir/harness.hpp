#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pir/bounds.hpp"
#include "pir/estimators.hpp"
#include "pir/oracle.hpp"

namespace pir {

/// What a sweep varies and which bound it checks.
enum class SweepMode {
  kStd,              // D sweep of the ring-polymer sampler against the oracle
  kCl,               // N sweep of cl(N) against the oracle; bound K / sqrt(N)
  kClDiscretization, // D sweep of |cl(N) - cl(N, D)| on common draws; bound L / sqrt(D)
  kCombined,         // (N, D) grid of cl(N, D) against the oracle; combined bound
};
std::string to_string(SweepMode m);

struct SweepPlan {
  SweepMode mode = SweepMode::kCl;
  std::string potential = "harmonic";
  std::map<std::string, double> potential_params;
  std::string observable = "coord_sq";
  int dim = 1;
  double beta = 1.0;
  double a = 1.0;
  double M1 = 1.0;
  double M2 = 1.0;
  std::vector<int> n_list;  // strictly increasing
  std::vector<int> d_list;  // strictly increasing
  int n_fixed = 32;         // N for the discretization sweep
  long samples = 100000;    // per point (chain steps for std mode)
  std::uint64_t base_seed = 1;
  int threads = 1;
  int n_quad = 0;
  double ess_floor_fraction = 0.0;
  double step_h = 0.0;
  bool metropolis = true;
  int oracle_n_grid = 2048;
  double oracle_extent = 0.0;
  double oracle_tol = 1e-6;
  std::string oracle_cache;   // optional sidecar path
  double debug_bound_scale = 1.0;  // deliberately shrink bounds to exercise failure paths
};

struct SweepPoint {
  int n_modes = 0;
  int grid_points = 0;
  EstimatorResult result;
  double reference = 0.0;  // oracle value, or the paired estimate in kClDiscretization
  double abs_error = 0.0;
  double error_sigma = 0.0;  // MC sigma of the compared difference
  std::optional<BoundVerdict> verdict;
  std::optional<ABStatistics> ab;
  std::string failure;  // non-empty if this point failed; sweep continues
};

struct ConvergenceReport {
  SweepPlan plan;
  std::vector<SweepPoint> points;
  std::optional<double> oracle_value;
  std::optional<BoundConstants> constants;
  std::optional<RateFit> rate;
  bool rate_fit_skipped = false;  // too few points; flagged per contract
  bool all_verdicts_pass = true;
  long total_violations_A = 0;
  long total_violations_B = 0;
  double total_wall_s = 0.0;
};

/// Runs every (N, D) point of the plan, compares against the designated
/// reference, evaluates bound verdicts, and fits the empirical rate.
/// Individual point failures are recorded; oracle failures abort the plan.
ConvergenceReport run_sweep(const SweepPlan& plan);

/// Loop-increment statistics E|x(tau + delta) - x(tau)|^2 per delta with the
/// linear-in-delta bound d (2 beta + 1) delta alongside, plus the log-log
/// slope over the positive-delta rows.
struct HolderRow {
  double delta = 0.0;
  double msd = 0.0;
  double sigma = 0.0;
  double bound = 0.0;
};
struct HolderTable {
  std::vector<HolderRow> rows;
  std::optional<RateFit> slope;
};
HolderTable holder_scan(double beta, double a, int dim, int n_modes, long n_samples,
                        const std::vector<double>& deltas, std::uint64_t seed, int threads = 1);

/// Fixed-schema CSV (one row per point) and JSON summary. Deterministic for
/// a fixed (plan, seed); wall time appears only in the JSON `wall` block.
std::string report_csv(const ConvergenceReport& report, std::uint64_t config_hash);
std::string report_json(const ConvergenceReport& report, std::uint64_t config_hash);
std::string holder_csv(const HolderTable& table, std::uint64_t config_hash);

/// Loop states embed into the JSON run records; round-trips exactly.
std::string loop_to_json(const NormalModeLoop& loop);
NormalModeLoop loop_from_json(const std::string& text);
std::string ring_polymer_to_json(const RingPolymer& rp);
RingPolymer ring_polymer_from_json(const std::string& text);

extern const std::vector<std::string> kReportCsvHeader;

}  // namespace pir
