#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pir {

/// Malformed or out-of-schema configuration; the message names the offending
/// section.key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One run = one config file. INI-style sections, `key = value` lines,
/// `#` comments. Unknown sections or keys are rejected. The command line may
/// override only the seed and the output path.
struct RunConfig {
  std::string raw_text;
  std::uint64_t hash = 0;

  // [run]
  std::string representation = "exact";  // std | cl | cl-disc | exact | sweep | covariance | holder
  std::uint64_t seed = 1;
  std::string output = "out/run";
  int threads = 1;

  // [problem]
  std::string potential = "harmonic";
  std::map<std::string, double> potential_params;  // omega, bump_c, bump_k
  std::string observable = "coord_sq";
  int dim = 1;
  double beta = 1.0;
  double a = 1.0;
  double M1 = 1.0;
  double M2 = 1.0;
  bool strict = false;

  // [estimator]
  long n_samples = 100000;
  int N = 32;
  int D = 64;
  int n_quad = 0;
  double step_h = 0.0;
  double burn_in = 0.1;
  double ess_floor = 0.0;
  bool metropolis = true;

  // [oracle]
  int oracle_n_grid = 2048;
  double oracle_Q = 0.0;  // 0 -> automatic extent
  double oracle_tol = 1e-6;
  std::string oracle_cache;

  // [sweep]
  std::string sweep_mode = "cl";  // std | cl | thm-disc | combined
  std::vector<int> N_list;
  std::vector<int> D_list;
  int N_fixed = 32;
  long sweep_samples = 100000;
  double debug_bound_scale = 1.0;

  // [covariance]
  std::vector<double> tau_list;
  long k_max = 100000;

  // [holder]
  std::vector<double> delta_list;
  int holder_N = 1024;
  long holder_samples = 10000;
};

/// Parses and validates; throws ConfigError on any schema or value problem.
RunConfig parse_run_config(const std::string& text);

/// Convenience: read file then parse.
RunConfig load_run_config(const std::string& path);

}  // namespace pir
