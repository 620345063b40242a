#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "pir/bounds.hpp"
#include "pir/estimators.hpp"
#include "pir/harness.hpp"
#include "pir/io.hpp"
#include "pir/oracle.hpp"
#include "pir/run_config.hpp"
#include "pir/spectral.hpp"

namespace {

using namespace pir;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSampler = 3;
constexpr int kExitBoundFail = 4;

PotentialSpec build_potential(const RunConfig& cfg) {
  return make_potential(cfg.potential, cfg.dim, cfg.a, cfg.M1, cfg.potential_params);
}

ObservableSpec build_observable(const RunConfig& cfg) {
  return make_observable(cfg.observable, cfg.dim, cfg.M2);
}

void run_assumption_check(const RunConfig& cfg, const PotentialSpec& p, const ObservableSpec& o) {
  const CheckReport rep = check_assumptions(p, o, /*radius=*/5.0, /*n_probe=*/1000, cfg.seed);
  if (rep.pass) return;
  char msg[256];
  std::snprintf(msg, sizeof(msg),
                "assumption check failed (margins: va0=%.3g lower=%.3g grad=%.3g upper=%.3g "
                "obs=%.3g)",
                rep.margin_va_at_zero, rep.margin_va_lower, rep.margin_grad_bound,
                rep.margin_va_upper, rep.margin_observable);
  if (cfg.strict) throw ConfigError(msg);
  std::cerr << "warning: " << msg << "\n";
}

int run_exact(const RunConfig& cfg) {
  const PotentialSpec p = build_potential(cfg);
  const ObservableSpec o = build_observable(cfg);
  ExactReference ref;
  if (!cfg.oracle_cache.empty()) {
    OracleCache cache(cfg.oracle_cache);
    ref = cache.get_or_compute(p, o, cfg.beta, cfg.oracle_n_grid, cfg.oracle_Q, cfg.oracle_tol);
  } else {
    ref = exact_thermal_average(p, o, cfg.beta, cfg.oracle_n_grid, cfg.oracle_Q, cfg.oracle_tol);
  }
  nlohmann::json j = {{"potential", ref.potential},
                      {"observable", ref.observable},
                      {"beta", ref.beta},
                      {"value", ref.value},
                      {"n_grid", ref.n_grid},
                      {"Q", ref.extent},
                      {"richardson_drift", ref.richardson_drift},
                      {"boundary_mass", ref.boundary_mass},
                      {"trusted", ref.trusted},
                      {"config_hash", hash_hex(cfg.hash)}};
  write_file(cfg.output + ".json", j.dump(2) + "\n");
  std::cout << "exact " << format_full(ref.value) << " (drift " << format_full(ref.richardson_drift)
            << ") -> " << cfg.output << ".json\n";
  return kExitOk;
}

const std::vector<std::string> kEstimateCsvHeader = {
    "representation", "potential", "observable", "beta",      "a",
    "dim",            "N",         "D",          "n_samples", "n_quad",
    "seed",           "estimate",  "std_error",  "ess",       "ess_warn",
    "mean_A",         "mean_B",    "mean_AB",    "violations_A", "violations_B",
    "config_hash"};

int run_estimate(const RunConfig& cfg) {
  const PotentialSpec p = build_potential(cfg);
  const ObservableSpec o = build_observable(cfg);
  run_assumption_check(cfg, p, o);

  EstimatorResult result;
  std::optional<ABStatistics> ab;
  if (cfg.representation == "std") {
    StdSamplerOptions so;
    so.n_steps = cfg.n_samples;
    so.step_h = cfg.step_h;
    so.burn_in_fraction = cfg.burn_in;
    so.metropolis = cfg.metropolis;
    so.threads = cfg.threads;
    so.seed = cfg.seed;
    result = sample_std(p, o, cfg.beta, cfg.D, so);
  } else {
    CLOptions co;
    co.n_samples = cfg.n_samples;
    co.n_quad = cfg.n_quad;
    co.ess_floor_fraction = cfg.ess_floor;
    co.seed = cfg.seed;
    co.threads = cfg.threads;
    CLEstimate est = cfg.representation == "cl"
                         ? estimate_cl_truncated(p, o, cfg.beta, cfg.N, co)
                         : estimate_cl_discretized(p, o, cfg.beta, cfg.N, cfg.D, co);
    result = est.result;
    ab = est.ab;
  }

  CsvBuilder csv(kEstimateCsvHeader);
  std::vector<std::string> row = {
      cfg.representation,
      cfg.potential,
      cfg.observable,
      format_full(cfg.beta),
      format_full(cfg.a),
      std::to_string(cfg.dim),
      std::to_string(result.n_modes),
      std::to_string(result.grid_points),
      std::to_string(result.n_samples),
      std::to_string(cfg.n_quad),
      std::to_string(result.seed),
      format_full(result.estimate),
      format_full(result.std_error),
      format_full(result.ess),
      result.ess_warning ? "1" : "0",
      ab ? format_full(ab->mean_A) : "",
      ab ? format_full(ab->mean_B) : "",
      ab ? format_full(ab->mean_AB) : "",
      ab ? std::to_string(ab->violations_A) : "",
      ab ? std::to_string(ab->violations_B) : "",
      hash_hex(cfg.hash)};
  csv.add_row(row);
  write_file(cfg.output + ".csv", csv.str());
  std::cout << cfg.representation << " estimate " << format_full(result.estimate) << " +/- "
            << format_full(result.std_error) << " (ess " << format_full(result.ess) << ")"
            << (result.ess_warning ? " [ESS-WARN]" : "") << " -> " << cfg.output << ".csv\n";
  return kExitOk;
}

int run_sweep_cmd(const RunConfig& cfg) {
  SweepPlan plan;
  if (cfg.sweep_mode == "std") plan.mode = SweepMode::kStd;
  else if (cfg.sweep_mode == "cl") plan.mode = SweepMode::kCl;
  else if (cfg.sweep_mode == "thm-disc") plan.mode = SweepMode::kClDiscretization;
  else plan.mode = SweepMode::kCombined;

  const bool needs_n = plan.mode == SweepMode::kCl || plan.mode == SweepMode::kCombined;
  const bool needs_d = plan.mode != SweepMode::kCl;
  if (needs_n && cfg.N_list.empty()) throw ConfigError("sweep.N_list: empty");
  if (needs_d && cfg.D_list.empty()) throw ConfigError("sweep.D_list: empty");

  plan.potential = cfg.potential;
  plan.potential_params = cfg.potential_params;
  plan.observable = cfg.observable;
  plan.dim = cfg.dim;
  plan.beta = cfg.beta;
  plan.a = cfg.a;
  plan.M1 = cfg.M1;
  plan.M2 = cfg.M2;
  plan.n_list = cfg.N_list;
  plan.d_list = cfg.D_list;
  plan.n_fixed = cfg.N_fixed;
  plan.samples = cfg.sweep_samples;
  plan.base_seed = cfg.seed;
  plan.threads = cfg.threads;
  plan.n_quad = cfg.n_quad;
  plan.ess_floor_fraction = cfg.ess_floor;
  plan.step_h = cfg.step_h;
  plan.metropolis = cfg.metropolis;
  plan.oracle_n_grid = cfg.oracle_n_grid;
  plan.oracle_extent = cfg.oracle_Q;
  plan.oracle_tol = cfg.oracle_tol;
  plan.oracle_cache = cfg.oracle_cache;
  plan.debug_bound_scale = cfg.debug_bound_scale;

  {
    const PotentialSpec p = build_potential(cfg);
    const ObservableSpec o = build_observable(cfg);
    run_assumption_check(cfg, p, o);
  }

  const ConvergenceReport report = run_sweep(plan);
  write_file(cfg.output + ".csv", report_csv(report, cfg.hash));
  write_file(cfg.output + ".json", report_json(report, cfg.hash));
  int n_fail = 0;
  for (const auto& pt : report.points)
    if (pt.verdict && !pt.verdict->pass) ++n_fail;
  std::cout << "sweep " << to_string(plan.mode) << ": " << report.points.size() << " points, "
            << n_fail << " bound failures";
  if (report.rate) std::cout << ", fitted slope " << format_full(report.rate->slope);
  std::cout << " -> " << cfg.output << ".{csv,json}\n";
  return report.all_verdicts_pass ? kExitOk : kExitBoundFail;
}

int run_covariance(const RunConfig& cfg) {
  if (cfg.tau_list.empty()) throw ConfigError("covariance.tau_list: empty");
  CsvBuilder csv({"tau", "closed", "spectral", "mehler", "spectral_tail_bound", "config_hash"});
  const std::string hash = hash_hex(cfg.hash);
  for (double tau : cfg.tau_list) {
    const double closed = covariance(cfg.beta, cfg.a, tau, CovarianceMethod::kClosed);
    const double spectral =
        covariance(cfg.beta, cfg.a, tau, CovarianceMethod::kSpectral, cfg.k_max);
    std::string mehler;
    if (tau > 0.0 && tau < cfg.beta)
      mehler = format_full(covariance(cfg.beta, cfg.a, tau, CovarianceMethod::kMehler));
    csv.add_row({format_full(tau), format_full(closed), format_full(spectral), mehler,
                 format_full(covariance_tail_bound(cfg.beta, cfg.k_max)), hash});
  }
  write_file(cfg.output + ".csv", csv.str());
  std::cout << "covariance table (" << cfg.tau_list.size() << " tau values) -> " << cfg.output
            << ".csv\n";
  return kExitOk;
}

int run_holder(const RunConfig& cfg) {
  if (cfg.delta_list.empty()) throw ConfigError("holder.delta_list: empty");
  const HolderTable table = holder_scan(cfg.beta, cfg.a, cfg.dim, cfg.holder_N,
                                        cfg.holder_samples, cfg.delta_list, cfg.seed, cfg.threads);
  write_file(cfg.output + ".csv", holder_csv(table, cfg.hash));
  nlohmann::json j;
  j["config_hash"] = hash_hex(cfg.hash);
  j["bound_coefficient"] = cfg.dim * (2.0 * cfg.beta + 1.0);
  if (table.slope)
    j["slope"] = {{"value", table.slope->slope}, {"r2", table.slope->r2}};
  else
    j["slope"] = nullptr;
  write_file(cfg.output + ".json", j.dump(2) + "\n");
  std::cout << "holder scan (" << table.rows.size() << " deltas)";
  if (table.slope) std::cout << ", slope " << format_full(table.slope->slope);
  std::cout << " -> " << cfg.output << ".{csv,json}\n";
  return kExitOk;
}

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "run configuration file")->required();
  cmd->add_option("--seed", args.seed, "override the seed from the config");
  cmd->add_option("-o,--output", args.output, "override the output path prefix");
}

int dispatch(const std::string& subcommand, const CommonArgs& args) {
  RunConfig cfg = load_run_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.output) cfg.output = *args.output;
  // Thread count is the only environment override; it never changes results.
  if (const char* env = std::getenv("PIR_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw ConfigError("PIR_THREADS: must be a positive integer");
    cfg.threads = static_cast<int>(n);
  }

  const std::map<std::string, std::set<std::string>> allowed = {
      {"exact", {"exact"}},
      {"estimate", {"std", "cl", "cl-disc"}},
      {"sweep", {"sweep"}},
      {"covariance", {"covariance"}},
      {"holder", {"holder"}},
  };
  if (!allowed.at(subcommand).count(cfg.representation))
    throw ConfigError("run.representation: '" + cfg.representation +
                      "' does not match subcommand '" + subcommand + "'");

  if (subcommand == "exact") return run_exact(cfg);
  if (subcommand == "estimate") return run_estimate(cfg);
  if (subcommand == "sweep") return run_sweep_cmd(cfg);
  if (subcommand == "covariance") return run_covariance(cfg);
  return run_holder(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum thermal averages via path-integral representations"};
  app.require_subcommand(1);

  CommonArgs args;
  const char* names[] = {"exact", "estimate", "sweep", "covariance", "holder"};
  const char* descs[] = {"grid-eigensolver reference value",
                         "single estimator run (std | cl | cl-disc)",
                         "convergence sweep with bound verdicts",
                         "loop covariance by three methods",
                         "loop increment statistics"};
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], descs[i]), args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return dispatch(sub, args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SamplerError& e) {
    std::cerr << "sampler error: " << e.what() << "\n";
    return kExitSampler;
  } catch (const EstimatorError& e) {
    std::cerr << "estimator error: " << e.what() << "\n";
    return kExitSampler;
  } catch (const OracleError& e) {
    std::cerr << "oracle error: " << e.what() << " (drift " << e.drift() << ")\n";
    return kExitSampler;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
