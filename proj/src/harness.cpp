#include "pir/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "pir/io.hpp"
#include "pir/numerics.hpp"

namespace pir {

std::string to_string(SweepMode m) {
  switch (m) {
    case SweepMode::kStd: return "std";
    case SweepMode::kCl: return "cl";
    case SweepMode::kClDiscretization: return "cl-vs-disc";
    case SweepMode::kCombined: return "combined";
  }
  return "?";
}

namespace {

void validate_increasing(const std::vector<int>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1])
      throw std::invalid_argument(std::string("run_sweep: ") + what +
                                  " list must be strictly increasing");
}

ABStatistics merge_ab(const ABStatistics& a, const ABStatistics& b) {
  ABStatistics m = a;
  m.violations_A += b.violations_A;
  m.violations_B += b.violations_B;
  m.max_A = std::max(a.max_A, b.max_A);
  m.max_abs_B = std::max(a.max_abs_B, b.max_abs_B);
  m.log_weight_min = std::min(a.log_weight_min, b.log_weight_min);
  m.log_weight_max = std::max(a.log_weight_max, b.log_weight_max);
  return m;
}

}  // namespace

ConvergenceReport run_sweep(const SweepPlan& plan) {
  const auto t0 = std::chrono::steady_clock::now();
  if (plan.samples < 1000) throw std::invalid_argument("run_sweep: samples must be >= 1000");
  validate_increasing(plan.n_list, "N");
  validate_increasing(plan.d_list, "D");

  const PotentialSpec p =
      make_potential(plan.potential, plan.dim, plan.a, plan.M1, plan.potential_params);
  const ObservableSpec o = make_observable(plan.observable, plan.dim, plan.M2);

  ConvergenceReport report;
  report.plan = plan;

  const bool needs_oracle = plan.mode == SweepMode::kStd || plan.mode == SweepMode::kCl ||
                            plan.mode == SweepMode::kCombined;
  if (needs_oracle) {
    if (plan.dim != 1)
      throw std::invalid_argument("run_sweep: oracle-referenced sweeps need dim = 1");
    // Oracle failure is a plan error, not a point failure.
    if (!plan.oracle_cache.empty()) {
      OracleCache cache(plan.oracle_cache);
      report.oracle_value = cache
                                .get_or_compute(p, o, plan.beta, plan.oracle_n_grid,
                                                plan.oracle_extent, plan.oracle_tol)
                                .value;
    } else {
      report.oracle_value = exact_thermal_average(p, o, plan.beta, plan.oracle_n_grid,
                                                  plan.oracle_extent, plan.oracle_tol)
                                .value;
    }
  }
  report.constants = compute_constants(plan.M1, plan.M2, plan.beta, plan.dim, plan.a);
  const double scale = plan.debug_bound_scale;

  struct Task {
    int N = 0, D = 0;
  };
  std::vector<Task> tasks;
  switch (plan.mode) {
    case SweepMode::kStd:
      if (plan.d_list.empty()) throw std::invalid_argument("run_sweep: std mode needs a D list");
      for (int D : plan.d_list) tasks.push_back({0, D});
      break;
    case SweepMode::kCl:
      if (plan.n_list.empty()) throw std::invalid_argument("run_sweep: cl mode needs an N list");
      for (int N : plan.n_list) tasks.push_back({N, 0});
      break;
    case SweepMode::kClDiscretization:
      if (plan.d_list.empty())
        throw std::invalid_argument("run_sweep: discretization mode needs a D list");
      for (int D : plan.d_list) tasks.push_back({plan.n_fixed, D});
      break;
    case SweepMode::kCombined:
      if (plan.n_list.empty() || plan.d_list.empty())
        throw std::invalid_argument("run_sweep: combined mode needs N and D lists");
      for (int N : plan.n_list)
        for (int D : plan.d_list) tasks.push_back({N, D});
      break;
  }

  for (std::size_t idx = 0; idx < tasks.size(); ++idx) {
    const Task task = tasks[idx];
    SweepPoint point;
    point.n_modes = task.N;
    point.grid_points = task.D;
    try {
      switch (plan.mode) {
        case SweepMode::kStd: {
          StdSamplerOptions so;
          so.n_steps = plan.samples;
          so.step_h = plan.step_h;
          so.metropolis = plan.metropolis;
          so.seed = plan.base_seed;
          so.chain_id0 = static_cast<std::uint64_t>(idx) << 32;
          so.threads = plan.threads;
          point.result = sample_std(p, o, plan.beta, task.D, so);
          point.reference = *report.oracle_value;
          point.abs_error = std::abs(point.result.estimate - point.reference);
          point.error_sigma = point.result.std_error;
          break;
        }
        case SweepMode::kCl: {
          CLOptions co;
          co.n_samples = plan.samples;
          co.n_quad = plan.n_quad;
          co.seed = plan.base_seed;
          co.stream_id = idx;
          co.threads = plan.threads;
          co.ess_floor_fraction = plan.ess_floor_fraction;
          CLEstimate est = estimate_cl_truncated(p, o, plan.beta, task.N, co);
          point.result = est.result;
          point.ab = est.ab;
          point.reference = *report.oracle_value;
          point.abs_error = std::abs(point.result.estimate - point.reference);
          point.error_sigma = point.result.std_error;
          point.verdict = check_bound(point.abs_error, point.error_sigma,
                                      scale * report.constants->K, std::sqrt(task.N), "K/sqrt(N)");
          break;
        }
        case SweepMode::kClDiscretization: {
          CLOptions co;
          co.n_samples = plan.samples;
          co.n_quad = plan.n_quad;
          co.seed = plan.base_seed;
          co.stream_id = 0;  // shared draws across D: the comparison is paired by design
          co.threads = plan.threads;
          co.ess_floor_fraction = plan.ess_floor_fraction;
          PairedComparison cmp =
              compare_cl_truncated_vs_discretized(p, o, plan.beta, task.N, task.D, co);
          point.result.representation = Representation::kClDiscretized;
          point.result.estimate = cmp.estimate_a;
          point.result.std_error = cmp.diff_sigma;
          point.result.n_samples = cmp.n_samples;
          point.result.seed = plan.base_seed;
          point.result.n_modes = task.N;
          point.result.grid_points = task.D;
          point.reference = cmp.estimate_b;
          point.abs_error = std::abs(cmp.diff);
          point.error_sigma = cmp.diff_sigma;
          point.ab = merge_ab(cmp.ab_a, cmp.ab_b);
          point.verdict = check_bound(point.abs_error, point.error_sigma,
                                      scale * report.constants->L, std::sqrt(task.D), "L/sqrt(D)");
          break;
        }
        case SweepMode::kCombined: {
          CLOptions co;
          co.n_samples = plan.samples;
          co.n_quad = plan.n_quad;
          co.seed = plan.base_seed;
          co.stream_id = idx;
          co.threads = plan.threads;
          co.ess_floor_fraction = plan.ess_floor_fraction;
          CLEstimate est = estimate_cl_discretized(p, o, plan.beta, task.N, task.D, co);
          point.result = est.result;
          point.ab = est.ab;
          point.reference = *report.oracle_value;
          point.abs_error = std::abs(point.result.estimate - point.reference);
          point.error_sigma = point.result.std_error;
          point.verdict =
              check_bound(point.abs_error, point.error_sigma,
                          scale * report.constants->combined(task.N, task.D), 1.0, "combined");
          break;
        }
      }
    } catch (const std::exception& e) {
      point.failure = e.what();
    }
    if (point.verdict && !point.verdict->pass) report.all_verdicts_pass = false;
    if (point.ab) {
      report.total_violations_A += point.ab->violations_A;
      report.total_violations_B += point.ab->violations_B;
    }
    report.points.push_back(std::move(point));
  }

  // Empirical rate over the sweep variable (skipped for 2-D grids and for
  // degenerate sweeps, which are flagged instead).
  if (plan.mode != SweepMode::kCombined) {
    std::vector<double> xs, es;
    for (const auto& pt : report.points) {
      if (!pt.failure.empty()) continue;
      const int v = plan.mode == SweepMode::kCl ? pt.n_modes : pt.grid_points;
      if (pt.abs_error > 0.0) {
        xs.push_back(static_cast<double>(v));
        es.push_back(pt.abs_error);
      }
    }
    if (xs.size() >= 4) {
      report.rate = fit_rate(xs, es);
    } else {
      report.rate_fit_skipped = true;
    }
  } else {
    report.rate_fit_skipped = true;
  }

  report.total_wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

HolderTable holder_scan(double beta, double a, int dim, int n_modes, long n_samples,
                        const std::vector<double>& deltas, std::uint64_t seed, int threads) {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] < 0.0) throw std::invalid_argument("holder_scan: deltas must be nonnegative");
    if (i > 0 && deltas[i] >= deltas[i - 1])
      throw std::invalid_argument("holder_scan: deltas must be decreasing");
  }
  if (!deltas.empty() && deltas.front() > beta)
    throw std::invalid_argument("holder_scan: delta exceeds beta");

  const SpectralBasis basis(beta, n_modes);
  std::vector<double> scale(static_cast<std::size_t>(n_modes));
  for (int k = 0; k < n_modes; ++k) {
    const double w = basis.omega(k);
    scale[static_cast<std::size_t>(k)] = 1.0 / std::sqrt(w * w + a * a);
  }
  const CounterStream stream(seed, 0);
  const std::size_t n_gauss = static_cast<std::size_t>(n_modes) * dim;
  const std::uint64_t tau_block = (n_gauss + 1) / 2;

  const std::size_t n_delta = deltas.size();
  constexpr long kBlock = 256;
  const long n_blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> block_sum(static_cast<std::size_t>(n_blocks)),
      block_sq(static_cast<std::size_t>(n_blocks));

  std::atomic<long> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  auto worker = [&]() {
    try {
      std::vector<double> gauss(n_gauss);
      Mat xi(n_modes, dim);
      Vec x0(dim), x1(dim);
      for (;;) {
        const long blk = next.fetch_add(1);
        if (blk >= n_blocks) break;
        auto& s = block_sum[static_cast<std::size_t>(blk)];
        auto& s2 = block_sq[static_cast<std::size_t>(blk)];
        s.assign(n_delta, 0.0);
        s2.assign(n_delta, 0.0);
        const long lo = blk * kBlock, hi = std::min(n_samples, lo + kBlock);
        for (long i = lo; i < hi; ++i) {
          stream.fill_gaussians(static_cast<std::uint64_t>(i), gauss);
          for (int k = 0; k < n_modes; ++k)
            for (int t = 0; t < dim; ++t)
              xi(k, t) = scale[static_cast<std::size_t>(k)] *
                         gauss[static_cast<std::size_t>(k) * dim + t];
          const double tau =
              stream.uniform(static_cast<std::uint64_t>(i), tau_block) * beta * (1.0 - 1e-12);
          x0.setZero();
          for (int k = 0; k < n_modes; ++k)
            x0 += basis.eval_mode(k, tau) * xi.row(k).transpose();
          for (std::size_t r = 0; r < n_delta; ++r) {
            double tau1 = tau + deltas[r];
            if (tau1 > beta) tau1 -= beta;  // torus
            x1.setZero();
            for (int k = 0; k < n_modes; ++k)
              x1 += basis.eval_mode(k, tau1) * xi.row(k).transpose();
            const double d2 = (x1 - x0).squaredNorm();
            s[r] += d2;
            s2[r] += d2 * d2;
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!err) err = std::current_exception();
    }
  };
  const int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);

  HolderTable table;
  const double nn = static_cast<double>(n_samples);
  std::vector<double> xs, es;
  for (std::size_t r = 0; r < n_delta; ++r) {
    double sum = 0.0, sq = 0.0;
    for (long blk = 0; blk < n_blocks; ++blk) {
      sum += block_sum[static_cast<std::size_t>(blk)][r];
      sq += block_sq[static_cast<std::size_t>(blk)][r];
    }
    HolderRow row;
    row.delta = deltas[r];
    row.msd = sum / nn;
    const double var = std::max(0.0, sq / nn - row.msd * row.msd);
    row.sigma = std::sqrt(var / nn);
    row.bound = dim * (2.0 * beta + 1.0) * deltas[r];
    table.rows.push_back(row);
    if (row.delta > 0.0 && row.msd > 0.0) {
      xs.push_back(row.delta);
      es.push_back(row.msd);
    }
  }
  if (xs.size() >= 4) table.slope = fit_rate(xs, es);
  return table;
}

const std::vector<std::string> kReportCsvHeader = {
    "mode",       "potential",  "observable",      "beta",    "a",
    "dim",        "N",          "D",               "n_samples", "seed",
    "estimate",   "std_error",  "ess",             "ess_warn", "reference",
    "abs_error",  "bound_name", "bound_value",     "sigma_allowance", "verdict",
    "point_error", "config_hash"};

std::string report_csv(const ConvergenceReport& report, std::uint64_t config_hash) {
  CsvBuilder csv(kReportCsvHeader);
  const std::string hash = hash_hex(config_hash);
  for (const auto& pt : report.points) {
    std::vector<std::string> row;
    row.push_back(to_string(report.plan.mode));
    row.push_back(report.plan.potential);
    row.push_back(report.plan.observable);
    row.push_back(format_full(report.plan.beta));
    row.push_back(format_full(report.plan.a));
    row.push_back(std::to_string(report.plan.dim));
    row.push_back(std::to_string(pt.n_modes));
    row.push_back(std::to_string(pt.grid_points));
    row.push_back(std::to_string(pt.result.n_samples));
    row.push_back(std::to_string(pt.result.seed));
    row.push_back(format_full(pt.result.estimate));
    row.push_back(format_full(pt.result.std_error));
    row.push_back(format_full(pt.result.ess));
    row.push_back(pt.result.ess_warning ? "1" : "0");
    row.push_back(format_full(pt.reference));
    row.push_back(format_full(pt.abs_error));
    row.push_back(pt.verdict ? pt.verdict->bound_name : "");
    row.push_back(pt.verdict ? format_full(pt.verdict->bound_value) : "");
    row.push_back(pt.verdict ? format_full(3.0 * pt.verdict->mc_sigma) : "");
    row.push_back(pt.verdict ? (pt.verdict->pass ? "pass" : "fail") : "");
    std::string failure = pt.failure;
    for (char& c : failure)
      if (c == ',' || c == '\n') c = ';';
    row.push_back(failure);
    row.push_back(hash);
    csv.add_row(row);
  }
  return csv.str();
}

std::string report_json(const ConvergenceReport& report, std::uint64_t config_hash) {
  nlohmann::json j;
  j["config_hash"] = hash_hex(config_hash);
  j["mode"] = to_string(report.plan.mode);
  j["potential"] = report.plan.potential;
  j["observable"] = report.plan.observable;
  j["beta"] = report.plan.beta;
  j["a"] = report.plan.a;
  j["dim"] = report.plan.dim;
  j["samples"] = report.plan.samples;
  j["seed"] = report.plan.base_seed;
  if (report.oracle_value) j["oracle"] = *report.oracle_value;
  if (report.constants) {
    j["constants"] = {{"C0", report.constants->C0}, {"K1", report.constants->K1},
                      {"K2", report.constants->K2}, {"K", report.constants->K},
                      {"L1", report.constants->L1}, {"L2", report.constants->L2},
                      {"L", report.constants->L}};
  }
  j["all_verdicts_pass"] = report.all_verdicts_pass;
  j["violations_A"] = report.total_violations_A;
  j["violations_B"] = report.total_violations_B;
  if (report.rate) {
    j["rate_fit"] = {{"slope", report.rate->slope},
                     {"intercept", report.rate->intercept},
                     {"r2", report.rate->r2}};
  } else {
    j["rate_fit"] = nullptr;
    j["rate_fit_skipped"] = report.rate_fit_skipped;
  }
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& pt : report.points) {
    nlohmann::json q;
    q["N"] = pt.n_modes;
    q["D"] = pt.grid_points;
    q["estimate"] = pt.result.estimate;
    q["std_error"] = pt.result.std_error;
    q["ess"] = pt.result.ess;
    q["reference"] = pt.reference;
    q["abs_error"] = pt.abs_error;
    if (pt.verdict) {
      q["bound"] = {{"name", pt.verdict->bound_name},
                    {"value", pt.verdict->bound_value},
                    {"pass", pt.verdict->pass},
                    {"margin", pt.verdict->margin}};
    }
    if (!pt.failure.empty()) q["error"] = pt.failure;
    pts.push_back(std::move(q));
  }
  // Wall time lives only here; byte-level determinism checks drop this key.
  j["wall_s"] = report.total_wall_s;
  return j.dump(2) + "\n";
}

namespace {

nlohmann::json matrix_to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const nlohmann::json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) throw std::invalid_argument("matrix_from_json: empty");
  const auto c = static_cast<Eigen::Index>(rows.at(0).size());
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
  return m;
}

}  // namespace

std::string loop_to_json(const NormalModeLoop& loop) {
  nlohmann::json j = {{"type", "normal_mode_loop"},
                      {"beta", loop.basis.beta()},
                      {"n_modes", loop.basis.size()},
                      {"xi", matrix_to_json(loop.xi)}};
  return j.dump();
}

NormalModeLoop loop_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("type") != "normal_mode_loop")
    throw std::invalid_argument("loop_from_json: wrong record type");
  NormalModeLoop loop{SpectralBasis(j.at("beta").get<double>(), j.at("n_modes").get<int>()),
                      matrix_from_json(j.at("xi"))};
  if (loop.xi.rows() != loop.basis.size())
    throw std::invalid_argument("loop_from_json: xi rows do not match n_modes");
  return loop;
}

std::string ring_polymer_to_json(const RingPolymer& rp) {
  nlohmann::json j = {{"type", "ring_polymer"},
                      {"beta", rp.beta},
                      {"grid_points", rp.grid_points},
                      {"x", matrix_to_json(rp.x)}};
  return j.dump();
}

RingPolymer ring_polymer_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("type") != "ring_polymer")
    throw std::invalid_argument("ring_polymer_from_json: wrong record type");
  RingPolymer rp{j.at("beta").get<double>(), j.at("grid_points").get<int>(),
                 matrix_from_json(j.at("x"))};
  if (rp.x.rows() != rp.grid_points)
    throw std::invalid_argument("ring_polymer_from_json: x rows do not match grid_points");
  return rp;
}

std::string holder_csv(const HolderTable& table, std::uint64_t config_hash) {
  CsvBuilder csv({"delta", "msd", "sigma", "bound", "config_hash"});
  const std::string hash = hash_hex(config_hash);
  for (const auto& row : table.rows)
    csv.add_row({format_full(row.delta), format_full(row.msd), format_full(row.sigma),
                 format_full(row.bound), hash});
  return csv.str();
}

}  // namespace pir
