#include "pir/estimators.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

#include "pir/numerics.hpp"

namespace pir {

std::string to_string(Representation r) {
  switch (r) {
    case Representation::kStd: return "std";
    case Representation::kClTruncated: return "cl";
    case Representation::kClDiscretized: return "cl-disc";
  }
  return "?";
}

double std_energy(const RingPolymer& rp, const PotentialSpec& p) {
  if (rp.dim() != p.dim) throw std::invalid_argument("std_energy: dimension mismatch");
  const int D = rp.grid_points;
  const double beta_D = rp.beta_D();
  double spring = 0.0, pot = 0.0;
  for (int j = 0; j < D; ++j) {
    const int jn = (j + 1) % D;
    spring += (rp.x.row(j) - rp.x.row(jn)).squaredNorm();
    pot += p.eval(rp.x.row(j).transpose());
  }
  return spring / (2.0 * beta_D) + beta_D * pot;
}

void std_energy_grad(const RingPolymer& rp, const PotentialSpec& p, Mat& grad) {
  const int D = rp.grid_points;
  const double beta_D = rp.beta_D();
  grad.resize(D, rp.dim());
  Vec g(rp.dim());
  for (int j = 0; j < D; ++j) {
    const int jp = (j + D - 1) % D;
    const int jn = (j + 1) % D;
    p.grad(rp.x.row(j).transpose(), g);
    grad.row(j) =
        (2.0 * rp.x.row(j) - rp.x.row(jp) - rp.x.row(jn)) / beta_D + beta_D * g.transpose();
  }
}

double std_energy_normal_mode(const RingPolymer& rp, const PotentialSpec& p) {
  const int D = rp.grid_points;
  const double beta_D = rp.beta_D();
  const NormalModeLoop loop = grid_to_modes(rp, D);
  double quad = 0.0;
  for (int k = 0; k < D; ++k) {
    const double w = omega_grid(k, D, rp.beta);
    quad += 0.5 * (w * w + p.a * p.a) * loop.xi.row(k).squaredNorm();
  }
  double pot = 0.0;
  for (int j = 0; j < D; ++j) pot += va_eval(p, rp.x.row(j).transpose());
  return quad + beta_D * pot;
}

namespace {

double integral_va_on_rule(const NormalModeLoop& loop, const PotentialSpec& p,
                           const QuadratureRule& rule) {
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j)
    acc += rule.weights[j] * va_eval(p, loop.value(rule.nodes[j]));
  return acc;
}

QuadratureRule va_rule(double beta, int n_quad) {
  const int panels = std::max(1, (n_quad + 9) / 10);
  return gauss_legendre_composite(beta, panels, 10);
}

int auto_n_quad(int n_modes, int requested) {
  if (requested > 0) return requested;
  return std::max(16, 4 * n_modes);
}

}  // namespace

double quadrature_va(const NormalModeLoop& loop, const PotentialSpec& p, int n_quad) {
  if (n_quad < 4 * loop.basis.size())
    throw std::invalid_argument("quadrature_va: n_quad must be >= 4 N");
  return integral_va_on_rule(loop, p, va_rule(loop.basis.beta(), n_quad));
}

double riemann_va(const NormalModeLoop& loop, const PotentialSpec& p, int grid_points) {
  if (grid_points < 1) throw std::invalid_argument("riemann_va: D must be >= 1");
  return integral_va_on_rule(loop, p, riemann_left(loop.basis.beta(), grid_points));
}

namespace {

// ---------------------------------------------------------------------------
// Shared engine for the CL estimators: i.i.d. Gaussian loop draws, one or two
// (rule, mode-count) variants evaluated per draw on common random numbers.
// ---------------------------------------------------------------------------

struct CLVariant {
  QuadratureRule rule;
  int n_modes = 0;
  Mat basis_at_nodes;  // n_modes x m
  std::vector<double> logw;
  std::vector<double> payload;  // loop average of O on the rule
};

void run_cl_engine(const PotentialSpec& p, const ObservableSpec& o, double beta,
                   int n_draw_modes, long n_samples, const CounterStream& stream, int threads,
                   std::vector<CLVariant*> variants) {
  if (p.dim != o.dim) throw std::invalid_argument("cl estimator: dimension mismatch");
  const int d = p.dim;
  const double a = p.a;
  const SpectralBasis draw_basis(beta, n_draw_modes);
  std::vector<double> mode_scale(static_cast<std::size_t>(n_draw_modes));
  for (int k = 0; k < n_draw_modes; ++k) {
    const double w = draw_basis.omega(k);
    mode_scale[static_cast<std::size_t>(k)] = 1.0 / std::sqrt(w * w + a * a);
  }
  std::vector<double> weight_sum(variants.size(), 0.0);
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    CLVariant* v = variants[vi];
    v->basis_at_nodes = SpectralBasis(beta, v->n_modes).eval_matrix(v->rule.nodes);
    v->logw.assign(static_cast<std::size_t>(n_samples), 0.0);
    v->payload.assign(static_cast<std::size_t>(n_samples), 0.0);
    // Normalizing the loop average by the summed weights (== beta up to
    // rounding) makes a constant observable reproduce exactly.
    for (double w : v->rule.weights) weight_sum[vi] += w;
  }

  constexpr long kBlock = 1024;
  const long n_blocks = (n_samples + kBlock - 1) / kBlock;
  std::atomic<long> next_block{0};
  std::exception_ptr worker_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    try {
      std::vector<Mat> xi_by_dim(static_cast<std::size_t>(d));
      std::vector<Mat> values(static_cast<std::size_t>(d));
      std::vector<double> gauss(static_cast<std::size_t>(n_draw_modes) * d);
      Vec q(d);
      for (;;) {
        const long block = next_block.fetch_add(1);
        if (block >= n_blocks) break;
        const long lo = block * kBlock;
        const long hi = std::min(n_samples, lo + kBlock);
        const long bs = hi - lo;
        for (int t = 0; t < d; ++t) xi_by_dim[static_cast<std::size_t>(t)].resize(bs, n_draw_modes);
        for (long b = 0; b < bs; ++b) {
          stream.fill_gaussians(static_cast<std::uint64_t>(lo + b), gauss);
          for (int k = 0; k < n_draw_modes; ++k)
            for (int t = 0; t < d; ++t)
              xi_by_dim[static_cast<std::size_t>(t)](b, k) =
                  mode_scale[static_cast<std::size_t>(k)] *
                  gauss[static_cast<std::size_t>(k) * d + t];
        }
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
          CLVariant* v = variants[vi];
          const auto m = static_cast<Eigen::Index>(v->rule.nodes.size());
          for (int t = 0; t < d; ++t)
            values[static_cast<std::size_t>(t)].noalias() =
                xi_by_dim[static_cast<std::size_t>(t)].leftCols(v->n_modes) * v->basis_at_nodes;
          for (long b = 0; b < bs; ++b) {
            double va_acc = 0.0, obs_acc = 0.0;
            for (Eigen::Index j = 0; j < m; ++j) {
              for (int t = 0; t < d; ++t) q[t] = values[static_cast<std::size_t>(t)](b, j);
              const double wq = v->rule.weights[static_cast<std::size_t>(j)];
              va_acc += wq * (p.eval(q) - 0.5 * a * a * q.squaredNorm());
              obs_acc += wq * o.eval(q);
            }
            v->logw[static_cast<std::size_t>(lo + b)] = -va_acc;
            v->payload[static_cast<std::size_t>(lo + b)] = obs_acc / weight_sum[vi];
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!worker_error) worker_error = std::current_exception();
    }
  };

  const int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (worker_error) std::rethrow_exception(worker_error);
}

struct ReducedCL {
  double estimate = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  double log_sum_w = 0.0;
  ABStatistics ab;
};

ReducedCL reduce_cl(const std::vector<double>& logw, const std::vector<double>& payload,
                    double beta, double m1, double m2) {
  const std::size_t n = logw.size();
  ReducedCL out;
  out.log_sum_w = log_sum_exp(logw);
  if (!std::isfinite(out.log_sum_w))
    throw EstimatorError("cl estimator: all importance weights underflowed");

  // Self-normalized ratio as (sum wn B)/(sum wn) so a constant payload is
  // reproduced exactly.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wn = std::exp(logw[i] - out.log_sum_w);
    num += wn * payload[i];
    den += wn;
  }
  out.estimate = num / den;

  double var_acc = 0.0, sq_acc = 0.0;
  const double log_a_bound = beta * m1 + 1e-12 * std::max(1.0, beta * m1);
  const double b_bound = m2 * (1.0 + 1e-12);
  double sum_b = 0.0, sum_ab = 0.0;
  out.ab.log_weight_min = logw[0];
  out.ab.log_weight_max = logw[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double wn = std::exp(logw[i] - out.log_sum_w) / den;
    const double dev = payload[i] - out.estimate;
    var_acc += wn * wn * dev * dev;
    const double w2 = std::exp(2.0 * (logw[i] - out.log_sum_w));
    sq_acc += w2;
    const double A = std::exp(logw[i]);
    sum_b += payload[i];
    sum_ab += A * payload[i];
    out.ab.max_A = std::max(out.ab.max_A, A);
    out.ab.max_abs_B = std::max(out.ab.max_abs_B, std::abs(payload[i]));
    out.ab.log_weight_min = std::min(out.ab.log_weight_min, logw[i]);
    out.ab.log_weight_max = std::max(out.ab.log_weight_max, logw[i]);
    if (logw[i] > log_a_bound) ++out.ab.violations_A;
    if (std::abs(payload[i]) > b_bound) ++out.ab.violations_B;
  }
  out.std_error = std::sqrt(var_acc);
  out.ess = 1.0 / sq_acc;  // (sum w)^2 / sum w^2
  out.ess = std::min(out.ess, static_cast<double>(n));
  out.ab.mean_A = std::exp(out.log_sum_w - std::log(static_cast<double>(n)));
  out.ab.mean_B = sum_b / static_cast<double>(n);
  out.ab.mean_AB = sum_ab / static_cast<double>(n);
  return out;
}

CLEstimate finish_cl(Representation rep, CLVariant& v, const PotentialSpec& p,
                     const ObservableSpec& o, double beta, const CLOptions& opts,
                     int n_modes, int grid_points, double wall_s) {
  const ReducedCL red = reduce_cl(v.logw, v.payload, beta, p.M1, o.M2);
  CLEstimate est;
  if (opts.keep_log_weights) est.log_weights = std::move(v.logw);
  est.result.representation = rep;
  est.result.estimate = red.estimate;
  est.result.std_error = red.std_error;
  est.result.n_samples = opts.n_samples;
  est.result.ess = red.ess;
  est.result.ess_warning =
      red.ess < opts.ess_floor_fraction * static_cast<double>(opts.n_samples);
  est.result.seed = opts.seed;
  est.result.n_modes = n_modes;
  est.result.grid_points = grid_points;
  est.result.wall_time_s = wall_s;
  est.ab = red.ab;
  return est;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

CLEstimate estimate_cl_truncated(const PotentialSpec& p, const ObservableSpec& o, double beta,
                                 int n_modes, const CLOptions& opts) {
  if (opts.n_samples < 2) throw std::invalid_argument("estimate_cl_truncated: need n_samples >= 2");
  const auto t0 = std::chrono::steady_clock::now();
  const int n_quad = auto_n_quad(n_modes, opts.n_quad);
  if (n_quad < 4 * n_modes)
    throw std::invalid_argument("estimate_cl_truncated: n_quad must be >= 4 N");
  CLVariant v;
  v.rule = va_rule(beta, n_quad);
  v.n_modes = n_modes;
  CounterStream stream(opts.seed, opts.stream_id);
  run_cl_engine(p, o, beta, n_modes, opts.n_samples, stream, opts.threads, {&v});
  return finish_cl(Representation::kClTruncated, v, p, o, beta, opts, n_modes, 0,
                   seconds_since(t0));
}

CLEstimate estimate_cl_discretized(const PotentialSpec& p, const ObservableSpec& o, double beta,
                                   int n_modes, int grid_points, const CLOptions& opts) {
  if (opts.n_samples < 2)
    throw std::invalid_argument("estimate_cl_discretized: need n_samples >= 2");
  if (grid_points < 1) throw std::invalid_argument("estimate_cl_discretized: D must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  CLVariant v;
  v.rule = riemann_left(beta, grid_points);
  v.n_modes = n_modes;
  CounterStream stream(opts.seed, opts.stream_id);
  run_cl_engine(p, o, beta, n_modes, opts.n_samples, stream, opts.threads, {&v});
  return finish_cl(Representation::kClDiscretized, v, p, o, beta, opts, n_modes, grid_points,
                   seconds_since(t0));
}

namespace {

PairedComparison paired_from_variants(const CLVariant& va, const CLVariant& vb,
                                      const PotentialSpec& p, const ObservableSpec& o,
                                      double beta, long n) {
  const ReducedCL ra = reduce_cl(va.logw, va.payload, beta, p.M1, o.M2);
  const ReducedCL rb = reduce_cl(vb.logw, vb.payload, beta, p.M1, o.M2);
  PairedComparison out;
  out.n_samples = n;
  out.estimate_a = ra.estimate;
  out.estimate_b = rb.estimate;
  out.diff = ra.estimate - rb.estimate;
  out.ab_a = ra.ab;
  out.ab_b = rb.ab;

  // Influence-function std error for the difference of the two
  // self-normalized ratios, plus first moments of |dA|, |dB|, |d(AB)|.
  const double nn = static_cast<double>(n);
  double psi_sq = 0.0;
  double s_da = 0.0, s_da2 = 0.0, s_db = 0.0, s_db2 = 0.0, s_dab = 0.0, s_dab2 = 0.0;
  for (long i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double A1 = std::exp(va.logw[u]);
    const double A2 = std::exp(vb.logw[u]);
    const double B1 = va.payload[u];
    const double B2 = vb.payload[u];
    const double psi = A1 * (B1 - ra.estimate) / ra.ab.mean_A -
                       A2 * (B2 - rb.estimate) / rb.ab.mean_A;
    psi_sq += psi * psi;
    const double da = std::abs(A1 - A2);
    const double db = std::abs(B1 - B2);
    const double dab = std::abs(A1 * B1 - A2 * B2);
    s_da += da;
    s_da2 += da * da;
    s_db += db;
    s_db2 += db * db;
    s_dab += dab;
    s_dab2 += dab * dab;
  }
  out.diff_sigma = std::sqrt(psi_sq) / nn;
  auto moment = [nn](double s, double s2, double& mean, double& sigma) {
    mean = s / nn;
    const double var = std::max(0.0, s2 / nn - mean * mean);
    sigma = std::sqrt(var / nn);
  };
  moment(s_da, s_da2, out.mean_abs_dA, out.sigma_dA);
  moment(s_db, s_db2, out.mean_abs_dB, out.sigma_dB);
  moment(s_dab, s_dab2, out.mean_abs_dAB, out.sigma_dAB);
  return out;
}

}  // namespace

PairedComparison compare_cl_truncated_vs_discretized(const PotentialSpec& p,
                                                     const ObservableSpec& o, double beta,
                                                     int n_modes, int grid_points,
                                                     const CLOptions& opts) {
  CLVariant trunc, disc;
  trunc.rule = va_rule(beta, auto_n_quad(n_modes, opts.n_quad));
  trunc.n_modes = n_modes;
  disc.rule = riemann_left(beta, grid_points);
  disc.n_modes = n_modes;
  CounterStream stream(opts.seed, opts.stream_id);
  run_cl_engine(p, o, beta, n_modes, opts.n_samples, stream, opts.threads, {&trunc, &disc});
  return paired_from_variants(trunc, disc, p, o, beta, opts.n_samples);
}

PairedComparison compare_truncation_levels(const PotentialSpec& p, const ObservableSpec& o,
                                           double beta, int n_modes, int n_modes_ref,
                                           const CLOptions& opts) {
  if (n_modes >= n_modes_ref)
    throw std::invalid_argument("compare_truncation_levels: need n_modes < n_modes_ref");
  CLVariant small, ref;
  const QuadratureRule fine = va_rule(beta, auto_n_quad(n_modes_ref, opts.n_quad));
  small.rule = fine;
  small.n_modes = n_modes;
  ref.rule = fine;
  ref.n_modes = n_modes_ref;
  CounterStream stream(opts.seed, opts.stream_id);
  run_cl_engine(p, o, beta, n_modes_ref, opts.n_samples, stream, opts.threads, {&small, &ref});
  // a = truncated (N), b = reference (high N).
  return paired_from_variants(small, ref, p, o, beta, opts.n_samples);
}

// ---------------------------------------------------------------------------
// std-PIR: overdamped Langevin (optionally Metropolis-adjusted) on the
// ring-polymer energy.
// ---------------------------------------------------------------------------

namespace {

struct ChainOutput {
  double mean = 0.0;
  double std_error = 0.0;
  double sample_var = 0.0;
  long n_recorded = 0;
};

ChainOutput run_chain(const PotentialSpec& p, const ObservableSpec& o, double beta,
                      int grid_points, const StdSamplerOptions& opts, std::uint64_t chain_id) {
  const int D = grid_points;
  const int d = p.dim;
  const double beta_D = beta / D;
  const double h = opts.step_h > 0.0 ? opts.step_h : beta_D / 10.0;
  const std::size_t n_noise = static_cast<std::size_t>(D) * d;
  const std::uint64_t accept_block = (n_noise + 1) / 2;

  CounterStream stream(opts.seed, opts.chain_id0 + chain_id);
  RingPolymer rp{beta, D, Mat::Zero(D, d)};
  RingPolymer prop{beta, D, Mat::Zero(D, d)};
  Mat grad, prop_grad;
  double energy = std_energy(rp, p);
  std_energy_grad(rp, p, grad);

  const long burn = static_cast<long>(opts.burn_in_fraction * static_cast<double>(opts.n_steps));
  std::vector<double> recorded;
  recorded.reserve(static_cast<std::size_t>(std::max<long>(0, opts.n_steps - burn)));
  std::vector<double> noise(n_noise);
  Vec q1(d);

  for (long step = 0; step < opts.n_steps; ++step) {
    stream.fill_gaussians(static_cast<std::uint64_t>(step), noise);
    for (int j = 0; j < D; ++j)
      for (int t = 0; t < d; ++t)
        prop.x(j, t) = rp.x(j, t) - h * grad(j, t) +
                       std::sqrt(2.0 * h) * noise[static_cast<std::size_t>(j) * d + t];

    const double prop_energy = std_energy(prop, p);
    bool accept = true;
    if (opts.metropolis) {
      std_energy_grad(prop, p, prop_grad);
      const double fwd = (prop.x - rp.x + h * grad).squaredNorm();
      const double bwd = (rp.x - prop.x + h * prop_grad).squaredNorm();
      const double log_alpha = (energy - prop_energy) + (fwd - bwd) / (4.0 * h);
      const double u = stream.uniform(static_cast<std::uint64_t>(step), accept_block);
      accept = std::log(u) < log_alpha;
      if (accept) {
        rp.x.swap(prop.x);
        grad.swap(prop_grad);
        energy = prop_energy;
      }
    } else {
      rp.x.swap(prop.x);
      energy = prop_energy;
      std_energy_grad(rp, p, grad);
    }

    if (!std::isfinite(energy) || energy > opts.energy_threshold)
      throw SamplerError("sample_std: chain diverged (energy " + std::to_string(energy) +
                         " at step " + std::to_string(step) + "; reduce step_h)");

    if (step >= burn) {
      double obs = 0.0;
      for (int j = 0; j < D; ++j) obs += o.eval(rp.x.row(j).transpose());
      recorded.push_back(obs / D);
    }
  }

  ChainOutput out;
  out.n_recorded = static_cast<long>(recorded.size());
  if (recorded.empty()) throw SamplerError("sample_std: no samples after burn-in");
  double mean = 0.0;
  for (double v : recorded) mean += v;
  mean /= static_cast<double>(recorded.size());
  out.mean = mean;
  double var = 0.0;
  for (double v : recorded) var += (v - mean) * (v - mean);
  out.sample_var = recorded.size() > 1 ? var / static_cast<double>(recorded.size() - 1) : 0.0;

  // Batch means absorb autocorrelation into the error bar.
  const long n_batches = std::min<long>(64, out.n_recorded);
  if (n_batches >= 2) {
    const long per = out.n_recorded / n_batches;
    std::vector<double> bm;
    bm.reserve(static_cast<std::size_t>(n_batches));
    for (long b = 0; b < n_batches; ++b) {
      double s = 0.0;
      for (long i = b * per; i < (b + 1) * per; ++i) s += recorded[static_cast<std::size_t>(i)];
      bm.push_back(s / static_cast<double>(per));
    }
    double bmean = 0.0;
    for (double v : bm) bmean += v;
    bmean /= static_cast<double>(n_batches);
    double bvar = 0.0;
    for (double v : bm) bvar += (v - bmean) * (v - bmean);
    bvar /= static_cast<double>(n_batches - 1);
    out.std_error = std::sqrt(bvar / static_cast<double>(n_batches));
  }
  return out;
}

}  // namespace

EstimatorResult sample_std(const PotentialSpec& p, const ObservableSpec& o, double beta,
                           int grid_points, const StdSamplerOptions& opts) {
  if (grid_points < 2) throw std::invalid_argument("sample_std: need D >= 2");
  if (p.dim != o.dim) throw std::invalid_argument("sample_std: dimension mismatch");
  if (opts.n_steps < 10) throw std::invalid_argument("sample_std: n_steps too small");
  const auto t0 = std::chrono::steady_clock::now();

  const int n_chains = std::max(1, opts.n_chains);
  std::vector<ChainOutput> chains(static_cast<std::size_t>(n_chains));
  std::atomic<int> next{0};
  std::exception_ptr chain_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    try {
      for (;;) {
        const int c = next.fetch_add(1);
        if (c >= n_chains) break;
        chains[static_cast<std::size_t>(c)] =
            run_chain(p, o, beta, grid_points, opts, static_cast<std::uint64_t>(c));
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!chain_error) chain_error = std::current_exception();
    }
  };
  const int n_threads = std::clamp(opts.threads, 1, n_chains);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (chain_error) std::rethrow_exception(chain_error);

  EstimatorResult r;
  r.representation = Representation::kStd;
  r.seed = opts.seed;
  r.grid_points = grid_points;
  long total = 0;
  double mean = 0.0;
  for (const auto& c : chains) {
    mean += c.mean;
    total += c.n_recorded;
  }
  mean /= static_cast<double>(n_chains);
  r.estimate = mean;
  r.n_samples = total;
  if (n_chains > 1) {
    double var = 0.0;
    for (const auto& c : chains) var += (c.mean - mean) * (c.mean - mean);
    var /= static_cast<double>(n_chains - 1);
    r.std_error = std::sqrt(var / static_cast<double>(n_chains));
  } else {
    r.std_error = chains[0].std_error;
  }
  double sample_var = 0.0;
  for (const auto& c : chains) sample_var += c.sample_var;
  sample_var /= static_cast<double>(n_chains);
  if (r.std_error > 0.0) {
    r.ess = std::min(static_cast<double>(total), sample_var / (r.std_error * r.std_error));
  } else {
    r.ess = static_cast<double>(total);
  }
  r.wall_time_s = seconds_since(t0);
  return r;
}

}  // namespace pir
