#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "pir/bounds.hpp"
#include "pir/estimators.hpp"
#include "pir/numerics.hpp"
#include "pir/oracle.hpp"

using namespace pir;

namespace {

RingPolymer random_polymer(double beta, int D, int d, std::uint64_t seed) {
  RingPolymer rp{beta, D, Mat(D, d)};
  const CounterStream s(seed, 0);
  std::vector<double> g(static_cast<std::size_t>(D) * d);
  s.fill_gaussians(0, g);
  for (int j = 0; j < D; ++j)
    for (int t = 0; t < d; ++t) rp.x(j, t) = g[static_cast<std::size_t>(j) * d + t];
  return rp;
}

NormalModeLoop random_loop(double beta, int N, int d, double a, std::uint64_t seed) {
  const CounterStream s(seed, 0);
  return sample_nu(SpectralBasis(beta, N), d, a, s, 0);
}

const std::map<std::string, double> kBump = {{"omega", 1.0}, {"bump_c", 0.2}, {"bump_k", 2.0}};

}  // namespace

TEST_CASE("std_energy: constant loop has no spring term") {
  const auto p = make_potential("harmonic", 2, 1.0, 1.0, {{"omega", 1.3}});
  RingPolymer rp{2.0, 8, Mat(8, 2)};
  rp.x.col(0).setConstant(0.7);
  rp.x.col(1).setConstant(-0.2);
  Vec v(2);
  v << 0.7, -0.2;
  CHECK(std_energy(rp, p) == doctest::Approx(2.0 * p.eval(v)).epsilon(1e-14));
}

TEST_CASE("std_energy: two beads, zero potential") {
  const auto p = make_potential("harmonic", 2, 1.0, 1.0, {{"omega", 0.0}});  // V = 0
  RingPolymer rp{2.0, 2, Mat::Zero(2, 2)};
  rp.x(1, 0) = 0.6;
  rp.x(1, 1) = -0.8;
  CHECK(std_energy(rp, p) == doctest::Approx(1.0 / rp.beta_D()).epsilon(1e-14));
}

TEST_CASE("std_energy equals its normal-mode form (corrected grid frequencies)") {
  const auto p = make_potential("bumped_harmonic", 2, 0.8, 1.0, kBump);
  for (int D : {2, 3, 4, 8, 64}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto rp = random_polymer(2.0, D, 2, static_cast<std::uint64_t>(100 * D + rep));
      CHECK(std::abs(std_energy(rp, p) - std_energy_normal_mode(rp, p)) < 1e-10);
    }
  }
}

TEST_CASE("std_energy_grad matches finite differences") {
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 1.0, kBump);
  auto rp = random_polymer(2.0, 6, 1, 42);
  Mat grad;
  std_energy_grad(rp, p, grad);
  const double h = 1e-6;
  for (int j = 0; j < 6; ++j) {
    rp.x(j, 0) += h;
    const double ep = std_energy(rp, p);
    rp.x(j, 0) -= 2.0 * h;
    const double em = std_energy(rp, p);
    rp.x(j, 0) += h;
    CHECK(grad(j, 0) == doctest::Approx((ep - em) / (2.0 * h)).epsilon(1e-5));
  }
}

TEST_CASE("sample_std: constant observable is reproduced exactly") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto o = make_observable("one", 1, 1.0);
  StdSamplerOptions opts;
  opts.n_steps = 2000;
  opts.seed = 3;
  const auto r = sample_std(p, o, 2.0, 8, opts);
  CHECK(r.estimate == 1.0);
  CHECK(r.std_error == 0.0);
  CHECK(r.ess == static_cast<double>(r.n_samples));
}

TEST_CASE("sample_std: harmonic <q^2> matches the trotter trace at the same D") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto o = make_observable("coord_sq", 1, 1.0);
  StdSamplerOptions opts;
  opts.n_steps = 200000;
  opts.seed = 11;
  const auto r = sample_std(p, o, 2.0, 8, opts);
  const double ref = trotter_trace(p, o, 2.0, 8, 512, 8.0);
  CHECK(std::abs(r.estimate - ref) < 3.0 * r.std_error);
  CHECK(r.std_error > 0.0);
  CHECK(r.ess <= static_cast<double>(r.n_samples));
}

TEST_CASE("sample_std: odd observable averages to zero") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto o = make_observable("coord", 1, 1.0);
  StdSamplerOptions opts;
  opts.n_steps = 100000;
  opts.seed = 19;
  const auto r = sample_std(p, o, 2.0, 8, opts);
  CHECK(std::abs(r.estimate) < 3.0 * r.std_error);
}

TEST_CASE("sample_std: halving the step moves the estimate by less than noise") {
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto o = make_observable("tanh_sq", 1, 1.0);
  StdSamplerOptions opts;
  opts.n_steps = 120000;
  opts.seed = 23;
  const auto r1 = sample_std(p, o, 1.0, 16, opts);
  opts.step_h = (1.0 / 16.0) / 20.0;  // half the default beta_D/10
  opts.seed = 24;
  const auto r2 = sample_std(p, o, 1.0, 16, opts);
  const double sigma = std::hypot(r1.std_error, r2.std_error);
  CHECK(std::abs(r1.estimate - r2.estimate) < 3.0 * sigma);
}

TEST_CASE("sample_std: diverging chain raises a sampler error") {
  const auto p = make_potential("quartic", 1, 1.0, 10.0);
  const auto o = make_observable("one", 1, 1.0);
  StdSamplerOptions opts;
  opts.n_steps = 5000;
  opts.step_h = 50.0;  // grossly unstable for Euler-Maruyama
  opts.metropolis = false;
  CHECK_THROWS_AS(sample_std(p, o, 2.0, 8, opts), SamplerError);
}

TEST_CASE("sample_std: bitwise deterministic across chain/thread layouts") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto o = make_observable("coord_sq", 1, 1.0);
  StdSamplerOptions opts;
  opts.n_steps = 20000;
  opts.n_chains = 2;
  opts.seed = 5;
  opts.threads = 1;
  const auto r1 = sample_std(p, o, 2.0, 8, opts);
  opts.threads = 2;
  const auto r2 = sample_std(p, o, 2.0, 8, opts);
  CHECK(r1.estimate == r2.estimate);
  CHECK(r1.std_error == r2.std_error);
  CHECK(r1.ess == r2.ess);
}

TEST_CASE("quadrature_va: exact zeros, constant integrand, refinement") {
  // V = a^2 q^2/2 makes V^a vanish identically
  const auto pz = make_potential("harmonic", 1, 1.0, 1.0, {{"omega", 1.0}});
  const auto loop = random_loop(2.0, 8, 1, 1.0, 7);
  CHECK(quadrature_va(loop, pz, 32) == 0.0);

  // zero loop: integral is beta * V^a(0)
  const auto pb = make_potential("bumped_harmonic", 1, 1.0, 2.0,
                                 {{"omega", 1.0}, {"bump_c", 1.0}, {"bump_k", 1.0}});
  NormalModeLoop zero{SpectralBasis(2.0, 4), Mat::Zero(4, 1)};
  CHECK(quadrature_va(zero, pb, 16) == doctest::Approx(2.0 * 1.0).epsilon(1e-14));

  CHECK_THROWS_AS(quadrature_va(loop, pz, 8 * 4 - 1), std::invalid_argument);

  // doubling the rule changes a smooth integrand by < 1e-9 at N = 32
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto loop32 = random_loop(2.0, 32, 1, 1.0, 9);
  const double q1 = quadrature_va(loop32, p, 128);
  const double q2 = quadrature_va(loop32, p, 256);
  CHECK(std::abs(q1 - q2) < 1e-9);
}

TEST_CASE("riemann_va: constant loop, single cell, decay toward the quadrature value") {
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 2.0,
                                {{"omega", 1.0}, {"bump_c", 1.0}, {"bump_k", 1.0}});
  NormalModeLoop con{SpectralBasis(2.0, 4), Mat::Zero(4, 1)};
  con.xi(0, 0) = 0.9 * std::sqrt(2.0);  // constant loop at 0.9
  Vec v(1);
  v << 0.9;
  for (int D : {1, 3, 16}) CHECK(riemann_va(con, p, D) == doctest::Approx(2.0 * va_eval(p, v)));

  const auto loop = random_loop(2.0, 8, 1, 1.0, 13);
  CHECK(riemann_va(loop, p, 1) == doctest::Approx(2.0 * va_eval(p, loop.value(0.0))));

  // |riemann(D) - quadrature| falls at least like 1/D for smooth loops
  // (in fact geometrically; points at the rounding floor are masked out)
  const auto pk = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto loop32 = random_loop(2.0, 32, 1, 1.0, 13);
  const double ref = quadrature_va(loop32, pk, 512);
  std::vector<double> ds, errs;
  for (int D = 8; D <= 512; D *= 2) {
    const double e = std::abs(riemann_va(loop32, pk, D) - ref);
    if (e > 1e-13) {
      ds.push_back(D);
      errs.push_back(e);
    }
  }
  REQUIRE(ds.size() >= 4);
  CHECK(fit_rate(ds, errs).slope <= -1.0);
}

TEST_CASE("estimate_cl_truncated: unit weights reduce to the plain nu-average") {
  // V = a^2 q^2 / 2: weights are identically one and nu itself is the
  // harmonic thermal loop measure, so the estimator must match the oracle.
  const auto p = make_potential("harmonic", 1, 1.0, 1.0, {{"omega", 1.0}});
  const auto o = make_observable("tanh_sq", 1, 1.0);
  CLOptions opts;
  opts.n_samples = 100000;
  opts.seed = 31;
  const auto est = estimate_cl_truncated(p, o, 2.0, 256, opts);
  CHECK(est.result.ess == doctest::Approx(static_cast<double>(opts.n_samples)));
  CHECK(est.ab.max_A == doctest::Approx(1.0));
  const auto oracle = exact_thermal_average(p, o, 2.0, 1024, 8.0);
  CHECK(std::abs(est.result.estimate - oracle.value) < 3.0 * est.result.std_error);
}

TEST_CASE("estimate_cl_truncated: constant observable handled exactly") {
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto o = make_observable("one", 1, 1.0);
  CLOptions opts;
  opts.n_samples = 5000;
  opts.seed = 37;
  const auto est = estimate_cl_truncated(p, o, 1.0, 16, opts);
  CHECK(est.result.estimate == 1.0);
  CHECK(est.result.std_error == 0.0);
}

TEST_CASE("estimate_cl_truncated: partition lower bound and per-sample invariants") {
  const double beta = 1.0;
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto o = make_observable("tanh_sq", 1, 1.0);
  CLOptions opts;
  opts.n_samples = 20000;
  opts.seed = 41;
  const auto est = estimate_cl_truncated(p, o, beta, 32, opts);

  const auto c = compute_constants(p.M1, o.M2, beta, 1, p.a);
  CHECK(est.ab.mean_A >= std::exp(-1.5 * beta * p.M1 - c.C0 * p.M1));
  CHECK(est.ab.violations_A == 0);
  CHECK(est.ab.violations_B == 0);
  CHECK(est.ab.max_A <= std::exp(beta * p.M1) * (1.0 + 1e-12));
  CHECK(est.ab.max_abs_B <= o.M2 * (1.0 + 1e-12));
}

TEST_CASE("estimate_cl_truncated: per-sample log-weights retained on request") {
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto o = make_observable("tanh_sq", 1, 1.0);
  CLOptions opts;
  opts.n_samples = 500;
  opts.seed = 67;
  opts.keep_log_weights = true;
  const auto est = estimate_cl_truncated(p, o, 1.0, 8, opts);
  REQUIRE(est.log_weights.size() == 500);
  double top = est.log_weights[0];
  for (double lw : est.log_weights) top = std::max(top, lw);
  CHECK(top == est.ab.log_weight_max);
  CHECK(top <= 1.0 * p.M1 + 1e-9);  // beta M1 cap
}

TEST_CASE("estimate_cl_truncated: ESS floor raises the warning flag only") {
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto o = make_observable("tanh_sq", 1, 1.0);
  CLOptions opts;
  opts.n_samples = 2000;
  opts.seed = 43;
  opts.ess_floor_fraction = 1.1;  // unattainable
  const auto est = estimate_cl_truncated(p, o, 1.0, 8, opts);
  CHECK(est.result.ess_warning);
}

TEST_CASE("estimate_cl_truncated: degenerate weights raise an estimator error") {
  // An overflowing potential drives every log-weight to -inf.
  const auto p = make_potential("harmonic", 1, 1e-3, 1.0, {{"omega", 1e200}});
  const auto o = make_observable("one", 1, 1.0);
  CLOptions opts;
  opts.n_samples = 100;
  CHECK_THROWS_AS(estimate_cl_truncated(p, o, 1.0, 4, opts), EstimatorError);
}

TEST_CASE("estimate_cl_discretized: constant observable and shared-draw consistency") {
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto one = make_observable("one", 1, 1.0);
  CLOptions opts;
  opts.n_samples = 5000;
  opts.seed = 47;
  const auto unit = estimate_cl_discretized(p, one, 1.0, 16, 32, opts);
  CHECK(unit.result.estimate == 1.0);

  // cl(N, D = 4096) vs cl(N) on the same stream: discretization error far
  // below the (shared) Monte Carlo noise.
  const auto o = make_observable("tanh_sq", 1, 1.0);
  opts.n_samples = 20000;
  const auto disc = estimate_cl_discretized(p, o, 1.0, 32, 4096, opts);
  const auto trunc = estimate_cl_truncated(p, o, 1.0, 32, opts);
  const double sigma = std::hypot(disc.result.std_error, trunc.result.std_error);
  CHECK(std::abs(disc.result.estimate - trunc.result.estimate) < 3.0 * sigma);
}

TEST_CASE("paired comparison: discretization differences obey the lemma rates") {
  const double beta = 1.0;
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto o = make_observable("tanh_sq", 1, 1.0);
  const auto c = compute_constants(p.M1, o.M2, beta, 1, p.a);

  CLOptions opts;
  opts.n_samples = 20000;
  opts.seed = 53;
  for (int D : {4, 16, 64}) {
    const auto cmp = compare_cl_truncated_vs_discretized(p, o, beta, 16, D, opts);
    const double rd = std::sqrt(static_cast<double>(D));
    CHECK(cmp.mean_abs_dA <= c.L1 / rd + 3.0 * cmp.sigma_dA);
    CHECK(cmp.mean_abs_dB <= c.L2 / rd + 3.0 * cmp.sigma_dB);
    CHECK(std::abs(cmp.diff) <= c.L / rd + 3.0 * cmp.diff_sigma);
    CHECK(cmp.estimate_a == doctest::Approx(cmp.estimate_b).epsilon(0.5));
  }
}

TEST_CASE("paired comparison: truncation differences obey the lemma rates") {
  const double beta = 1.0;
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto o = make_observable("tanh_sq", 1, 1.0);
  const auto c = compute_constants(p.M1, o.M2, beta, 1, p.a);

  CLOptions opts;
  opts.n_samples = 20000;
  opts.seed = 59;
  for (int N : {4, 16}) {
    const auto cmp = compare_truncation_levels(p, o, beta, N, 512, opts);
    const double rn = std::sqrt(static_cast<double>(N));
    CHECK(cmp.mean_abs_dA <= c.K1 / rn + 3.0 * cmp.sigma_dA);
    CHECK(cmp.mean_abs_dB <= c.K2 / rn + 3.0 * cmp.sigma_dB);
    CHECK(std::abs(cmp.diff) <= c.K / rn + 3.0 * cmp.diff_sigma);
  }
  CHECK_THROWS_AS(compare_truncation_levels(p, o, beta, 16, 16, opts), std::invalid_argument);
}

TEST_CASE("cl estimators: bitwise deterministic across thread counts") {
  const auto p = make_potential("bumped_harmonic", 1, 1.0, 0.4, kBump);
  const auto o = make_observable("tanh_sq", 1, 1.0);
  CLOptions opts;
  opts.n_samples = 30000;
  opts.seed = 61;
  opts.threads = 1;
  const auto r1 = estimate_cl_truncated(p, o, 1.0, 16, opts);
  opts.threads = 2;
  const auto r2 = estimate_cl_truncated(p, o, 1.0, 16, opts);
  CHECK(r1.result.estimate == r2.result.estimate);
  CHECK(r1.result.std_error == r2.result.std_error);
  CHECK(r1.result.ess == r2.result.ess);
  CHECK(r1.ab.mean_A == r2.ab.mean_A);
  CHECK(r1.ab.mean_AB == r2.ab.mean_AB);
}
