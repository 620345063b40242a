#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "doctest.h"
#include "pir/mehler.hpp"
#include "pir/numerics.hpp"
#include "pir/oracle.hpp"
#include "pir/spectral.hpp"

using namespace pir;

namespace {

Vec vec1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

}  // namespace

TEST_CASE("mehler kernel: symmetry and heat-kernel limit") {
  Vec q(2), qt(2);
  q << 0.3, -1.2;
  qt << 1.1, 0.4;
  CHECK(mehler_kernel(q, qt, 1.3, 0.8) == mehler_kernel(qt, q, 1.3, 0.8));

  // a -> 0 recovers the free propagator
  const double k_small_a = mehler_kernel(vec1(0.0), vec1(1.0), 1.0, 1e-6);
  const double k_heat = heat_kernel(vec1(0.0), vec1(1.0), 1.0);
  CHECK(std::abs(k_small_a - k_heat) / k_heat < 1e-5);
  CHECK(k_heat == doctest::Approx(std::exp(-0.5) / std::sqrt(2.0 * M_PI)));

  CHECK_THROWS_AS(mehler_kernel(vec1(0.0), vec1(1.0), 1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(mehler_kernel(q, vec1(0.0), 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("mehler kernel: log form survives large a beta (ground-state limit)") {
  // K(0,0) -> e^{-beta a/2} |psi_0(0)|^2 with |psi_0(0)|^2 = sqrt(a/pi)
  const double lk = log_mehler_kernel(vec1(0.0), vec1(0.0), 500.0, 1.0);
  CHECK(lk == doctest::Approx(-250.0 + 0.5 * std::log(1.0 / M_PI)).epsilon(1e-12));
}

TEST_CASE("mehler kernel: semigroup property by quadrature") {
  const double a = 1.0, b1 = 0.5, b2 = 0.5;
  const auto rule = gauss_legendre_composite(16.0, 256, 8);  // s in [-8, 8]
  for (double endpoint : {0.0, 0.7}) {
    const Vec q = vec1(-0.3), qt = vec1(endpoint);
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const Vec s = vec1(rule.nodes[j] - 8.0);
      acc += rule.weights[j] * mehler_kernel(q, s, b1, a) * mehler_kernel(s, qt, b2, a);
    }
    const double direct = mehler_kernel(q, qt, b1 + b2, a);
    CHECK(std::abs(acc - direct) / direct < 1e-8);
  }
}

TEST_CASE("heat kernel: value, normalization, separability") {
  CHECK(heat_kernel(vec1(0.4), vec1(0.4), 1.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));

  const auto rule = gauss_legendre_composite(20.0, 256, 8);
  double mass = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j)
    mass += rule.weights[j] * heat_kernel(vec1(0.0), vec1(rule.nodes[j] - 10.0), 0.7);
  CHECK(std::abs(mass - 1.0) < 1e-10);

  Vec q2(2), qt2(2);
  q2 << 0.2, -0.5;
  qt2 << 1.0, 0.3;
  const double prod = heat_kernel(vec1(0.2), vec1(1.0), 0.9) *
                      heat_kernel(vec1(-0.5), vec1(0.3), 0.9);
  CHECK(heat_kernel(q2, qt2, 0.9) == doctest::Approx(prod).epsilon(1e-13));
}

TEST_CASE("mehler diagonal marginal has variance coth(a beta/2)/(2a)") {
  const double beta = 2.0, a = 1.0;
  const auto rule = gauss_legendre_composite(16.0, 256, 8);
  double m0 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double q = rule.nodes[j] - 8.0;
    const double k = mehler_kernel(vec1(q), vec1(q), beta, a);
    m0 += rule.weights[j] * k;
    m2 += rule.weights[j] * k * q * q;
  }
  const double expected = coth(0.5 * a * beta) / (2.0 * a);
  CHECK(std::abs(m2 / m0 - expected) < 1e-8);
  // consistent with the loop covariance at tau = 0
  CHECK(expected == doctest::Approx(covariance(beta, a, 0.0, CovarianceMethod::kClosed)));
}

TEST_CASE("grid hamiltonian: symmetric, ground state stable under refinement") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto ham = GridHamiltonian::build(p, 128, 8.0);
  const Mat dense = ham.dense();
  CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-13);

  // Central differences underestimate the kinetic energy, so the ground
  // state converges to 0.5 monotonically from below as the grid refines.
  double prev = -1e9;
  for (int n : {128, 256, 512}) {
    Eigen::SelfAdjointEigenSolver<Mat> es(GridHamiltonian::build(p, n, 8.0).dense());
    const double e0 = es.eigenvalues()(0);
    CHECK(e0 > prev - 1e-12);
    CHECK(e0 < 0.5);
    prev = e0;
  }
  CHECK(prev == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("exact_thermal_average: harmonic <q^2> at beta = 2 is coth(1)/2") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto o = make_observable("coord_sq", 1, 1.0);
  const auto ref = exact_thermal_average(p, o, 2.0, 1024, 8.0, 1e-5);
  CHECK(std::abs(ref.value - coth(1.0) / 2.0) < 1e-6);
  CHECK(ref.trusted);
  CHECK(ref.richardson_drift < 1e-5);
  CHECK(ref.boundary_mass < 1e-10);
}

TEST_CASE("exact_thermal_average: trivial observables") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto one = make_observable("one", 1, 1.0);
  CHECK(std::abs(exact_thermal_average(p, one, 1.7, 512, 8.0).value - 1.0) < 1e-12);
  const auto odd = make_observable("coord", 1, 1.0);
  CHECK(std::abs(exact_thermal_average(p, odd, 1.3, 512, 8.0).value) < 1e-9);
}

TEST_CASE("oracle agrees with the mehler diagonal for V = a^2 q^2 / 2") {
  const double a = 1.0, beta = 1.5;
  const auto p = make_potential("harmonic", 1, a, 1.0, {{"omega", a}});
  const auto o = make_observable("tanh_sq", 1, 1.0);
  const auto ref = exact_thermal_average(p, o, beta, 1024, 8.0);

  const auto rule = gauss_legendre_composite(16.0, 256, 8);
  double m0 = 0.0, mo = 0.0;
  Vec q1(1);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    q1[0] = rule.nodes[j] - 8.0;
    const double k = mehler_kernel(q1, q1, beta, a);
    m0 += rule.weights[j] * k;
    mo += rule.weights[j] * k * o.eval(q1);
  }
  CHECK(std::abs(ref.value - mo / m0) < 1e-6);
}

TEST_CASE("oracle error paths carry diagnostics") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto o = make_observable("coord_sq", 1, 1.0);
  // Boundary mass: box too small for the beta = 2 thermal state.
  CHECK_THROWS_AS(exact_thermal_average(p, o, 2.0, 512, 1.5), OracleError);
  // Resolution too coarse for a 1e-9 drift demand.
  try {
    exact_thermal_average(p, o, 2.0, 64, 8.0, 1e-9);
    FAIL("expected OracleError");
  } catch (const OracleError& e) {
    CHECK(e.drift() > 1e-9);
  }
}

TEST_CASE("trotter_trace: identity observable and large-D limit") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto one = make_observable("one", 1, 1.0);
  CHECK(trotter_trace(p, one, 2.0, 16, 256, 8.0) == 1.0);

  const auto o = make_observable("coord_sq", 1, 1.0);
  const auto ref = exact_thermal_average(p, o, 2.0, 1024, 8.0);
  const double t1024 = trotter_trace(p, o, 2.0, 1024, 512, 8.0);
  CHECK(std::abs(t1024 - ref.value) < 1e-3);

  // error shrinks with D (coarse smoke check; the acceptance suite sweeps)
  const double e8 = std::abs(trotter_trace(p, o, 2.0, 8, 512, 8.0) - ref.value);
  const double e64 = std::abs(trotter_trace(p, o, 2.0, 64, 512, 8.0) - ref.value);
  CHECK(e64 < e8);
}

TEST_CASE("trotter_trace converges within 1e-3 for every compliant potential and beta") {
  const auto o = make_observable("coord_sq", 1, 1.0);
  const std::map<std::string, double> bump = {{"omega", 1.0}, {"bump_c", 0.2}, {"bump_k", 2.0}};
  for (const char* name : {"harmonic", "bumped_harmonic"}) {
    const auto p = make_potential(name, 1, 1.0, 1.0, bump);
    for (double beta : {1.0, 2.0}) {
      const auto ref = exact_thermal_average(p, o, beta, 1024, 8.0);
      CHECK(std::abs(trotter_trace(p, o, beta, 512, 512, 8.0) - ref.value) < 1e-3);
    }
  }
}

TEST_CASE("oracle cache: computes once, then serves the stored record") {
  const auto p = make_potential("harmonic", 1, 1.0, 1.0);
  const auto o = make_observable("coord_sq", 1, 1.0);
  const auto dir = std::filesystem::temp_directory_path() / "pir_oracle_cache_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "cache.json").string();

  OracleCache cache(path);
  const auto first = cache.get_or_compute(p, o, 2.0, 256, 8.0, 1e-3);
  CHECK(std::filesystem::exists(path));
  const auto second = cache.get_or_compute(p, o, 2.0, 256, 8.0, 1e-3);
  CHECK(first.value == second.value);
  CHECK(first.richardson_drift == second.richardson_drift);
  std::filesystem::remove_all(dir);
}
