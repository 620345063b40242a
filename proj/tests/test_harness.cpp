#include <cmath>
#include <stdexcept>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pir/harness.hpp"
#include "pir/oracle.hpp"
#include "pir/io.hpp"

using namespace pir;

namespace {

SweepPlan small_cl_plan() {
  SweepPlan plan;
  plan.mode = SweepMode::kCl;
  plan.potential = "bumped_harmonic";
  plan.potential_params = {{"omega", 1.0}, {"bump_c", 0.2}, {"bump_k", 2.0}};
  plan.observable = "tanh_sq";
  plan.beta = 1.0;
  plan.a = 1.0;
  plan.M1 = 0.4;
  plan.M2 = 1.0;
  plan.n_list = {2, 4, 8, 16};
  plan.samples = 4000;
  plan.base_seed = 9;
  plan.oracle_n_grid = 512;
  plan.oracle_extent = 8.0;
  plan.oracle_tol = 1e-5;
  return plan;
}

}  // namespace

TEST_CASE("cl sweep: verdicts pass, rate fitted, report well-formed") {
  const auto report = run_sweep(small_cl_plan());
  REQUIRE(report.points.size() == 4);
  CHECK(report.all_verdicts_pass);
  CHECK(report.oracle_value.has_value());
  CHECK(report.rate.has_value());
  CHECK(report.total_violations_A == 0);
  CHECK(report.total_violations_B == 0);
  for (const auto& pt : report.points) {
    CHECK(pt.failure.empty());
    REQUIRE(pt.verdict.has_value());
    CHECK(pt.verdict->pass);
    CHECK(pt.verdict->bound_name == "K/sqrt(N)");
    CHECK(pt.result.ess > 0.0);
  }
}

TEST_CASE("degenerate single-point sweep skips the rate fit and is flagged") {
  auto plan = small_cl_plan();
  plan.n_list = {8};
  const auto report = run_sweep(plan);
  CHECK(report.points.size() == 1);
  CHECK_FALSE(report.rate.has_value());
  CHECK(report.rate_fit_skipped);
}

TEST_CASE("deliberately shrunken bounds flip verdicts to fail") {
  auto plan = small_cl_plan();
  // enough samples that the N = 2 truncation error is resolved above the
  // 3 sigma allowance, so a near-zero bound must fail
  plan.n_list = {2};
  plan.samples = 200000;
  plan.debug_bound_scale = 1e-9;
  const auto report = run_sweep(plan);
  CHECK_FALSE(report.all_verdicts_pass);
}

TEST_CASE("discretization sweep compares the paired estimators") {
  auto plan = small_cl_plan();
  plan.mode = SweepMode::kClDiscretization;
  plan.n_list.clear();
  plan.d_list = {4, 8, 16, 32};
  plan.n_fixed = 16;
  const auto report = run_sweep(plan);
  REQUIRE(report.points.size() == 4);
  CHECK_FALSE(report.oracle_value.has_value());
  for (const auto& pt : report.points) {
    REQUIRE(pt.verdict.has_value());
    CHECK(pt.verdict->pass);
    CHECK(pt.verdict->bound_name == "L/sqrt(D)");
    CHECK(pt.abs_error < 1.0);  // reference column holds the companion estimate
  }
}

TEST_CASE("combined sweep covers the (N, D) grid with the corollary bound") {
  auto plan = small_cl_plan();
  plan.mode = SweepMode::kCombined;
  plan.n_list = {4, 16};
  plan.d_list = {4, 16};
  const auto report = run_sweep(plan);
  REQUIRE(report.points.size() == 4);
  CHECK(report.rate_fit_skipped);
  for (const auto& pt : report.points) {
    REQUIRE(pt.verdict.has_value());
    CHECK(pt.verdict->bound_name == "combined");
    CHECK(pt.verdict->pass);
  }
}

TEST_CASE("std sweep: errors decrease with D up to the noise allowance") {
  SweepPlan plan;
  plan.mode = SweepMode::kStd;
  plan.potential = "harmonic";
  plan.potential_params = {{"omega", 1.0}};
  plan.observable = "coord_sq";
  plan.beta = 2.0;
  plan.a = 1.0;
  plan.M1 = 1.0;
  plan.M2 = 1.0;
  plan.d_list = {4, 8, 16, 32, 64};
  plan.samples = 1000000;
  plan.base_seed = 2;
  plan.threads = 2;
  plan.oracle_n_grid = 1024;
  plan.oracle_extent = 8.0;
  const auto report = run_sweep(plan);
  REQUIRE(report.points.size() == 5);
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    const auto& prev = report.points[i - 1];
    const auto& cur = report.points[i];
    REQUIRE(prev.failure.empty());
    CHECK(cur.abs_error <=
          prev.abs_error + 3.0 * (prev.error_sigma + cur.error_sigma));
  }
  // Beyond the noise-tolerant decay, each point must agree with the exact
  // per-D ring-polymer value (the trotter trace): the chain is unbiased even
  // where its noise exceeds the shrinking discretization gap.
  const auto p = make_potential("harmonic", 1, 1.0, 1.0, {{"omega", 1.0}});
  const auto o = make_observable("coord_sq", 1, 1.0);
  for (const auto& pt : report.points) {
    const double per_d = trotter_trace(p, o, plan.beta, pt.grid_points, 512, 8.0);
    CHECK(std::abs(pt.result.estimate - per_d) <= 3.0 * pt.result.std_error);
  }
}

TEST_CASE("std sweep runs against the oracle without bound verdicts") {
  auto plan = small_cl_plan();
  plan.mode = SweepMode::kStd;
  plan.n_list.clear();
  plan.d_list = {4, 8};
  plan.samples = 20000;
  const auto report = run_sweep(plan);
  REQUIRE(report.points.size() == 2);
  for (const auto& pt : report.points) {
    CHECK(pt.failure.empty());
    CHECK_FALSE(pt.verdict.has_value());
    CHECK(pt.abs_error < 0.5);
  }
}

TEST_CASE("plan validation") {
  auto plan = small_cl_plan();
  plan.samples = 100;
  CHECK_THROWS_AS(run_sweep(plan), std::invalid_argument);

  plan = small_cl_plan();
  plan.n_list = {4, 4};
  CHECK_THROWS_AS(run_sweep(plan), std::invalid_argument);

  plan = small_cl_plan();
  plan.n_list.clear();
  CHECK_THROWS_AS(run_sweep(plan), std::invalid_argument);

  plan = small_cl_plan();
  plan.dim = 2;  // oracle-referenced sweep needs d = 1
  CHECK_THROWS_AS(run_sweep(plan), std::invalid_argument);
}

TEST_CASE("report CSV: fixed schema, deterministic bytes across thread counts") {
  auto plan = small_cl_plan();
  plan.threads = 1;
  const auto r1 = run_sweep(plan);
  plan.threads = 2;
  const auto r2 = run_sweep(plan);
  const std::string csv1 = report_csv(r1, 0xabcdef);
  const std::string csv2 = report_csv(r2, 0xabcdef);
  CHECK(csv1 == csv2);

  std::istringstream in(csv1);
  std::string header;
  std::getline(in, header);
  std::string expect;
  for (std::size_t i = 0; i < kReportCsvHeader.size(); ++i) {
    if (i) expect += ',';
    expect += kReportCsvHeader[i];
  }
  CHECK(header == expect);
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);
  CHECK(csv1.find(hash_hex(0xabcdef)) != std::string::npos);

  // JSON: parseable, wall time isolated under its own key
  auto j1 = nlohmann::json::parse(report_json(r1, 0xabcdef));
  auto j2 = nlohmann::json::parse(report_json(r2, 0xabcdef));
  CHECK(j1.contains("wall_s"));
  j1.erase("wall_s");
  j2.erase("wall_s");
  CHECK(j1 == j2);
}

TEST_CASE("loop and ring-polymer records round-trip through JSON") {
  const CounterStream s(81, 0);
  const auto loop = sample_nu(SpectralBasis(1.7, 12), 2, 0.9, s, 0);
  const auto back = loop_from_json(loop_to_json(loop));
  CHECK(back.basis.beta() == loop.basis.beta());
  CHECK(back.xi == loop.xi);

  RingPolymer rp{1.7, 5, Mat::Random(5, 2)};
  const auto rp_back = ring_polymer_from_json(ring_polymer_to_json(rp));
  CHECK(rp_back.grid_points == 5);
  CHECK(rp_back.x == rp.x);

  CHECK_THROWS_AS(loop_from_json(ring_polymer_to_json(rp)), std::invalid_argument);
}

TEST_CASE("holder_scan: bound rows, unit slope, exact zero row") {
  std::vector<double> deltas;
  for (int j = 2; j <= 9; ++j) deltas.push_back(2.0 * std::pow(2.0, -j));
  deltas.push_back(0.0);
  const auto table = holder_scan(2.0, 1.0, 1, 256, 20000, deltas, 71, 2);
  REQUIRE(table.rows.size() == deltas.size());
  for (const auto& row : table.rows) {
    if (row.delta == 0.0) {
      CHECK(row.msd == 0.0);
      CHECK(row.sigma == 0.0);
    } else {
      CHECK(row.msd <= row.bound + 3.0 * row.sigma);
    }
  }
  REQUIRE(table.slope.has_value());
  CHECK(table.slope->slope >= 0.9);
  CHECK(table.slope->slope <= 1.1);

  CHECK_THROWS_AS(holder_scan(2.0, 1.0, 1, 16, 1000, {0.1, 0.2}, 1), std::invalid_argument);
  CHECK_THROWS_AS(holder_scan(2.0, 1.0, 1, 16, 1000, {-0.1}, 1), std::invalid_argument);
}
