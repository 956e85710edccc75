#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ilac/error.hpp"
#include "ilac/radio.hpp"
#include "ilac/solver.hpp"
#include "oracles/allocation_oracle.hpp"
#include "oracles/assignment_oracle.hpp"
#include "support.hpp"

using namespace ilac;
using namespace ilac::solver;
using ilac::testing::flat_curves;
using ilac::testing::make_gain_scenario;
using ilac::testing::make_scenario;
using ilac::testing::synthetic_curves;
using ilac::testing::wide_grid;

namespace {

// d r / d b for r = b log2(1 + c / b).
double marginal_rate(double b, double c) {
  const double x = c / b;
  return (std::log1p(x) - x / (1.0 + x)) / std::log(2.0);
}

SolverOptions opts_with(const std::vector<double>& grid) {
  SolverOptions o;
  o.ratio_grid = grid;
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// Options

TEST(SolverOptions, Validation) {
  SolverOptions o;
  EXPECT_NO_THROW(o.validate());
  o.ratio_grid = {2, 4};
  EXPECT_THROW(o.validate(), InvalidArgument);
  o = SolverOptions{};
  o.lambda_tol = 0;
  EXPECT_THROW(o.validate(), InvalidArgument);
  o = SolverOptions{};
  o.bisection_tol = -1;
  EXPECT_THROW(o.validate(), InvalidArgument);
  o = SolverOptions{};
  o.ratio_grid = {1, 3, 2};
  EXPECT_THROW(o.validate(), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Bandwidth allocation

TEST(MinBandwidth, HitsFloorOrReportsInfinity) {
  const double c = 5e7;
  EXPECT_EQ(min_bandwidth(c, 0.0), 0.0);
  const double b = min_bandwidth(c, 2e6);
  EXPECT_NEAR(radio::rate_from_snr_bandwidth(b, c), 2e6, 2e6 * 1e-9);
  EXPECT_LT(radio::rate_from_snr_bandwidth(b * (1 - 1e-6), c), 2e6);
  EXPECT_TRUE(std::isinf(min_bandwidth(c, c / std::log(2.0))));
  EXPECT_TRUE(std::isinf(min_bandwidth(c, 2 * c)));
}

TEST(Allocate, SingleClientTakesEverything) {
  auto s = make_gain_scenario({10}, {1e-9}, 3e6);
  s.tasks.clear();  // allocation does not look at tasks
  const std::vector<double> sc{1e5};
  const auto a = allocate(s, sc, SolverOptions{});
  EXPECT_DOUBLE_EQ(a.bandwidth[0], 3e6);
  EXPECT_DOUBLE_EQ(a.power[0], s.clients[0].p_max_w);
}

TEST(Allocate, SymmetricClientsSplitEqually) {
  const auto s = make_gain_scenario({10, 10}, {1e-9, 1e-9, 1e-9, 1e-9}, 4e6);
  const std::vector<double> sc(4, 2e5);
  const auto a = allocate(s, sc, SolverOptions{});
  for (double b : a.bandwidth) EXPECT_NEAR(b, 1e6, 1e-9 * 4e6);
  EXPECT_LE(a.total_bandwidth(), 4e6 * (1 + 1e-12));
}

TEST(Allocate, TwoClientsMatchGridOracle) {
  for (double g2 : {1e-10, 3e-9, 4e-8}) {
    const auto s = make_gain_scenario({10}, {1e-9, g2}, 5e6);
    const std::vector<double> sc{0.0, 0.0};
    const auto a = allocate(s, sc, SolverOptions{});
    const auto best = oracle::grid_split(s.snr_bandwidth(0), s.snr_bandwidth(1), 5e6);
    EXPECT_NEAR(a.bandwidth[0], best.b1, 1e-3 * 5e6) << "g2 " << g2;
    EXPECT_NEAR(a.total_bandwidth(), 5e6, 1e-6);
  }
}

TEST(Allocate, InteriorClientsShareMarginalRate) {
  const auto s = make_scenario({10, 20, 30}, 8, 21, 4e6);
  std::vector<double> sc(8, 0.0);
  sc[0] = 4e5;  // push a few clients against their floors
  sc[3] = 6e5;
  const auto a = allocate(s, sc, SolverOptions{});
  EXPECT_LE(a.total_bandwidth(), 4e6 * (1 + 1e-9));
  std::vector<double> marginals;
  for (std::size_t j = 0; j < 8; ++j) {
    const double c = s.snr_bandwidth(j);
    const double floor = sc[j] / s.t_max_s;
    EXPECT_GE(radio::rate_from_snr_bandwidth(a.bandwidth[j], c), floor * (1 - 1e-9));
    if (a.bandwidth[j] > min_bandwidth(c, floor) * (1 + 1e-9)) {
      marginals.push_back(marginal_rate(a.bandwidth[j], c));
    }
  }
  ASSERT_GE(marginals.size(), 2u);
  for (double m : marginals) EXPECT_NEAR(m, marginals.front(), 1e-6 * marginals.front());
}

TEST(Allocate, FloorsBeyondBudgetAreInfeasible) {
  const auto s = make_gain_scenario({10}, {1e-9, 1e-12, 1e-9}, 1e5);
  const std::vector<double> sc{1e6, 1e6, 0.0};
  try {
    allocate(s, sc, SolverOptions{});
    FAIL() << "expected Infeasible";
  } catch (const Infeasible& e) {
    EXPECT_EQ(e.clients(), (std::vector<std::size_t>{0, 1}));
  }
}

TEST(Allocate, BaselineSplits) {
  const auto s = make_gain_scenario({10}, {1e-9, 3e-9}, 4e6);
  const auto eq = allocate_equal(s);
  EXPECT_DOUBLE_EQ(eq.bandwidth[0], 2e6);
  EXPECT_DOUBLE_EQ(eq.bandwidth[1], 2e6);
  const auto prop = allocate_unfloored(s);
  EXPECT_NEAR(prop.bandwidth[0], 1e6, 1e-3);
  EXPECT_NEAR(prop.bandwidth[1], 3e6, 1e-3);
}

// ---------------------------------------------------------------------------
// Sizing

TEST(SizeModels, ZeroLambdaKeepsEverything) {
  const auto s = make_scenario({10, 20}, 5, 2, 10e6, 10.0);
  const auto curves = synthetic_curves(2, wide_grid());
  const auto o = opts_with(wide_grid());
  const std::vector<std::size_t> t{0, 1, 0, 1, 0};
  const auto rates = rates_of(s, allocate_equal(s));
  const auto r = size_models(s, curves, o, t, rates, 0.0);
  for (auto k : r.kept) EXPECT_EQ(k, s.hv_dims);
  for (bool f : r.latency_infeasible) EXPECT_FALSE(f);
}

TEST(SizeModels, BindingLatencyPicksSmallestFeasibleRatio) {
  auto s = make_gain_scenario({10}, {1e-9, 1e-9}, 1e6);
  s.bits_per_dim = 8;
  const auto o = opts_with({1, 1.5, 2, 3, 4, 6, 8});
  const std::vector<std::size_t> t{0, 0};
  const double s0 = 10.0 * 10000 * 8;
  const std::vector<double> rates(2, s0 / (0.5 * 4));
  for (double lambda : {0.0, 1.0, 100.0}) {
    const auto r = size_models(s, synthetic_curves(1, o.ratio_grid), o, t, rates, lambda);
    EXPECT_EQ(r.kept[0], 2500u) << lambda;
    EXPECT_FALSE(r.latency_infeasible[0]);
  }
}

TEST(SizeModels, ZeroCostCapForcesRatioOne) {
  auto s = make_gain_scenario({10}, {1e-9, 1e-9}, 1e6, 100.0);
  for (auto& c : s.clients) c.e_max = 0.0;
  const auto o = opts_with(wide_grid());
  const std::vector<std::size_t> t{0, 0};
  const std::vector<double> rates(2, 1e6);
  const auto r = size_models(s, flat_curves(1, wide_grid(), 0.5), o, t, rates, 1e6);
  EXPECT_EQ(r.kept, (std::vector<std::size_t>{10000, 10000}));
  // Too slow even uncompressed: flagged and pushed to the largest ratio.
  const std::vector<double> slow(2, 1.0);
  const auto f = size_models(s, flat_curves(1, wide_grid(), 0.5), o, t, slow, 0.0);
  EXPECT_TRUE(f.latency_infeasible[0]);
  EXPECT_EQ(f.kept[0], 625u);
}

// ---------------------------------------------------------------------------
// Assignment

TEST(AssignExact, SingleTaskTakesAllClients) {
  const auto s = make_scenario({10}, 5, 3, 2e6);
  const auto o = opts_with(wide_grid());
  const auto rates = rates_of(s, allocate_equal(s));
  const auto a = assign_exact(s, synthetic_curves(1, wide_grid()), o, 1.0, rates);
  for (auto t : a.task_of()) EXPECT_EQ(t, 0u);
}

TEST(AssignExact, CountingAndGuard) {
  const auto o = opts_with(wide_grid());
  const auto s3 = make_scenario({10, 20}, 3, 1, 2e6);
  const std::vector<double> r3(3, 1e6);
  EXPECT_THROW(assign_exact(s3, synthetic_curves(2, wide_grid()), o, 1.0, r3), Infeasible);
  EXPECT_THROW(assign_greedy(s3, synthetic_curves(2, wide_grid()), o, 1.0, r3), Infeasible);
  const auto s9 = make_scenario({10, 20}, 9, 1, 2e6);
  const std::vector<double> r9(9, 1e6);
  EXPECT_THROW(assign_exact(s9, synthetic_curves(2, wide_grid()), o, 1.0, r9), GuardExceeded);
  const auto s5 = make_scenario({10, 10, 10, 10, 10}, 10, 1, 2e6);
  const std::vector<double> r10(10, 1e6);
  EXPECT_THROW(assign_exact(s5, synthetic_curves(5, wide_grid()), o, 1.0, r10), GuardExceeded);
}

struct OracleCase {
  std::size_t clients;
  std::uint64_t seed;
};

class ExactVsOracle : public ::testing::TestWithParam<OracleCase> {};

TEST_P(ExactVsOracle, SameOptimalObjective) {
  const auto [n, seed] = GetParam();
  const std::vector<double> grid{1, 1.5, 2, 4, 8};
  const auto o = opts_with(grid);
  const auto curves = synthetic_curves(2, grid, seed);
  for (double b_max : {1e6, 3e6}) {
    const auto s = make_scenario({10, 20}, n, seed, b_max);
    const auto rates = rates_of(s, allocate_equal(s));
    for (double lambda : {0.0, 0.5, 3.0, 20.0}) {
      const auto best = oracle::brute_force_joint(s, curves, grid, rates, lambda, o.rate_unit_bps);
      const auto a = assign_exact(s, curves, o, lambda, rates);
      if (!best.found) continue;  // nothing latency-feasible at these rates
      const double got = oracle::joint_objective(s, curves, a.task_of(), a.compressed_dims(), rates,
                                                 lambda, o.rate_unit_bps);
      EXPECT_DOUBLE_EQ(got, best.objective) << "n " << n << " b " << b_max << " lambda " << lambda;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(SmallInstances, ExactVsOracle,
                         ::testing::Values(OracleCase{4, 1}, OracleCase{4, 2}, OracleCase{4, 3},
                                           OracleCase{5, 1}, OracleCase{5, 2}, OracleCase{5, 3},
                                           OracleCase{6, 1}, OracleCase{6, 2}, OracleCase{6, 3}));

TEST(AssignGreedy, AlwaysFeasibleAndDeterministic) {
  const auto o = opts_with(wide_grid());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = make_scenario({10, 20, 30, 40, 50}, 12, seed, 5e6);
    const auto curves = synthetic_curves(5, wide_grid(), seed);
    const auto rates = rates_of(s, allocate_equal(s));
    for (auto crit : {GreedyCriterion::parametric, GreedyCriterion::accuracy_only,
                      GreedyCriterion::rate_only}) {
      const auto a = assign_greedy(s, curves, o, 0.3, rates, crit);
      EXPECT_TRUE(sysmodel::assignment_feasible(a.task_of(), 5));
      EXPECT_EQ(a, assign_greedy(s, curves, o, 0.3, rates, crit));
    }
  }
}

TEST(AssignGreedy, SymmetricInstanceMatchesExact) {
  const auto o = opts_with(wide_grid());
  const auto curves = flat_curves(2, wide_grid(), 0.9);
  for (std::size_t n : {4u, 5u, 6u}) {
    const auto s = make_gain_scenario({20, 20}, std::vector<double>(n, 2e-9), 2e6);
    const auto rates = rates_of(s, allocate_equal(s));
    for (double lambda : {0.0, 1.0, 50.0}) {
      const auto g = assign_greedy(s, curves, o, lambda, rates);
      const auto e = assign_exact(s, curves, o, lambda, rates);
      const double vg = oracle::joint_objective(s, curves, g.task_of(), g.compressed_dims(), rates,
                                                lambda, o.rate_unit_bps);
      const double ve = oracle::joint_objective(s, curves, e.task_of(), e.compressed_dims(), rates,
                                                lambda, o.rate_unit_bps);
      EXPECT_NEAR(vg, ve, 1e-12 * (1 + std::abs(ve)));
    }
  }
}

// Whole-solve comparison: greedy-mode CPR against exact-mode CPR on small instances.
TEST(AssignGreedy, SolveCprWithinBoundOfExact) {
  constexpr double kBound = 1.10;
  double worst = 0.0;
  for (std::size_t n : {4u, 5u, 6u}) {
    for (std::uint64_t seed = 0; seed < 7; ++seed) {
      const auto s = make_scenario({10, 30}, n, 500 + seed, 2e6);
      const auto curves = synthetic_curves(2, wide_grid(), seed);
      auto o = opts_with(wide_grid());
      const auto g = solve(s, curves, o);
      o.assignment_mode = AssignmentMode::exact;
      const auto e = solve(s, curves, o);
      ASSERT_TRUE(g.feasible);
      ASSERT_TRUE(e.feasible);
      worst = std::max(worst, g.cpr / e.cpr);
      EXPECT_LE(g.cpr, kBound * e.cpr) << "n " << n << " seed " << seed;
    }
  }
  RecordProperty("worst_greedy_over_exact", std::to_string(worst));
}

// ---------------------------------------------------------------------------
// AO and Dinkelbach

TEST(AoInner, FixedPointReturnsUnchanged) {
  const auto s = make_scenario({10, 20, 30}, 8, 4, 3e6);
  const auto curves = synthetic_curves(3, wide_grid(), 4);
  const auto o = opts_with(wide_grid());
  const auto first = ao_inner(s, curves, o, 0.2, initial_plan(s, curves, o));
  const auto again = ao_inner(s, curves, o, 0.2, first.plan);
  EXPECT_EQ(again.iterations, 1);
  EXPECT_EQ(again.plan.task_of, first.plan.task_of);
  EXPECT_EQ(again.plan.kept, first.plan.kept);
  EXPECT_EQ(again.plan.allocation.bandwidth, first.plan.allocation.bandwidth);
  EXPECT_EQ(again.objective, first.objective);
}

TEST(AoInner, ObjectiveNonincreasing) {
  const auto o = opts_with(wide_grid());
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = make_scenario({10, 20, 30, 40, 50}, 12, seed, 1e6 + 5e5 * static_cast<double>(seed % 10));
    const auto curves = synthetic_curves(5, wide_grid(), seed);
    const auto start = initial_plan(s, curves, o);
    if (evaluate(s, curves, o, start).violations != 0) continue;
    ++checked;
    const double lambda = 0.05 * static_cast<double>(seed + 1);
    const auto r = ao_inner(s, curves, o, lambda, start);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
      EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1]) << "seed " << seed;
    }
    EXPECT_EQ(evaluate(s, curves, o, r.plan).violations, 0u);
  }
  EXPECT_GE(checked, 15u);
}

TEST(AoInner, ZeroLambdaKeepsFullModelsWhenLatencyAllows) {
  const auto s = make_scenario({10, 20}, 6, 8, 20e6, 5.0);
  const auto curves = synthetic_curves(2, wide_grid(), 8);
  const auto o = opts_with(wide_grid());
  const auto r = ao_inner(s, curves, o, 0.0, initial_plan(s, curves, o));
  for (auto k : r.plan.kept) EXPECT_EQ(k, s.hv_dims);
}

TEST(Solve, LambdaTraceMonotoneAndConverged) {
  const auto o = opts_with(wide_grid());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double b = 1e6 * static_cast<double>(1 + seed % 10);
    const auto s = make_scenario({10, 20, 30, 40, 50}, 12, 100 + seed, b);
    const auto curves = synthetic_curves(5, wide_grid(), seed);
    const auto r = solve(s, curves, o);
    ASSERT_GE(r.lambda_trace.size(), 2u);
    for (std::size_t i = 2; i < r.lambda_trace.size(); ++i) {
      EXPECT_LE(r.lambda_trace[i], r.lambda_trace[i - 1] + 1e-9) << "seed " << seed;
    }
    for (std::size_t i = 1; i < r.residual_trace.size(); ++i) {
      EXPECT_LE(r.residual_trace[i], 1e-9 * (1 + r.q)) << "seed " << seed;
    }
    EXPECT_NEAR(r.cpr, r.lambda_trace.back(), 1e-6);
    EXPECT_TRUE(r.feasible);
    EXPECT_TRUE(verify(s, curves, o, r).empty());
  }
}

TEST(Solve, SingletonConvergesToTwo) {
  // One task, two identical clients, a one-point grid at ratio 4: cost 3 + 3 = 6.
  auto s = make_gain_scenario({10}, {1e-9, 1e-9}, 2e6, 10.0);
  auto o = opts_with({1.0, 4.0});
  for (auto& c : s.clients) c.e_max = 3.0;
  // Forbid ratio 1 through latency: full models cannot make it in time.
  const double rate = radio::rate_from_snr_bandwidth(1e6, s.snr_bandwidth(0));
  s.t_max_s = 10000.0 * 10 * 8 / rate * 0.5;
  o.rate_unit_bps = 2 * rate / 3.0;
  const auto r = solve(s, flat_curves(1, o.ratio_grid, 1.0), o);
  EXPECT_NEAR(r.cost_sum, 6.0, 1e-12);
  EXPECT_NEAR(r.q, 3.0, 1e-9);
  EXPECT_NEAR(r.lambda_trace.back(), 2.0, 1e-9);
  EXPECT_EQ(r.outer_iters, 1);
}

TEST(Solve, InfeasibleInputs) {
  const auto o = opts_with(wide_grid());
  const auto few = make_scenario({10, 20}, 3, 1, 2e6);
  EXPECT_THROW(solve(few, synthetic_curves(2, wide_grid()), o), Infeasible);
  // Far too little bandwidth even at maximum compression.
  const auto starved = make_scenario({50, 50}, 12, 1, 1e3);
  EXPECT_THROW(solve(starved, synthetic_curves(2, wide_grid()), o), Infeasible);
}

TEST(Solve, Deterministic) {
  const auto s = make_scenario({10, 20, 30, 40, 50}, 12, 77, 4e6);
  const auto curves = synthetic_curves(5, wide_grid(), 77);
  const auto o = opts_with(wide_grid());
  const auto a = solve(s, curves, o), b = solve(s, curves, o);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.allocation.bandwidth, b.allocation.bandwidth);
  EXPECT_EQ(a.lambda_trace, b.lambda_trace);
  EXPECT_EQ(a.residual_trace, b.residual_trace);
  EXPECT_EQ(summary_record(a), summary_record(b));
}

TEST(Verify, DetectsTampering) {
  const auto s = make_scenario({10, 20, 30}, 8, 12, 3e6);
  const auto curves = synthetic_curves(3, wide_grid(), 12);
  const auto o = opts_with(wide_grid());
  const auto r = solve(s, curves, o);
  ASSERT_TRUE(verify(s, curves, o, r).empty());

  auto over = r;
  for (auto& b : over.allocation.bandwidth) b *= 1.5;
  EXPECT_FALSE(verify(s, curves, o, over).empty());

  auto loud = r;
  loud.allocation.power[0] *= 2.0;
  EXPECT_FALSE(verify(s, curves, o, loud).empty());

  auto slow = r;
  slow.allocation.bandwidth[0] *= 1e-3;
  EXPECT_FALSE(verify(s, curves, o, slow).empty());

  auto wrong_cpr = r;
  wrong_cpr.cpr *= 1.01;
  EXPECT_FALSE(verify(s, curves, o, wrong_cpr).empty());
}

TEST(SummaryRecord, FixedKeys) {
  const auto s = make_scenario({10, 20}, 4, 3, 3e6);
  const auto r = solve(s, synthetic_curves(2, wide_grid()), opts_with(wide_grid()));
  const auto rec = summary_record(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : rec) keys.push_back(k);
  ASSERT_FALSE(keys.empty());
  EXPECT_EQ(keys.front(), "cpr");
}
