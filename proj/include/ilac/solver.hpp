#pragma once

// Joint task assignment, model sizing, bandwidth and power allocation.
//
// The cost-to-performance ratio sum_j e_j / Q is minimised with Dinkelbach's
// method: for a fixed lambda the parametric problem min sum_j e_j - lambda Q is
// solved approximately by alternating optimisation (AO) between the blocks
// {assignment, sizes} and {bandwidth, power}; lambda is then reset to the ratio
// at the new point. Every AO sub-step accepts only non-worsening moves, so the
// lambda sequence is nonincreasing.
//
// Q's rate factor is expressed in units of SolverOptions::rate_unit_bps
// (Mbit/s by default) so that sum e and Q are of comparable magnitude and the
// stopping tolerance is meaningful.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ilac/radio.hpp"
#include "ilac/sysmodel.hpp"

namespace ilac::solver {

enum class AssignmentMode { greedy, exact };

struct SolverOptions {
  double lambda_tol = 1e-6;
  int max_dinkelbach_iters = 100;
  int max_ao_iters = 20;
  std::vector<double> ratio_grid{1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  AssignmentMode assignment_mode = AssignmentMode::greedy;
  // Relative width at which the bandwidth dual bisection stops.
  double bisection_tol = 1e-9;
  double rate_unit_bps = 1e6;
  // Size guard for exhaustive assignment.
  std::size_t exact_max_tasks = 4;
  std::size_t exact_max_clients = 8;

  void validate() const;
};

// One accuracy curve per scenario task, in task order.
using CurveSet = std::vector<sysmodel::AccuracyCurve>;

inline constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

// Decision variables at one point of the search.
struct Plan {
  std::vector<std::size_t> task_of;  // kUnassigned allowed only inside greedy construction
  std::vector<std::size_t> kept;     // kept hypervector dimensions per client
  radio::RadioAllocation allocation;
};

struct ClientOutcome {
  std::size_t task = 0;
  std::size_t kept_dims = 0;
  double ratio = 1.0;  // s0 / sc
  double s0_bits = 0.0;
  double sc_bits = 0.0;
  double cost = 0.0;
  double bandwidth_hz = 0.0;
  double power_w = 0.0;
  double rate_bps = 0.0;
  double tx_time_s = 0.0;
  double accuracy = 0.0;
  bool latency_ok = true;
  bool cost_ok = true;
};

// Everything derived from a Plan.
struct Evaluation {
  std::vector<ClientOutcome> clients;
  std::vector<double> task_accuracy;  // mean phi per task (0 for tasks without clients)
  double cost_sum = 0.0;
  double rate_sum_bps = 0.0;
  double mean_accuracy = 0.0;  // (1/M) sum_i mean phi_i
  double q = 0.0;              // (rate_sum / rate_unit) * mean_accuracy
  std::size_t violations = 0;  // clients breaking latency or cost caps

  double objective(double lambda) const { return cost_sum - lambda * q; }
};

Evaluation evaluate(const sysmodel::Scenario& scenario, const CurveSet& curves,
                    const SolverOptions& opts, const Plan& plan);

struct SizingResult {
  std::vector<std::size_t> kept;
  std::vector<bool> latency_infeasible;
};

// Per-client ratio choice with assignment and rates fixed. Among grid ratios with
// e_j <= e_max,j and s_c / r_j <= t_max, picks the one minimising
// e_j - lambda * (R / (M n_i)) * phi(ratio), which is client j's share of
// sum e - lambda Q. Clients with no latency-feasible ratio get the largest grid
// ratio and are flagged. Unassigned clients are skipped.
SizingResult size_models(const sysmodel::Scenario& scenario, const CurveSet& curves,
                         const SolverOptions& opts, std::span<const std::size_t> task_of,
                         std::span<const double> rates, double lambda);

// Smallest bandwidth at which a client with SNR-bandwidth c reaches `rate_floor`.
// Returns +infinity if the floor is at or above the wide-band limit c / ln 2.
double min_bandwidth(double c, double rate_floor);

// p_j = p_max,j; bandwidth maximises sum_j r_j subject to sum b_j <= b_max and the
// latency floors r_j >= s_c,j / t_max. Solved by bisection on the budget
// multiplier: every unfloored client runs at the same SNR per Hz x, with
// b_j = max(b_min,j, c_j / x). Throws Infeasible listing the clients with positive
// floors when the floors alone exceed b_max.
radio::RadioAllocation allocate(const sysmodel::Scenario& scenario,
                                std::span<const double> sc_bits, const SolverOptions& opts);
// Floors off: b_j proportional to c_j.
radio::RadioAllocation allocate_unfloored(const sysmodel::Scenario& scenario);
radio::RadioAllocation allocate_equal(const sysmodel::Scenario& scenario);

std::vector<double> rates_of(const sysmodel::Scenario& scenario,
                             const radio::RadioAllocation& allocation);

// What the greedy construction ranks partial assignments by.
enum class GreedyCriterion {
  parametric,     // sum e - lambda Q
  accuracy_only,  // -mean accuracy (learning-oriented baseline)
  rate_only,      // -sum of assigned rates (communication-oriented baseline)
};

// Phase 1 seeds each task, in descending K, with two clients picked one at a time
// by best marginal score; phase 2 gives every remaining client (in index order) its
// best marginal task. Ties go to the lowest client, then lowest task index. Sizes
// are filled in by size_models. Throws Infeasible if N < 2M.
sysmodel::Assignment assign_greedy(const sysmodel::Scenario& scenario, const CurveSet& curves,
                                   const SolverOptions& opts, double lambda,
                                   std::span<const double> rates,
                                   GreedyCriterion criterion = GreedyCriterion::parametric);

// Exhaustive enumeration of all assignments with every task on at least two
// clients; each is sized with size_models and the minimiser of
// (constraint violations, sum e - lambda Q) is returned, ties going to the
// lexicographically smallest row-major A. Throws GuardExceeded above the size
// guard and Infeasible if N < 2M.
sysmodel::Assignment assign_exact(const sysmodel::Scenario& scenario, const CurveSet& curves,
                                  const SolverOptions& opts, double lambda,
                                  std::span<const double> rates);

struct AoResult {
  Plan plan;
  double objective = 0.0;
  std::vector<double> objective_trace;  // after the warm start, then after each sweep
  int iterations = 0;
};

AoResult ao_inner(const sysmodel::Scenario& scenario, const CurveSet& curves,
                  const SolverOptions& opts, double lambda, Plan warm_start);

// Feasibility-first starting point: greedy assignment at lambda = 0, equal
// bandwidth, and the smallest latency-feasible ratio per client. If equal
// bandwidth leaves a client without a feasible ratio, bandwidth is instead
// allocated against the floors of the most compressed sizes. Throws Infeasible
// when no allocation meets those floors.
Plan initial_plan(const sysmodel::Scenario& scenario, const CurveSet& curves,
                  const SolverOptions& opts);

struct SolveResult {
  sysmodel::Assignment assignment;
  radio::RadioAllocation allocation;
  std::vector<double> lambda_trace;
  // Entry i >= 1 is sum e - lambda^(i-1) Q at iterate i; entry 0 is 0.
  std::vector<double> residual_trace;
  double cpr = 0.0;
  double cost_sum = 0.0;
  double rate_sum_bps = 0.0;
  double q = 0.0;
  double mean_accuracy = 0.0;
  std::vector<ClientOutcome> per_client;
  std::vector<double> per_task_accuracy;
  bool feasible = false;
  int outer_iters = 0;
  int inner_iters = 0;
};

SolveResult make_result(const sysmodel::Scenario& scenario, const CurveSet& curves,
                        const SolverOptions& opts, const Plan& plan);

// Throws Infeasible if N < 2M or if no bandwidth split meets the latency floors.
SolveResult solve(const sysmodel::Scenario& scenario, const CurveSet& curves,
                  const SolverOptions& opts);

// Recomputes every constraint of a result from scratch; returns one message per
// violation (empty when the result is feasible and self-consistent).
std::vector<std::string> verify(const sysmodel::Scenario& scenario, const CurveSet& curves,
                                const SolverOptions& opts, const SolveResult& result);

// Flat key/value view of a result's headline numbers, in a fixed key order.
std::vector<std::pair<std::string, std::string>> summary_record(const SolveResult& result);

}  // namespace ilac::solver
