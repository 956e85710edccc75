#include "ilac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ilac/csv.hpp"
#include "ilac/error.hpp"

namespace ilac::solver {

namespace {

constexpr double kLatencySlack = 1e-9;

struct Score {
  std::size_t violations = 0;
  double value = 0.0;
};

// Strictly better, with a small relative dead band on the objective.
bool improves(const Score& a, const Score& b) {
  if (a.violations != b.violations) return a.violations < b.violations;
  return a.value < b.value - 1e-12 * (1.0 + std::abs(b.value));
}

bool not_worse(const Score& a, const Score& b) { return !improves(b, a); }

double ratio_of(std::size_t dims, std::size_t kept) {
  return static_cast<double>(dims) / static_cast<double>(kept);
}

void require_enough_clients(const sysmodel::Scenario& scenario);

void check_inputs(const sysmodel::Scenario& scenario, const CurveSet& curves,
                  const SolverOptions& opts) {
  opts.validate();
  require_enough_clients(scenario);
  scenario.validate();
  if (curves.size() != scenario.num_tasks()) {
    throw InvalidArgument("solver: one accuracy curve per task required");
  }
  for (const auto& c : curves) c.validate();
}

void require_enough_clients(const sysmodel::Scenario& scenario) {
  if (scenario.num_clients() < 2 * scenario.num_tasks()) {
    throw Infeasible("fewer than two clients per task");
  }
}

// Shared evaluation core. `bandwidth` / `power` may be empty (greedy scoring).
Evaluation evaluate_core(const sysmodel::Scenario& scenario, const CurveSet& curves,
                         const SolverOptions& opts, std::span<const std::size_t> task_of,
                         std::span<const std::size_t> kept, std::span<const double> rates,
                         std::span<const double> bandwidth, std::span<const double> power) {
  const std::size_t m = scenario.num_tasks();
  const std::size_t d = scenario.hv_dims;
  Evaluation ev;
  ev.clients.resize(task_of.size());
  ev.task_accuracy.assign(m, 0.0);
  std::vector<double> count(m, 0.0);
  for (std::size_t j = 0; j < task_of.size(); ++j) {
    const std::size_t i = task_of[j];
    if (i == kUnassigned) continue;
    auto& c = ev.clients[j];
    const std::size_t k = scenario.classes_of(i);
    c.task = i;
    c.kept_dims = kept[j];
    c.s0_bits = sysmodel::model_size_bits(k, d, scenario.bits_per_dim);
    c.sc_bits = sysmodel::model_size_bits(k, kept[j], scenario.bits_per_dim);
    c.ratio = ratio_of(d, kept[j]);
    c.cost = sysmodel::compression_cost(c.s0_bits, c.sc_bits, scenario.kappa);
    c.rate_bps = rates[j];
    if (!bandwidth.empty()) c.bandwidth_hz = bandwidth[j];
    if (!power.empty()) c.power_w = power[j];
    c.tx_time_s = rates[j] > 0.0 ? c.sc_bits / rates[j] : std::numeric_limits<double>::infinity();
    c.latency_ok = c.tx_time_s <= scenario.t_max_s * (1.0 + kLatencySlack);
    c.cost_ok = c.cost <= scenario.clients[j].e_max * (1.0 + 1e-12) + 1e-12;
    c.accuracy = curves[i].at(c.ratio);
    if (!c.latency_ok || !c.cost_ok) ++ev.violations;
    ev.cost_sum += c.cost;
    ev.rate_sum_bps += rates[j];
    ev.task_accuracy[i] += c.accuracy;
    count[i] += 1.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (count[i] > 0.0) ev.task_accuracy[i] /= count[i];
    ev.mean_accuracy += ev.task_accuracy[i];
  }
  ev.mean_accuracy /= static_cast<double>(m);
  ev.q = ev.rate_sum_bps / opts.rate_unit_bps * ev.mean_accuracy;
  return ev;
}

Score score_of(const Evaluation& ev, double lambda, GreedyCriterion criterion) {
  if (criterion == GreedyCriterion::accuracy_only) return {ev.violations, -ev.mean_accuracy};
  if (criterion == GreedyCriterion::rate_only) return {ev.violations, -ev.rate_sum_bps};
  return {ev.violations, ev.objective(lambda)};
}

// Sizes a (possibly partial) assignment and scores it.
Score score_assignment(const sysmodel::Scenario& scenario, const CurveSet& curves,
                       const SolverOptions& opts, std::span<const std::size_t> task_of,
                       std::span<const double> rates, double lambda, GreedyCriterion criterion,
                       std::vector<std::size_t>* kept_out = nullptr) {
  const double sizing_lambda = criterion == GreedyCriterion::parametric ? lambda : 0.0;
  auto sized = size_models(scenario, curves, opts, task_of, rates, sizing_lambda);
  const auto ev = evaluate_core(scenario, curves, opts, task_of, sized.kept, rates, {}, {});
  if (kept_out) *kept_out = std::move(sized.kept);
  return score_of(ev, lambda, criterion);
}

std::vector<std::size_t> task_counts(std::span<const std::size_t> task_of, std::size_t m) {
  std::vector<std::size_t> n(m, 0);
  for (auto t : task_of) {
    if (t != kUnassigned) ++n[t];
  }
  return n;
}

// Best-improvement search over single-client moves and pairwise swaps.
std::vector<std::size_t> local_search(const sysmodel::Scenario& scenario, const CurveSet& curves,
                                      const SolverOptions& opts, double lambda,
                                      std::span<const double> rates,
                                      std::vector<std::size_t> task_of) {
  const std::size_t m = scenario.num_tasks();
  const std::size_t n = task_of.size();
  Score best = score_assignment(scenario, curves, opts, task_of, rates, lambda,
                                GreedyCriterion::parametric);
  for (int pass = 0; pass < 100; ++pass) {
    auto counts = task_counts(task_of, m);
    std::vector<std::size_t> best_move;
    Score best_move_score = best;
    auto consider = [&](std::vector<std::size_t>& cand) {
      const Score s = score_assignment(scenario, curves, opts, cand, rates, lambda,
                                       GreedyCriterion::parametric);
      if (improves(s, best_move_score)) {
        best_move_score = s;
        best_move = cand;
      }
    };
    std::vector<std::size_t> cand = task_of;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t from = task_of[j];
      if (counts[from] <= 2) continue;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == from) continue;
        cand[j] = i;
        consider(cand);
      }
      cand[j] = from;
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (task_of[j] == task_of[k]) continue;
        std::swap(cand[j], cand[k]);
        consider(cand);
        std::swap(cand[j], cand[k]);
      }
    }
    if (best_move.empty()) break;
    task_of = std::move(best_move);
    best = best_move_score;
  }
  return task_of;
}

std::vector<double> sc_bits_of(const sysmodel::Scenario& scenario, const Plan& plan) {
  std::vector<double> sc(plan.task_of.size());
  for (std::size_t j = 0; j < sc.size(); ++j) {
    sc[j] = sysmodel::model_size_bits(scenario.classes_of(plan.task_of[j]), plan.kept[j],
                                      scenario.bits_per_dim);
  }
  return sc;
}

// Lexicographic order of the row-major 0/1 matrices of two assignments.
bool matrix_less(std::span<const std::size_t> a, std::span<const std::size_t> b, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      const int x = a[j] == i ? 1 : 0;
      const int y = b[j] == i ? 1 : 0;
      if (x != y) return x < y;
    }
  }
  return false;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(lambda_tol > 0.0)) throw InvalidArgument("SolverOptions: lambda_tol must be positive");
  if (max_dinkelbach_iters < 1 || max_ao_iters < 1) {
    throw InvalidArgument("SolverOptions: iteration caps must be at least 1");
  }
  if (ratio_grid.empty()) throw InvalidArgument("SolverOptions: empty ratio grid");
  if (ratio_grid.front() != 1.0) throw InvalidArgument("SolverOptions: ratio grid must start at 1");
  for (std::size_t g = 0; g < ratio_grid.size(); ++g) {
    if (!std::isfinite(ratio_grid[g]) || (g > 0 && !(ratio_grid[g] > ratio_grid[g - 1]))) {
      throw InvalidArgument("SolverOptions: ratio grid must be finite and strictly increasing");
    }
  }
  if (!(bisection_tol > 0.0 && bisection_tol < 1.0)) {
    throw InvalidArgument("SolverOptions: bisection_tol must be in (0, 1)");
  }
  if (!(rate_unit_bps > 0.0)) throw InvalidArgument("SolverOptions: rate_unit_bps must be positive");
}

Evaluation evaluate(const sysmodel::Scenario& scenario, const CurveSet& curves,
                    const SolverOptions& opts, const Plan& plan) {
  const auto rates = rates_of(scenario, plan.allocation);
  return evaluate_core(scenario, curves, opts, plan.task_of, plan.kept, rates,
                       plan.allocation.bandwidth, plan.allocation.power);
}

std::vector<double> rates_of(const sysmodel::Scenario& scenario,
                             const radio::RadioAllocation& allocation) {
  const std::size_t n = scenario.num_clients();
  if (allocation.bandwidth.size() != n || allocation.power.size() != n) {
    throw InvalidArgument("rates_of: allocation does not match the client count");
  }
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) {
    r[j] = radio::rate(allocation.bandwidth[j], allocation.power[j], scenario.channel[j].gain,
                       scenario.noise);
  }
  return r;
}

SizingResult size_models(const sysmodel::Scenario& scenario, const CurveSet& curves,
                         const SolverOptions& opts, std::span<const std::size_t> task_of,
                         std::span<const double> rates, double lambda) {
  const std::size_t n = scenario.num_clients();
  const std::size_t m = scenario.num_tasks();
  const std::size_t d = scenario.hv_dims;
  if (task_of.size() != n || rates.size() != n) {
    throw InvalidArgument("size_models: one task and one rate per client required");
  }
  const auto counts = task_counts(task_of, m);
  double r_units = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (task_of[j] != kUnassigned) r_units += rates[j] / opts.rate_unit_bps;
  }
  const double max_ratio = *std::max_element(opts.ratio_grid.begin(), opts.ratio_grid.end());

  SizingResult out;
  out.kept.assign(n, d);
  out.latency_infeasible.assign(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = task_of[j];
    if (i == kUnassigned) continue;
    if (i >= m) throw InvalidArgument("size_models: task index out of range");
    const std::size_t k = scenario.classes_of(i);
    const double s0 = sysmodel::model_size_bits(k, d, scenario.bits_per_dim);
    const double w = lambda * r_units / (static_cast<double>(m) * static_cast<double>(counts[i]));
    bool found = false;
    double best = 0.0;
    for (double g : opts.ratio_grid) {
      const std::size_t kept = sysmodel::kept_dims_for_ratio(d, g);
      const double sc = sysmodel::model_size_bits(k, kept, scenario.bits_per_dim);
      const double e = sysmodel::compression_cost(s0, sc, scenario.kappa);
      if (e > scenario.clients[j].e_max * (1.0 + 1e-12) + 1e-12) continue;
      if (!(rates[j] > 0.0) || sc / rates[j] > scenario.t_max_s * (1.0 + kLatencySlack)) continue;
      const double v = e - w * curves[i].at(ratio_of(d, kept));
      if (!found || v < best) {
        found = true;
        best = v;
        out.kept[j] = kept;
      }
    }
    if (!found) {
      out.kept[j] = sysmodel::kept_dims_for_ratio(d, max_ratio);
      out.latency_infeasible[j] = true;
    }
  }
  return out;
}

double min_bandwidth(double c, double rate_floor) {
  if (!(rate_floor > 0.0)) return 0.0;
  if (!(c > 0.0) || rate_floor >= c / std::log(2.0) * (1.0 - 1e-12)) {
    return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  double hi = rate_floor;
  while (radio::rate_from_snr_bandwidth(hi, c) < rate_floor) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (radio::rate_from_snr_bandwidth(mid, c) >= rate_floor) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

radio::RadioAllocation allocate_equal(const sysmodel::Scenario& scenario) {
  const std::size_t n = scenario.num_clients();
  radio::RadioAllocation a;
  a.bandwidth.assign(n, scenario.b_max_hz / static_cast<double>(n));
  a.power.resize(n);
  for (std::size_t j = 0; j < n; ++j) a.power[j] = scenario.clients[j].p_max_w;
  return a;
}

radio::RadioAllocation allocate_unfloored(const sysmodel::Scenario& scenario) {
  const std::size_t n = scenario.num_clients();
  radio::RadioAllocation a;
  a.bandwidth.resize(n);
  a.power.resize(n);
  double c_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) c_sum += scenario.snr_bandwidth(j);
  for (std::size_t j = 0; j < n; ++j) {
    a.power[j] = scenario.clients[j].p_max_w;
    a.bandwidth[j] = scenario.b_max_hz * scenario.snr_bandwidth(j) / c_sum;
  }
  return a;
}

radio::RadioAllocation allocate(const sysmodel::Scenario& scenario,
                                std::span<const double> sc_bits, const SolverOptions& opts) {
  const std::size_t n = scenario.num_clients();
  if (sc_bits.size() != n) throw InvalidArgument("allocate: one model size per client required");
  const double budget = scenario.b_max_hz;
  std::vector<double> c(n), bmin(n);
  double bmin_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = scenario.snr_bandwidth(j);
    bmin[j] = min_bandwidth(c[j], sc_bits[j] / scenario.t_max_s);
    bmin_sum += bmin[j];
  }
  if (!(bmin_sum <= budget)) {
    std::vector<std::size_t> floored;
    for (std::size_t j = 0; j < n; ++j) {
      if (bmin[j] > 0.0) floored.push_back(j);
    }
    std::ostringstream msg;
    msg << "latency floors need " << bmin_sum << " Hz but only " << budget << " Hz is available";
    throw Infeasible(msg.str(), std::move(floored));
  }

  radio::RadioAllocation a;
  a.power.resize(n);
  for (std::size_t j = 0; j < n; ++j) a.power[j] = scenario.clients[j].p_max_w;

  // S(x) = sum_j max(bmin_j, c_j / x) is decreasing in the common SNR per Hz x.
  auto demand = [&](double x) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::max(bmin[j], c[j] / x);
    return s;
  };
  const double c_sum = std::accumulate(c.begin(), c.end(), 0.0);
  double lo = c_sum / budget;  // demand(lo) >= budget
  double hi = lo;
  while (demand(hi) > budget) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) break;
  }
  while ((hi - lo) > opts.bisection_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (demand(mid) > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // Exact polish on the active set identified by the bisection.
  const double x = 0.5 * (lo + hi);
  std::vector<bool> floored(n);
  for (std::size_t j = 0; j < n; ++j) floored[j] = bmin[j] >= c[j] / x;
  a.bandwidth.assign(n, 0.0);
  for (;;) {
    double rest = budget;
    double free_c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (floored[j]) {
        rest -= bmin[j];
      } else {
        free_c += c[j];
      }
    }
    bool changed = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (floored[j]) {
        a.bandwidth[j] = bmin[j];
        continue;
      }
      a.bandwidth[j] = std::max(0.0, rest) * c[j] / free_c;
      if (a.bandwidth[j] < bmin[j]) {
        floored[j] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return a;
}

sysmodel::Assignment assign_greedy(const sysmodel::Scenario& scenario, const CurveSet& curves,
                                   const SolverOptions& opts, double lambda,
                                   std::span<const double> rates, GreedyCriterion criterion) {
  require_enough_clients(scenario);
  const std::size_t m = scenario.num_tasks();
  const std::size_t n = scenario.num_clients();
  if (rates.size() != n) throw InvalidArgument("assign_greedy: one rate per client required");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scenario.classes_of(a) > scenario.classes_of(b);
  });

  std::vector<std::size_t> task_of(n, kUnassigned);
  for (std::size_t i : order) {
    for (int pick = 0; pick < 2; ++pick) {
      std::size_t best_j = kUnassigned;
      Score best{};
      for (std::size_t j = 0; j < n; ++j) {
        if (task_of[j] != kUnassigned) continue;
        task_of[j] = i;
        const Score s = score_assignment(scenario, curves, opts, task_of, rates, lambda, criterion);
        task_of[j] = kUnassigned;
        if (best_j == kUnassigned || improves(s, best)) {
          best_j = j;
          best = s;
        }
      }
      task_of[best_j] = i;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (task_of[j] != kUnassigned) continue;
    std::size_t best_i = 0;
    Score best{};
    for (std::size_t i = 0; i < m; ++i) {
      task_of[j] = i;
      const Score s = score_assignment(scenario, curves, opts, task_of, rates, lambda, criterion);
      if (i == 0 || improves(s, best)) {
        best_i = i;
        best = s;
      }
    }
    task_of[j] = best_i;
  }
  std::vector<std::size_t> kept;
  score_assignment(scenario, curves, opts, task_of, rates, lambda, criterion, &kept);
  return sysmodel::Assignment(m, std::move(task_of), std::move(kept));
}

sysmodel::Assignment assign_exact(const sysmodel::Scenario& scenario, const CurveSet& curves,
                                  const SolverOptions& opts, double lambda,
                                  std::span<const double> rates) {
  const std::size_t m = scenario.num_tasks();
  const std::size_t n = scenario.num_clients();
  if (m > opts.exact_max_tasks || n > opts.exact_max_clients) {
    std::ostringstream msg;
    msg << "assign_exact: " << m << " tasks x " << n << " clients exceeds the guard of "
        << opts.exact_max_tasks << " x " << opts.exact_max_clients;
    throw GuardExceeded(msg.str());
  }
  require_enough_clients(scenario);
  if (rates.size() != n) throw InvalidArgument("assign_exact: one rate per client required");

  std::vector<std::size_t> cur(n, 0);
  std::vector<std::size_t> best_task_of;
  Score best{};
  for (;;) {
    if (sysmodel::assignment_feasible(cur, m)) {
      const Score s = score_assignment(scenario, curves, opts, cur, rates, lambda,
                                       GreedyCriterion::parametric);
      bool take = best_task_of.empty() || improves(s, best);
      if (!take && !improves(best, s)) take = matrix_less(cur, best_task_of, m);
      if (take) {
        best = s;
        best_task_of = cur;
      }
    }
    std::size_t pos = 0;
    while (pos < n && ++cur[pos] == m) cur[pos++] = 0;
    if (pos == n) break;
  }
  std::vector<std::size_t> kept;
  score_assignment(scenario, curves, opts, best_task_of, rates, lambda,
                   GreedyCriterion::parametric, &kept);
  return sysmodel::Assignment(m, std::move(best_task_of), std::move(kept));
}

AoResult ao_inner(const sysmodel::Scenario& scenario, const CurveSet& curves,
                  const SolverOptions& opts, double lambda, Plan warm_start) {
  auto score = [&](const Plan& p) {
    return score_of(evaluate(scenario, curves, opts, p), lambda, GreedyCriterion::parametric);
  };
  AoResult out;
  out.plan = std::move(warm_start);
  Score cur = score(out.plan);
  out.objective_trace.push_back(cur.value);

  for (int it = 1; it <= opts.max_ao_iters; ++it) {
    out.iterations = it;
    const Score before = cur;
    const auto rates = rates_of(scenario, out.plan.allocation);

    // Block 1: assignment and sizes at fixed radio resources.
    std::vector<std::vector<std::size_t>> candidates{out.plan.task_of};
    if (opts.assignment_mode == AssignmentMode::exact) {
      candidates.push_back(assign_exact(scenario, curves, opts, lambda, rates).task_of());
    } else {
      auto greedy = assign_greedy(scenario, curves, opts, lambda, rates).task_of();
      const auto s_greedy = score_assignment(scenario, curves, opts, greedy, rates, lambda,
                                             GreedyCriterion::parametric);
      const auto s_cur = score_assignment(scenario, curves, opts, out.plan.task_of, rates, lambda,
                                          GreedyCriterion::parametric);
      candidates.push_back(local_search(scenario, curves, opts, lambda, rates,
                                        improves(s_greedy, s_cur) ? greedy : out.plan.task_of));
    }
    for (const auto& cand : candidates) {
      Plan p = out.plan;
      p.task_of = cand;
      p.kept = size_models(scenario, curves, opts, cand, rates, lambda).kept;
      const Score s = score(p);
      if (improves(s, cur)) {
        out.plan = std::move(p);
        cur = s;
      }
    }

    // Block 2: bandwidth and power at fixed assignment and sizes.
    try {
      Plan p = out.plan;
      p.allocation = allocate(scenario, sc_bits_of(scenario, out.plan), opts);
      const Score s = score(p);
      if (not_worse(s, cur)) {
        out.plan = std::move(p);
        cur = s;
      }
    } catch (const Infeasible&) {
      // Floors of the current sizes do not fit; keep the current radio resources.
    }

    out.objective_trace.push_back(cur.value);
    if (!improves(cur, before)) break;
  }
  out.objective = cur.value;
  return out;
}

Plan initial_plan(const sysmodel::Scenario& scenario, const CurveSet& curves,
                  const SolverOptions& opts) {
  check_inputs(scenario, curves, opts);
  require_enough_clients(scenario);
  Plan plan;
  plan.allocation = allocate_equal(scenario);
  auto rates = rates_of(scenario, plan.allocation);
  auto a = assign_greedy(scenario, curves, opts, 0.0, rates);
  plan.task_of = a.task_of();
  auto sized = size_models(scenario, curves, opts, plan.task_of, rates, 0.0);
  plan.kept = sized.kept;
  if (std::none_of(sized.latency_infeasible.begin(), sized.latency_infeasible.end(),
                   [](bool b) { return b; })) {
    return plan;
  }

  // Equal shares are not enough: size everyone at maximum compression and give
  // bandwidth against those floors.
  const double max_ratio = *std::max_element(opts.ratio_grid.begin(), opts.ratio_grid.end());
  plan.kept.assign(scenario.num_clients(),
                   sysmodel::kept_dims_for_ratio(scenario.hv_dims, max_ratio));
  plan.allocation = allocate(scenario, sc_bits_of(scenario, plan), opts);
  rates = rates_of(scenario, plan.allocation);
  plan.kept = size_models(scenario, curves, opts, plan.task_of, rates, 0.0).kept;
  return plan;
}

SolveResult make_result(const sysmodel::Scenario& scenario, const CurveSet& curves,
                        const SolverOptions& opts, const Plan& plan) {
  const auto ev = evaluate(scenario, curves, opts, plan);
  std::vector<double> costs;
  for (const auto& c : ev.clients) costs.push_back(c.cost);
  const double ratio = sysmodel::cpr(costs, ev.q);
  SolveResult r{
      .assignment = sysmodel::Assignment(scenario.num_tasks(), plan.task_of, plan.kept),
      .allocation = plan.allocation,
      .lambda_trace = {ratio},
      .residual_trace = {0.0},
      .cpr = ratio,
      .cost_sum = ev.cost_sum,
      .rate_sum_bps = ev.rate_sum_bps,
      .q = ev.q,
      .mean_accuracy = ev.mean_accuracy,
      .per_client = ev.clients,
      .per_task_accuracy = ev.task_accuracy,
  };
  r.feasible = ev.violations == 0;
  return r;
}

SolveResult solve(const sysmodel::Scenario& scenario, const CurveSet& curves,
                  const SolverOptions& opts) {
  Plan plan = initial_plan(scenario, curves, opts);
  auto ev = evaluate(scenario, curves, opts, plan);
  if (!(ev.q > 0.0)) throw DegeneratePerformance("solve: Q is zero at the starting point");
  double lambda = ev.cost_sum / ev.q;
  std::vector<double> lambdas{lambda};
  std::vector<double> residuals{0.0};
  int outer = 0;
  int inner = 0;
  for (int it = 1; it <= opts.max_dinkelbach_iters; ++it) {
    auto ao = ao_inner(scenario, curves, opts, lambda, std::move(plan));
    plan = std::move(ao.plan);
    inner += ao.iterations;
    outer = it;
    ev = evaluate(scenario, curves, opts, plan);
    if (!(ev.q > 0.0)) throw DegeneratePerformance("solve: Q dropped to zero");
    const double residual = ev.cost_sum - lambda * ev.q;
    lambda = ev.cost_sum / ev.q;
    lambdas.push_back(lambda);
    residuals.push_back(residual);
    if (std::abs(residual) <= opts.lambda_tol * std::max(1.0, ev.q)) break;
  }
  auto r = make_result(scenario, curves, opts, plan);
  r.lambda_trace = std::move(lambdas);
  r.residual_trace = std::move(residuals);
  r.outer_iters = outer;
  r.inner_iters = inner;
  r.feasible = r.feasible && verify(scenario, curves, opts, r).empty();
  return r;
}

std::vector<std::string> verify(const sysmodel::Scenario& scenario, const CurveSet& curves,
                                const SolverOptions& opts, const SolveResult& result) {
  std::vector<std::string> bad;
  auto report = [&](std::size_t j, const std::string& what) {
    std::ostringstream s;
    s << "client " << j << ": " << what;
    bad.push_back(s.str());
  };
  const std::size_t n = scenario.num_clients();
  const std::size_t m = scenario.num_tasks();
  const std::size_t d = scenario.hv_dims;
  try {
    result.assignment.validate(scenario);
  } catch (const std::exception& e) {
    bad.emplace_back(std::string("assignment: ") + e.what());
    return bad;
  }
  const auto& alloc = result.allocation;
  if (alloc.bandwidth.size() != n || alloc.power.size() != n) {
    bad.emplace_back("allocation: wrong length");
    return bad;
  }

  std::vector<double> rates_units(n), phi(n), costs(n);
  double b_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = result.assignment.task_of(j);
    const std::size_t kept = result.assignment.compressed_dims()[j];
    const double k = static_cast<double>(scenario.classes_of(i));
    const double bits = static_cast<double>(scenario.bits_per_dim);
    const double s0 = k * static_cast<double>(d) * bits;
    const double sc = k * static_cast<double>(kept) * bits;
    if (sc > s0) report(j, "compressed size exceeds the uncompressed size");
    costs[j] = scenario.kappa * (s0 / sc - 1.0);
    if (costs[j] > scenario.clients[j].e_max * (1.0 + 1e-9) + 1e-12) {
      report(j, "compression cost above e_max");
    }
    const double b = alloc.bandwidth[j];
    const double p = alloc.power[j];
    if (!(b >= 0.0)) report(j, "negative bandwidth");
    if (!(p >= 0.0)) report(j, "negative power");
    if (p > scenario.clients[j].p_max_w * (1.0 + 1e-12)) report(j, "power above p_max");
    b_sum += b;
    const double snr = p * scenario.channel[j].gain / (scenario.noise.psd_w_per_hz() * b);
    const double r = b > 0.0 && p > 0.0 ? b * std::log2(1.0 + snr) : 0.0;
    if (!(r > 0.0) || sc / r > scenario.t_max_s * (1.0 + 1e-6)) {
      report(j, "transmission time above t_max");
    }
    rates_units[j] = r / opts.rate_unit_bps;
    phi[j] = curves.at(i).at(static_cast<double>(d) / static_cast<double>(kept));
  }
  if (b_sum > scenario.b_max_hz * (1.0 + 1e-9)) bad.emplace_back("bandwidth budget exceeded");

  // Q and the ratio, recomputed with plain loops.
  double r_sum = 0.0;
  std::vector<double> acc(m, 0.0), cnt(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    r_sum += rates_units[j];
    acc[result.assignment.task_of(j)] += phi[j];
    cnt[result.assignment.task_of(j)] += 1.0;
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) mean += acc[i] / cnt[i];
  mean /= static_cast<double>(m);
  const double q = r_sum * mean;
  double e_sum = 0.0;
  for (double e : costs) e_sum += e;
  const double ratio = q > 0.0 ? e_sum / q : std::numeric_limits<double>::infinity();
  if (!(std::abs(ratio - result.cpr) <= 1e-6 * std::max(1e-12, std::abs(ratio)))) {
    std::ostringstream s;
    s << "reported ratio " << result.cpr << " differs from recomputed " << ratio;
    bad.push_back(s.str());
  }
  for (std::size_t t = 1; t < result.lambda_trace.size(); ++t) {
    const double prev = result.lambda_trace[t - 1];
    if (result.lambda_trace[t] > prev + 1e-9 * std::max(1.0, std::abs(prev))) {
      std::ostringstream s;
      s << "lambda increased at iteration " << t;
      bad.push_back(s.str());
    }
  }
  return bad;
}

std::vector<std::pair<std::string, std::string>> summary_record(const SolveResult& result) {
  return {
      {"cpr", csv::format_double(result.cpr)},
      {"rate_sum_bps", csv::format_double(result.rate_sum_bps)},
      {"mean_accuracy", csv::format_double(result.mean_accuracy)},
      {"cost_sum", csv::format_double(result.cost_sum)},
      {"outer_iters", std::to_string(result.outer_iters)},
      {"inner_iters", std::to_string(result.inner_iters)},
      {"feasible", result.feasible ? "1" : "0"},
  };
}

}  // namespace ilac::solver
