// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "ilac/hdc/ops.hpp"
#include "ilac/radio.hpp"
#include "ilac/runner.hpp"
#include "ilac/solver.hpp"
#include "ilac/sysmodel.hpp"
#include "oracles/allocation_oracle.hpp"
#include "oracles/assignment_oracle.hpp"
#include "oracles/hdc_oracle.hpp"
#include "support.hpp"

using namespace ilac;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) {
    o.pass = false;
    o.detail << " [runtime " << secs << " s over " << limit_s << " s]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s:%s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool near_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

runner::RunConfig default_config() {
  auto c = runner::load_config(ILAC_DEFAULT_CONFIG);
  c.curve_cache.clear();
  c.validate();
  return c;
}

}  // namespace

int main() {
  criterion(1, "HDC robustness to 33% flips", 10.0, [](Outcome& o) {
    constexpr std::size_t kDims = 10000, kBook = 100, kTrials = 1000;
    std::vector<hdc::Hypervector> book;
    for (std::size_t i = 0; i < kBook; ++i) book.push_back(hdc::random_hv(derive_key(1, "codebook", i), kDims));
    std::size_t correct = 0;
    for (std::size_t t = 0; t < kTrials; ++t) {
      const std::size_t target = t % kBook;
      const auto noisy = oracle::flip_exact(book[target], 3300, derive_key(1, "flip", t));
      std::size_t best = 0;
      double best_s = -1.0;
      for (std::size_t i = 0; i < kBook; ++i) {
        const double s = hdc::hamming_similarity(noisy, book[i]);
        if (s > best_s) {
          best_s = s;
          best = i;
        }
      }
      correct += best == target ? 1 : 0;
    }
    o.detail << " " << correct << "/" << kTrials << " retrieved";
    o.require(correct >= 999, "fewer than 999 correct");
  });

  criterion(2, "near-orthogonality of random HVs", 5.0, [](Outcome& o) {
    std::vector<double> v;
    for (std::size_t p = 0; p < 1000; ++p) {
      v.push_back(hdc::cosine_similarity(hdc::random_hv(derive_key(2, "a", p), 10000),
                                         hdc::random_hv(derive_key(2, "b", p), 10000)));
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / 1000.0;
    double ss = 0.0, max_abs = 0.0;
    for (double x : v) {
      ss += (x - mean) * (x - mean);
      max_abs = std::max(max_abs, std::abs(x));
    }
    const double sd = std::sqrt(ss / 999.0);
    o.detail << " std " << sd << ", max |cos| " << max_abs;
    o.require(sd >= 0.008 && sd <= 0.012, "std outside [0.008, 0.012]");
    o.require(max_abs <= 0.06, "max |cos| above 0.06");
  });

  criterion(3, "HDC classification on the default blob task", 30.0, [](Outcome& o) {
    taskdata::TaskSpec task;
    sysmodel::CurveOptions opts;
    opts.ratio_grid = {1.0, 2.0};
    opts.seeds.resize(10);
    std::iota(opts.seeds.begin(), opts.seeds.end(), 1);
    const auto acc = sysmodel::measure_accuracy(task, opts);
    o.detail << " accuracy(1) " << acc[0] << ", accuracy(2) " << acc[1];
    o.require(acc[0] >= 0.95, "accuracy(1) below 0.95");
    o.require(acc[1] <= acc[0], "ratio 2 more accurate than ratio 1");
  });

  criterion(4, "Dinkelbach lambda monotonicity", 120.0, [](Outcome& o) {
    auto config = default_config();
    const auto curves = runner::build_curves(config);
    std::size_t solved = 0, skipped = 0;
    double worst_rise = 0.0, worst_gap = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      config.seed = seed;
      const auto s = runner::build_scenario(config, 1e6 * static_cast<double>(1 + (seed - 1) % 10));
      std::optional<solver::SolveResult> solved_r;
      try {
        solved_r = solver::solve(s, curves, config.solver);
      } catch (const Infeasible&) {
        ++skipped;
        continue;
      }
      const auto& r = *solved_r;
      ++solved;
      for (std::size_t i = 2; i < r.lambda_trace.size(); ++i) {
        worst_rise = std::max(worst_rise, r.lambda_trace[i] - r.lambda_trace[i - 1]);
      }
      worst_gap = std::max(worst_gap, std::abs(r.cpr - r.lambda_trace.back()));
    }
    o.detail << " " << solved << " solved, " << skipped << " infeasible; max rise " << worst_rise
             << ", max |cpr - lambda| " << worst_gap;
    o.require(solved == 20, "not every scenario solved");
    o.require(worst_rise <= 1e-9, "lambda increased");
    o.require(worst_gap <= 1e-6, "final CPR differs from final lambda");
  });

  criterion(5, "exact assignment vs brute force; greedy bound", 60.0, [](Outcome& o) {
    constexpr double kBound = 1.10;
    const std::vector<double> grid{1, 1.5, 2, 4, 8};
    solver::SolverOptions opts;
    opts.ratio_grid = grid;
    std::size_t instances = 0, matched = 0, greedy_feasible = 0, compared = 0;
    double worst_ratio = 0.0;
    for (std::size_t n : {4u, 5u, 6u}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto curves = ilac::testing::synthetic_curves(2, grid, seed);
        const auto s = ilac::testing::make_scenario({10, 20}, n, seed, 1e6 * static_cast<double>(seed));
        const auto rates = solver::rates_of(s, solver::allocate_equal(s));
        for (double lambda : {0.0, 0.5, 3.0, 20.0}) {
          ++instances;
          const auto best = oracle::brute_force_joint(s, curves, grid, rates, lambda, opts.rate_unit_bps);
          const auto e = solver::assign_exact(s, curves, opts, lambda, rates);
          const auto g = solver::assign_greedy(s, curves, opts, lambda, rates);
          greedy_feasible += sysmodel::assignment_feasible(g.task_of(), 2) ? 1 : 0;
          if (!best.found) {
            ++matched;  // neither side has a latency-feasible point; nothing to compare
            continue;
          }
          const double v = oracle::joint_objective(s, curves, e.task_of(), e.compressed_dims(), rates,
                                                   lambda, opts.rate_unit_bps);
          matched += v == best.objective ? 1 : 0;
        }
        auto g_opts = opts;
        g_opts.ratio_grid = ilac::testing::wide_grid();
        auto e_opts = g_opts;
        e_opts.assignment_mode = solver::AssignmentMode::exact;
        const auto wide = ilac::testing::synthetic_curves(2, g_opts.ratio_grid, seed);
        const auto gr = solver::solve(s, wide, g_opts);
        const auto ex = solver::solve(s, wide, e_opts);
        ++compared;
        worst_ratio = std::max(worst_ratio, gr.cpr / ex.cpr);
      }
    }
    o.detail << " " << matched << "/" << instances << " exact matches, greedy feasible "
             << greedy_feasible << "/" << instances << ", worst greedy/exact CPR " << worst_ratio
             << " over " << compared << " solves";
    o.require(matched == instances, "exact differs from the oracle");
    o.require(greedy_feasible == instances, "greedy infeasible");
    o.require(worst_ratio <= kBound, "greedy CPR above the bound");
  });

  criterion(6, "bandwidth allocator vs grid oracle and KKT", 10.0, [](Outcome& o) {
    const solver::SolverOptions opts;
    const auto two = ilac::testing::make_gain_scenario({10}, {1e-9, 7e-9}, 5e6);
    const std::vector<double> none{0.0, 0.0};
    const auto a2 = solver::allocate(two, none, opts);
    const auto grid = oracle::grid_split(two.snr_bandwidth(0), two.snr_bandwidth(1), 5e6);
    const double err2 = std::abs(a2.bandwidth[0] - grid.b1);
    o.require(err2 <= 1e-3 * 5e6, "N = 2 split off the grid optimum");

    const auto four = ilac::testing::make_gain_scenario({10, 10}, std::vector<double>(4, 3e-9), 4e6);
    const std::vector<double> sizes(4, 1e5);
    const auto a4 = solver::allocate(four, sizes, opts);
    double err4 = 0.0;
    for (double b : a4.bandwidth) err4 = std::max(err4, std::abs(b - 1e6));
    o.require(err4 <= 1e-9 * 4e6, "N = 4 symmetric split unequal");

    const auto mixed = ilac::testing::make_scenario({10, 20, 30}, 10, 6, 6e6);
    std::vector<double> floors(10, 0.0);
    floors[1] = 8e5;
    floors[4] = 1.2e6;
    const auto a = solver::allocate(mixed, floors, opts);
    std::vector<double> marg;
    for (std::size_t j = 0; j < 10; ++j) {
      const double c = mixed.snr_bandwidth(j);
      if (a.bandwidth[j] > solver::min_bandwidth(c, floors[j] / mixed.t_max_s) * (1 + 1e-9)) {
        const double x = c / a.bandwidth[j];
        marg.push_back((std::log1p(x) - x / (1 + x)) / std::log(2.0));
      }
    }
    double kkt = 0.0;
    for (double m : marg) kkt = std::max(kkt, std::abs(m - marg.front()) / marg.front());
    o.detail << " N=2 error " << err2 << " Hz, N=4 error " << err4 << " Hz, KKT spread " << kkt
             << " over " << marg.size() << " interior clients";
    o.require(marg.size() >= 2, "fewer than two interior clients");
    o.require(kkt <= 1e-6, "marginal rates differ");
  });

  criterion(7, "trend on the default sweep", 600.0, [](Outcome& o) {
    const auto config = default_config();
    const auto dir = std::filesystem::temp_directory_path() / "ilac_acceptance_run1";
    std::filesystem::remove_all(dir);
    const auto result = runner::run(config);
    runner::write_csv(result, config, dir);
    std::vector<double> dual, comm, learn;
    for (const auto& p : result.points) {
      const double v = p.result ? p.result->cpr : std::nan("");
      (p.mode == runner::Mode::dual ? dual : p.mode == runner::Mode::comm_only ? comm : learn).push_back(v);
    }
    bool decreasing = true, below = true;
    for (std::size_t k = 0; k < dual.size(); ++k) {
      if (!std::isfinite(dual[k])) decreasing = below = false;
      if (k > 0 && !(dual[k] < dual[k - 1])) decreasing = false;
      if (!(dual[k] <= comm[k]) || !(dual[k] <= learn[k])) below = false;
    }
    o.detail << " dual CPR";
    for (double v : dual) o.detail << ' ' << v;
    o.require(decreasing, "dual CPR not strictly decreasing");
    o.require(below, "dual CPR above a baseline");
  });

  criterion(8, "closed-form calculators", 1.0, [](Outcome& o) {
    o.require(near_rel(radio::path_loss_db(1.0), 128.1, 1e-12), "path loss 1 km");
    o.require(near_rel(radio::path_loss_db(10.0), 165.7, 1e-12), "path loss 10 km");
    o.require(near_rel(radio::path_loss_db(0.1), 90.5, 1e-12), "path loss 0.1 km");
    const radio::NoiseModel noise;
    const double n0 = noise.psd_w_per_hz();
    o.require(near_rel(radio::rate(1e6, 1.0, 1e6 * n0, noise), 1e6, 1e-12), "rate at unit SNR");
    o.require(radio::rate(1e6, 0.0, 1e-9, noise) == 0.0, "rate at zero power");
    o.require(near_rel(radio::tx_time(1e6, 2e6), 0.5, 1e-15), "tx time");
    o.require(radio::tx_time(0.0, 2e6) == 0.0, "tx time of nothing");
    o.require(near_rel(radio::tx_time(3e5, 3e5), 1.0, 1e-15), "tx time size = rate");
    o.require(near_rel(radio::fl_round_time(1, 1e6, 1e6, 0.5), 3.5, 1e-15), "FL round");
    o.require(near_rel(radio::fl_round_time(1, 0, 1e6, 0.5), 1.5, 1e-15), "FL round, no model");
    o.require(near_rel(radio::fl_round_time(0, 7e5, 7e5, 0), 2.0, 1e-15), "FL round, s = r");
    o.require(near_rel(radio::sl_round_time(1, 1e3, 10, 1e4, 2, 0.5, 1e4), 5.0, 1e-15), "SL round");
    o.require(near_rel(radio::sl_round_time(1, 1e3, 10, 1e4, 2, 0.0, 1e4), 3.0, 1e-15), "SL round, beta 0");
    o.require(near_rel(radio::sl_round_time(1, 0, 10, 1e4, 2, 0.0, 1e4), 1.0, 1e-15), "SL round, no data");
    o.require(near_rel(radio::comm_overhead(10, radio::FlPayload{5, 1e3}), 1e5, 1e-15), "FL overhead");
    o.require(near_rel(radio::comm_overhead(1, radio::SlPayload{100, 8, 2, 0.5, 1e3}), 3600, 1e-15),
              "SL overhead");
    o.require(radio::comm_overhead(0, radio::FlPayload{5, 1e3}) == 0.0, "zero rounds");
    o.detail << " 17 examples checked";
  });

  criterion(9, "byte-identical reruns of the default experiment", 1200.0, [](Outcome& o) {
    const auto config = default_config();
    const auto dir1 = std::filesystem::temp_directory_path() / "ilac_acceptance_run1";
    const auto dir2 = std::filesystem::temp_directory_path() / "ilac_acceptance_run2";
    if (!std::filesystem::exists(dir1 / "summary.csv")) runner::write_csv(runner::run(config), config, dir1);
    std::filesystem::remove_all(dir2);
    runner::write_csv(runner::run(config), config, dir2);
    const bool same_summary = slurp(dir1 / "summary.csv") == slurp(dir2 / "summary.csv");
    const bool same_trace = slurp(dir1 / "trace.csv") == slurp(dir2 / "trace.csv");
    o.detail << " summary " << (same_summary ? "identical" : "differs") << ", trace "
             << (same_trace ? "identical" : "differs");
    o.require(same_summary && same_trace, "outputs differ");
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
  });

  return failures == 0 ? 0 : 1;
}
