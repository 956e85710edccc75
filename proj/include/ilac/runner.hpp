#pragma once

// Experiment driver: config parsing, scenario construction, accuracy-curve caching,
// baseline modes, bandwidth sweeps and CSV output.
//
// Config files are flat `key = value` lines; `#` starts a comment. Lists are
// comma separated. Unknown keys are errors.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ilac/error.hpp"
#include "ilac/solver.hpp"
#include "ilac/sysmodel.hpp"

namespace ilac::runner {

// Bad key, bad value or inconsistent settings.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Mode { dual, comm_only, learn_only };

const char* to_string(Mode m) noexcept;
Mode parse_mode(std::string_view s);

struct RunConfig {
  // Scenario
  std::size_t clients = 12;
  std::vector<std::size_t> task_classes{10, 20, 30, 40, 50};
  std::size_t feature_dim = 64;
  std::size_t samples_per_class = 50;
  double separation = 6.0;
  double noise_std = 1.0;
  double train_fraction = 0.8;
  double area_m = 100.0;
  double min_distance_m = 1.0;
  double p_max_w = 0.2;
  double e_max = 15.0;
  double t_max_s = 0.5;
  std::size_t hv_dims = 10000;
  double noise_psd_dbm_per_hz = -134.0;
  double kappa = 1.0;
  unsigned bits_per_dim = 16;
  bool binarize = false;
  // Sign-flip probability of the binary-symmetric channel applied to transmitted models.
  double bsc_flip_prob = 0.0;

  // Experiment
  std::vector<double> sweep_hz{1e6, 2e6, 3e6, 4e6, 5e6, 6e6, 7e6, 8e6, 9e6, 10e6};
  std::vector<Mode> modes{Mode::dual, Mode::comm_only, Mode::learn_only};
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string curve_cache;  // empty: always measure
  std::size_t curve_seeds = 3;
  bool parallel = true;

  solver::SolverOptions solver = default_solver_options();

  static solver::SolverOptions default_solver_options();

  // Applies one `key=value` setting. Throws ConfigError.
  void set(std::string_view key, std::string_view value);
  // Throws ConfigError.
  void validate() const;
};

RunConfig parse_config(std::istream& in);
// Throws IoError if the file cannot be opened.
RunConfig load_config(const std::filesystem::path& path);
// Applies "key=value" overrides in order.
void apply_overrides(RunConfig& config, const std::vector<std::string>& overrides);

// Scenario at the given bandwidth budget (clients placed from config.seed).
sysmodel::Scenario build_scenario(const RunConfig& config, double b_max_hz);
sysmodel::CurveOptions curve_options(const RunConfig& config);

// Measures one curve per task, or loads them from config.curve_cache when the file
// exists and matches the tasks and ratio grid. A fresh measurement is written to the
// cache path if one is set.
solver::CurveSet build_curves(const RunConfig& config);

// Communication-only and learning-only reference points; CPR is evaluated after the
// fact and `feasible` reports whether every constraint holds.
solver::SolveResult solve_baseline(Mode mode, const sysmodel::Scenario& scenario,
                                   const solver::CurveSet& curves,
                                   const solver::SolverOptions& opts);

struct PointResult {
  Mode mode = Mode::dual;
  double b_max_hz = 0.0;
  std::optional<solver::SolveResult> result;  // empty when the point is infeasible
  std::string error;

  bool feasible() const { return result && result->feasible; }
};

struct ExperimentResult {
  std::vector<PointResult> points;  // ordered by mode (config order), then b_max

  std::size_t feasible_points() const;
};

ExperimentResult run(const RunConfig& config, const solver::CurveSet& curves);
ExperimentResult run(const RunConfig& config);

inline constexpr std::string_view kSummaryHeader =
    "mode,b_max_hz,cpr,rate_sum_bps,mean_accuracy,cost_sum,outer_iters,inner_iters,feasible";
inline constexpr std::string_view kTraceHeader =
    "mode,b_max_hz,iteration,lambda,objective_residual";
inline constexpr std::string_view kClientsHeader =
    "mode,b_max_hz,client,task,kept_dims,hv_dims,s0_bits,sc_bits,kappa,cost,e_max,"
    "bandwidth_hz,power_w,p_max_w,gain,noise_w_per_hz,rate_bps,tx_time_s,t_max_s,accuracy,"
    "rate_unit_bps";

void write_summary(std::ostream& out, const ExperimentResult& result);
void write_trace(std::ostream& out, const ExperimentResult& result);
// Per-client detail; needs the config to recover the scenario of every point.
void write_clients(std::ostream& out, const ExperimentResult& result, const RunConfig& config);

struct OutputFiles {
  std::filesystem::path summary;
  std::filesystem::path trace;
  std::filesystem::path clients;
};

// Creates `dir` if needed. Throws IoError naming the offending path.
OutputFiles write_csv(const ExperimentResult& result, const RunConfig& config,
                      const std::filesystem::path& dir);

struct VerifyReport {
  std::size_t rows_checked = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

// Re-checks every constraint of each feasible summary row against clients.csv in the
// same directory, recomputing rates, times, costs and the ratio from the raw columns.
VerifyReport verify_outputs(const std::filesystem::path& summary_csv);

}  // namespace ilac::runner
