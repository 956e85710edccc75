#include "ilac/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ilac/csv.hpp"
#include "ilac/rng.hpp"

namespace ilac::runner {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string key_error(std::string_view key, std::string_view what) {
  return "config: " + std::string(key) + ": " + std::string(what);
}

double as_double(std::string_view key, std::string_view v) {
  try {
    return csv::parse_double(v, key);
  } catch (const InvalidArgument&) {
    throw ConfigError(key_error(key, "expected a number, got '" + std::string(v) + "'"));
  }
}

std::uint64_t as_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end || v.empty()) {
    throw ConfigError(key_error(key, "expected a nonnegative integer, got '" + std::string(v) + "'"));
  }
  return out;
}

std::size_t as_size(std::string_view key, std::string_view v) {
  return static_cast<std::size_t>(as_u64(key, v));
}

bool as_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key_error(key, "expected a boolean, got '" + std::string(v) + "'"));
}

std::vector<double> as_doubles(std::string_view key, std::string_view v) {
  std::vector<double> out;
  for (auto f : split_list(v)) out.push_back(as_double(key, f));
  return out;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

bool curves_match(const solver::CurveSet& curves, const RunConfig& config) {
  if (curves.size() != config.task_classes.size()) return false;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (curves[i].task_id != static_cast<int>(i)) return false;
    if (curves[i].ratios != config.solver.ratio_grid) return false;
  }
  return true;
}

taskdata::TaskSpec task_spec(const RunConfig& config, std::size_t i) {
  taskdata::TaskSpec t;
  t.task_id = static_cast<int>(i);
  t.classes = config.task_classes[i];
  t.feature_dim = config.feature_dim;
  t.samples_per_class = config.samples_per_class;
  t.separation = config.separation;
  t.noise_std = config.noise_std;
  return t;
}

std::string nan_or(const std::optional<solver::SolveResult>& r, double solver::SolveResult::*field) {
  return csv::format_double(r ? (*r).*field : std::nan(""));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing", path.string());
  return f;
}

void close_out(std::ofstream& f, const std::filesystem::path& path) {
  f.close();
  if (!f) throw IoError("write failed", path.string());
}

}  // namespace

const char* to_string(Mode m) noexcept {
  switch (m) {
    case Mode::dual:
      return "dual";
    case Mode::comm_only:
      return "comm_only";
    case Mode::learn_only:
      return "learn_only";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  if (s == "dual") return Mode::dual;
  if (s == "comm_only") return Mode::comm_only;
  if (s == "learn_only") return Mode::learn_only;
  throw ConfigError("config: unknown mode '" + std::string(s) + "'");
}

solver::SolverOptions RunConfig::default_solver_options() {
  solver::SolverOptions o;
  o.ratio_grid = {1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0};
  return o;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const auto v = trim(raw);
  if (key == "clients") {
    clients = as_size(key, v);
  } else if (key == "tasks") {
    task_classes.clear();
    for (auto f : split_list(v)) task_classes.push_back(as_size(key, f));
  } else if (key == "feature_dim") {
    feature_dim = as_size(key, v);
  } else if (key == "samples_per_class") {
    samples_per_class = as_size(key, v);
  } else if (key == "separation") {
    separation = as_double(key, v);
  } else if (key == "noise_std") {
    noise_std = as_double(key, v);
  } else if (key == "train_fraction") {
    train_fraction = as_double(key, v);
  } else if (key == "area_m") {
    area_m = as_double(key, v);
  } else if (key == "min_distance_m") {
    min_distance_m = as_double(key, v);
  } else if (key == "p_max_w") {
    p_max_w = as_double(key, v);
  } else if (key == "e_max") {
    e_max = as_double(key, v);
  } else if (key == "t_max_s") {
    t_max_s = as_double(key, v);
  } else if (key == "hv_dims") {
    hv_dims = as_size(key, v);
  } else if (key == "noise_psd_dbm_per_hz") {
    noise_psd_dbm_per_hz = as_double(key, v);
  } else if (key == "kappa") {
    kappa = as_double(key, v);
  } else if (key == "bits_per_dim") {
    bits_per_dim = static_cast<unsigned>(as_size(key, v));
  } else if (key == "binarize") {
    binarize = as_bool(key, v);
  } else if (key == "bsc_flip_prob") {
    bsc_flip_prob = as_double(key, v);
  } else if (key == "sweep_hz") {
    sweep_hz = as_doubles(key, v);
  } else if (key == "modes") {
    modes.clear();
    for (auto f : split_list(v)) modes.push_back(parse_mode(f));
  } else if (key == "seed") {
    seed = as_u64(key, v);
  } else if (key == "out_dir") {
    out_dir = std::string(v);
  } else if (key == "curve_cache") {
    curve_cache = std::string(v);
  } else if (key == "curve_seeds") {
    curve_seeds = as_size(key, v);
  } else if (key == "parallel") {
    parallel = as_bool(key, v);
  } else if (key == "lambda_tol") {
    solver.lambda_tol = as_double(key, v);
  } else if (key == "max_dinkelbach_iters") {
    solver.max_dinkelbach_iters = static_cast<int>(as_size(key, v));
  } else if (key == "max_ao_iters") {
    solver.max_ao_iters = static_cast<int>(as_size(key, v));
  } else if (key == "ratio_grid") {
    solver.ratio_grid = as_doubles(key, v);
  } else if (key == "assignment_mode") {
    if (v == "greedy") {
      solver.assignment_mode = solver::AssignmentMode::greedy;
    } else if (v == "exact") {
      solver.assignment_mode = solver::AssignmentMode::exact;
    } else {
      throw ConfigError(key_error(key, "expected greedy or exact"));
    }
  } else if (key == "bisection_tol") {
    solver.bisection_tol = as_double(key, v);
  } else if (key == "rate_unit_bps") {
    solver.rate_unit_bps = as_double(key, v);
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  if (task_classes.empty()) throw ConfigError("config: tasks: at least one task required");
  for (auto k : task_classes) {
    if (k < 2) throw ConfigError("config: tasks: every task needs at least 2 classes");
  }
  if (clients < 2 * task_classes.size()) {
    throw ConfigError("config: clients: need at least two clients per task");
  }
  if (sweep_hz.empty()) throw ConfigError("config: sweep_hz: sweep is empty");
  if (!strictly_increasing(sweep_hz)) {
    throw ConfigError("config: sweep_hz: must be strictly increasing");
  }
  if (!(sweep_hz.front() > 0.0)) throw ConfigError("config: sweep_hz: budgets must be positive");
  if (modes.empty()) throw ConfigError("config: modes: at least one mode required");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (modes[i] == modes[k]) throw ConfigError("config: modes: duplicate mode");
    }
  }
  if (curve_seeds == 0) throw ConfigError("config: curve_seeds: must be positive");
  if (hv_dims == 0) throw ConfigError("config: hv_dims: must be positive");
  if (bits_per_dim == 0) throw ConfigError("config: bits_per_dim: must be positive");
  if (!(t_max_s > 0.0)) throw ConfigError("config: t_max_s: must be positive");
  if (!(p_max_w > 0.0)) throw ConfigError("config: p_max_w: must be positive");
  if (!(e_max >= 0.0)) throw ConfigError("config: e_max: must be nonnegative");
  if (!(kappa >= 0.0)) throw ConfigError("config: kappa: must be nonnegative");
  if (!(bsc_flip_prob >= 0.0 && bsc_flip_prob <= 1.0)) {
    throw ConfigError("config: bsc_flip_prob: must lie in [0, 1]");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("config: train_fraction: must be in (0, 1)");
  }
  if (!strictly_increasing(solver.ratio_grid) || solver.ratio_grid.empty() ||
      solver.ratio_grid.front() != 1.0) {
    throw ConfigError("config: ratio_grid: must be strictly increasing and start at 1");
  }
  try {
    solver.validate();
    for (std::size_t i = 0; i < task_classes.size(); ++i) task_spec(*this, i).validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) + ": expected key = value");
    }
    config.set(trim(v.substr(0, eq)), v.substr(eq + 1));
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config", path.string());
  return parse_config(f);
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("config: override '" + o + "' is not key=value");
    config.set(trim(std::string_view(o).substr(0, eq)), std::string_view(o).substr(eq + 1));
  }
}

sysmodel::Scenario build_scenario(const RunConfig& config, double b_max_hz) {
  sysmodel::Scenario s;
  for (std::size_t i = 0; i < config.task_classes.size(); ++i) s.tasks.push_back(task_spec(config, i));
  sysmodel::Layout layout;
  layout.clients = config.clients;
  layout.area_m = config.area_m;
  layout.min_distance_m = config.min_distance_m;
  layout.p_max_w = config.p_max_w;
  layout.e_max = config.e_max;
  sysmodel::place_clients(s, layout, config.seed);
  s.b_max_hz = b_max_hz;
  s.t_max_s = config.t_max_s;
  s.hv_dims = config.hv_dims;
  s.noise.psd_dbm_per_hz = config.noise_psd_dbm_per_hz;
  s.kappa = config.kappa;
  s.bits_per_dim = config.binarize ? 1u : config.bits_per_dim;
  s.validate();
  return s;
}

sysmodel::CurveOptions curve_options(const RunConfig& config) {
  sysmodel::CurveOptions o;
  o.ratio_grid = config.solver.ratio_grid;
  o.seeds.clear();
  for (std::size_t s = 0; s < config.curve_seeds; ++s) {
    o.seeds.push_back(derive_key(config.seed, "curve", s));
  }
  o.hdc.dims = config.hv_dims;
  o.hdc.binarize = config.binarize;
  o.train_fraction = config.train_fraction;
  o.flip_prob = config.bsc_flip_prob;
  return o;
}

solver::CurveSet build_curves(const RunConfig& config) {
  if (!config.curve_cache.empty() && std::filesystem::exists(config.curve_cache)) {
    std::ifstream f(config.curve_cache);
    if (!f) throw IoError("cannot open curve cache", config.curve_cache);
    auto cached = sysmodel::read_curves_csv(f);
    if (curves_match(cached, config)) return cached;
  }
  const auto opts = curve_options(config);
  solver::CurveSet curves;
  for (std::size_t i = 0; i < config.task_classes.size(); ++i) {
    curves.push_back(sysmodel::build_accuracy_curve(task_spec(config, i), opts));
  }
  if (!config.curve_cache.empty()) {
    const std::filesystem::path path(config.curve_cache);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto f = open_out(path);
    sysmodel::write_curves_csv(f, curves);
    close_out(f, path);
  }
  return curves;
}

solver::SolveResult solve_baseline(Mode mode, const sysmodel::Scenario& scenario,
                                   const solver::CurveSet& curves,
                                   const solver::SolverOptions& opts) {
  opts.validate();
  scenario.validate();
  if (curves.size() != scenario.num_tasks()) {
    throw InvalidArgument("solve_baseline: one accuracy curve per task required");
  }
  solver::Plan plan;
  solver::GreedyCriterion criterion;
  switch (mode) {
    case Mode::comm_only:
      plan.allocation = solver::allocate_unfloored(scenario);
      criterion = solver::GreedyCriterion::rate_only;
      break;
    case Mode::learn_only:
      plan.allocation = solver::allocate_equal(scenario);
      criterion = solver::GreedyCriterion::accuracy_only;
      break;
    default:
      throw InvalidArgument("solve_baseline: not a baseline mode");
  }
  const auto rates = solver::rates_of(scenario, plan.allocation);
  const auto a = solver::assign_greedy(scenario, curves, opts, 0.0, rates, criterion);
  plan.task_of = a.task_of();
  plan.kept = a.compressed_dims();
  return solver::make_result(scenario, curves, opts, plan);
}

std::size_t ExperimentResult::feasible_points() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const PointResult& p) { return p.feasible(); }));
}

ExperimentResult run(const RunConfig& config, const solver::CurveSet& curves) {
  config.validate();
  ExperimentResult result;
  for (auto m : config.modes) {
    for (double b : config.sweep_hz) result.points.push_back({m, b, std::nullopt, {}});
  }
  const auto n = static_cast<std::ptrdiff_t>(result.points.size());
#pragma omp parallel for schedule(dynamic, 1) if (config.parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    auto& p = result.points[static_cast<std::size_t>(k)];
    try {
      const auto scenario = build_scenario(config, p.b_max_hz);
      p.result = p.mode == Mode::dual ? solver::solve(scenario, curves, config.solver)
                                      : solve_baseline(p.mode, scenario, curves, config.solver);
    } catch (const std::exception& e) {
      p.result.reset();
      p.error = e.what();
    }
  }
  return result;
}

ExperimentResult run(const RunConfig& config) {
  config.validate();
  return run(config, build_curves(config));
}

void write_summary(std::ostream& out, const ExperimentResult& result) {
  out << kSummaryHeader << '\n';
  for (const auto& p : result.points) {
    const auto& r = p.result;
    out << to_string(p.mode) << ',' << csv::format_double(p.b_max_hz) << ','
        << nan_or(r, &solver::SolveResult::cpr) << ','
        << nan_or(r, &solver::SolveResult::rate_sum_bps) << ','
        << nan_or(r, &solver::SolveResult::mean_accuracy) << ','
        << nan_or(r, &solver::SolveResult::cost_sum) << ',' << (r ? r->outer_iters : 0) << ','
        << (r ? r->inner_iters : 0) << ',' << (p.feasible() ? 1 : 0) << '\n';
  }
}

void write_trace(std::ostream& out, const ExperimentResult& result) {
  out << kTraceHeader << '\n';
  for (const auto& p : result.points) {
    if (!p.result) continue;
    const auto& r = *p.result;
    for (std::size_t i = 0; i < r.lambda_trace.size(); ++i) {
      out << to_string(p.mode) << ',' << csv::format_double(p.b_max_hz) << ',' << i << ','
          << csv::format_double(r.lambda_trace[i]) << ','
          << csv::format_double(r.residual_trace[i]) << '\n';
    }
  }
}

void write_clients(std::ostream& out, const ExperimentResult& result, const RunConfig& config) {
  out << kClientsHeader << '\n';
  for (const auto& p : result.points) {
    if (!p.result) continue;
    const auto scenario = build_scenario(config, p.b_max_hz);
    const auto& r = *p.result;
    const double n0 = scenario.noise.psd_w_per_hz();
    for (std::size_t j = 0; j < r.per_client.size(); ++j) {
      const auto& c = r.per_client[j];
      const auto f = [](double v) { return csv::format_double(v); };
      out << to_string(p.mode) << ',' << f(p.b_max_hz) << ',' << j << ',' << c.task << ','
          << c.kept_dims << ',' << scenario.hv_dims << ',' << f(c.s0_bits) << ','
          << f(c.sc_bits) << ',' << f(scenario.kappa) << ',' << f(c.cost) << ','
          << f(scenario.clients[j].e_max) << ',' << f(c.bandwidth_hz) << ',' << f(c.power_w)
          << ',' << f(scenario.clients[j].p_max_w) << ',' << f(scenario.channel[j].gain) << ','
          << f(n0) << ',' << f(c.rate_bps) << ',' << f(c.tx_time_s) << ','
          << f(scenario.t_max_s) << ',' << f(c.accuracy) << ','
          << f(config.solver.rate_unit_bps) << '\n';
    }
  }
}

OutputFiles write_csv(const ExperimentResult& result, const RunConfig& config,
                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory", dir.string());
  }
  OutputFiles files{dir / "summary.csv", dir / "trace.csv", dir / "clients.csv"};
  // Format in memory so a failure cannot leave a half-written file behind.
  std::ostringstream summary, trace, clients;
  write_summary(summary, result);
  write_trace(trace, result);
  write_clients(clients, result, config);
  const std::pair<const std::filesystem::path*, std::string> outputs[] = {
      {&files.summary, summary.str()},
      {&files.trace, trace.str()},
      {&files.clients, clients.str()},
  };
  for (const auto& [path, text] : outputs) {
    auto f = open_out(*path);
    f << text;
    close_out(f, *path);
  }
  return files;
}

VerifyReport verify_outputs(const std::filesystem::path& summary_csv) {
  const auto read_table = [](const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) throw IoError("cannot open", p.string());
    return csv::read(f);
  };
  const auto summary = read_table(summary_csv);
  const auto clients_path = summary_csv.parent_path() / "clients.csv";
  const auto clients = read_table(clients_path);

  VerifyReport report;
  const auto num = [](const std::vector<std::string>& row, std::size_t col) {
    return csv::parse_double(row[col], "value");
  };
  const auto close = [](double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-300;
  };

  std::map<std::pair<std::string, std::string>, std::vector<const std::vector<std::string>*>> by_point;
  const auto c_mode = clients.column("mode");
  const auto c_b = clients.column("b_max_hz");
  for (const auto& row : clients.rows) by_point[{row[c_mode], row[c_b]}].push_back(&row);

  const auto s_mode = summary.column("mode");
  const auto s_b = summary.column("b_max_hz");
  const auto s_feasible = summary.column("feasible");
  for (const auto& row : summary.rows) {
    if (row[s_feasible] != "1") continue;
    ++report.rows_checked;
    const std::string tag = row[s_mode] + "@" + row[s_b] + ": ";
    auto problem = [&](const std::string& what) { report.problems.push_back(tag + what); };
    const auto it = by_point.find({row[s_mode], row[s_b]});
    if (it == by_point.end()) {
      problem("no client rows");
      continue;
    }
    const auto& rows = it->second;
    const double b_max = num(row, s_b);

    std::vector<int> seen(rows.size(), 0);
    std::map<std::size_t, std::vector<double>> acc_by_task;
    double b_sum = 0.0, r_sum = 0.0, e_sum = 0.0, unit = 0.0;
    for (const auto* cr : rows) {
      const auto& c = *cr;
      const auto col = [&](std::string_view name) { return num(c, clients.column(name)); };
      const auto j = static_cast<std::size_t>(csv::parse_int(c[clients.column("client")], "client"));
      const auto i = static_cast<std::size_t>(csv::parse_int(c[clients.column("task")], "task"));
      const std::string who = "client " + std::to_string(j) + ": ";
      if (j >= seen.size() || seen[j]++) {
        problem(who + "client index missing or repeated");
        continue;
      }
      const double kept = col("kept_dims"), dims = col("hv_dims");
      const double s0 = col("s0_bits"), sc = col("sc_bits");
      if (!(kept >= 1.0 && kept <= dims)) problem(who + "kept dimensions out of range");
      if (!(sc <= s0)) problem(who + "compressed size above original");
      if (!close(s0 / sc, dims / kept, 1e-12)) problem(who + "size ratio inconsistent with kept dims");
      const double cost = col("kappa") * (s0 / sc - 1.0);
      if (!close(cost, col("cost"), 1e-9)) problem(who + "cost does not match kappa * (ratio - 1)");
      if (cost > col("e_max") * (1.0 + 1e-9) + 1e-12) problem(who + "cost above e_max");
      const double b = col("bandwidth_hz"), p = col("power_w");
      if (!(b >= 0.0 && p >= 0.0)) problem(who + "negative bandwidth or power");
      if (p > col("p_max_w") * (1.0 + 1e-12)) problem(who + "power above p_max");
      const double r = b > 0.0 ? b * std::log2(1.0 + p * col("gain") / (col("noise_w_per_hz") * b)) : 0.0;
      if (!close(r, col("rate_bps"), 1e-9)) problem(who + "rate does not match the channel");
      if (!(r > 0.0) || sc / r > col("t_max_s") * (1.0 + 1e-9)) problem(who + "latency above t_max");
      b_sum += b;
      r_sum += r;
      e_sum += cost;
      unit = col("rate_unit_bps");
      acc_by_task[i].push_back(col("accuracy"));
    }
    if (b_sum > b_max * (1.0 + 1e-9)) problem("bandwidth budget exceeded");
    double mean = 0.0;
    std::size_t tasks = acc_by_task.empty() ? 0 : acc_by_task.rbegin()->first + 1;
    for (std::size_t i = 0; i < tasks; ++i) {
      const auto t = acc_by_task.find(i);
      if (t == acc_by_task.end() || t->second.size() < 2) {
        problem("task " + std::to_string(i) + " has fewer than two clients");
        continue;
      }
      double s = 0.0;
      for (double a : t->second) s += a;
      mean += s / static_cast<double>(t->second.size());
    }
    if (tasks > 0) mean /= static_cast<double>(tasks);
    if (!close(r_sum, num(row, summary.column("rate_sum_bps")), 1e-9)) problem("rate sum mismatch");
    if (!close(e_sum, num(row, summary.column("cost_sum")), 1e-9)) problem("cost sum mismatch");
    if (!close(mean, num(row, summary.column("mean_accuracy")), 1e-9)) problem("mean accuracy mismatch");
    const double q = r_sum / unit * mean;
    if (!close(e_sum / q, num(row, summary.column("cpr")), 1e-9)) problem("cpr mismatch");
  }
  return report;
}

}  // namespace ilac::runner
