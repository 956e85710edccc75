// ilac: command-line front end for the experiment runner.
//
//   ilac run --config <path> [--set k=v]... [--seed N] [--out dir]
//   ilac curves --config <path> --out curves.csv
//   ilac verify --result summary.csv
//
// Exit codes: 0 success, 1 config error, 2 every sweep point infeasible (or a
// verification failure), 3 I/O error.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ilac/error.hpp"
#include "ilac/runner.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kInfeasible = 2;
constexpr int kIoError = 3;

ilac::runner::RunConfig make_config(const std::string& path, const std::vector<std::string>& sets,
                                    const std::optional<std::uint64_t>& seed) {
  auto config = ilac::runner::load_config(path);
  ilac::runner::apply_overrides(config, sets);
  if (seed) config.seed = *seed;
  config.validate();
  return config;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            const std::optional<std::uint64_t>& seed, const std::string& out) {
  auto config = make_config(config_path, sets, seed);
  if (!out.empty()) config.out_dir = out;
  const auto result = ilac::runner::run(config);
  const auto files = ilac::runner::write_csv(result, config, config.out_dir);
  for (const auto& p : result.points) {
    if (!p.error.empty()) {
      std::cerr << "infeasible: " << ilac::runner::to_string(p.mode) << " at " << p.b_max_hz
                << " Hz: " << p.error << '\n';
    }
  }
  std::cout << "wrote " << files.summary.string() << ", " << files.trace.string() << ", "
            << files.clients.string() << '\n';
  std::cout << result.feasible_points() << " of " << result.points.size()
            << " points feasible\n";
  return result.feasible_points() == 0 ? kInfeasible : kOk;
}

int cmd_curves(const std::string& config_path, const std::vector<std::string>& sets,
               const std::optional<std::uint64_t>& seed, const std::string& out) {
  auto config = make_config(config_path, sets, seed);
  config.curve_cache.clear();
  const auto curves = ilac::runner::build_curves(config);
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ilac::IoError("cannot open for writing", out);
  ilac::sysmodel::write_curves_csv(f, curves);
  f.close();
  if (!f) throw ilac::IoError("write failed", out);
  std::cout << "wrote " << out << '\n';
  return kOk;
}

int cmd_verify(const std::string& summary) {
  const auto report = ilac::runner::verify_outputs(summary);
  for (const auto& p : report.problems) std::cout << "FAIL " << p << '\n';
  std::cout << report.rows_checked << " feasible rows checked, " << report.problems.size()
            << " problems\n";
  return report.ok() ? kOk : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint learning and communication resource allocation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out;

  auto* run = app.add_subcommand("run", "Solve every (mode, b_max) point and write CSVs");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--set", sets, "Override a config key (key=value)");
  run->add_option("--seed", seed, "Global seed");
  run->add_option("--out", out, "Output directory");

  auto* curves = app.add_subcommand("curves", "Measure accuracy curves and write them as CSV");
  curves->add_option("--config", config_path, "Config file")->required();
  curves->add_option("--set", sets, "Override a config key (key=value)");
  curves->add_option("--seed", seed, "Global seed");
  curves->add_option("--out", out, "Output CSV")->required();

  std::string summary;
  auto* verify = app.add_subcommand("verify", "Re-check every constraint in emitted results");
  verify->add_option("--result", summary, "summary.csv (clients.csv must sit next to it)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, sets, seed, out);
    if (curves->parsed()) return cmd_curves(config_path, sets, seed, out);
    return cmd_verify(summary);
  } catch (const ilac::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ilac::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasible;
  }
}
